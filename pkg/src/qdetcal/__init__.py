"""Fisher-information toolkit for calibrating optical detector efficiencies."""

from .analysis import (
    ComparisonCurve,
    CrossoverResult,
    CurveSpec,
    asymptotic_error_report,
    figure_curves,
    figure_sweep,
    find_crossover,
    fisher_information,
    fixed_energy_sweep,
    heralding_threshold,
    koutcome_optimality_scan,
    threshold_sensitivity,
)
from .core import (
    Coherent,
    Fock,
    FockMixture,
    FisherResult,
    HeraldedSinglePhoton,
    Homodyne,
    KOutcome,
    Method,
    OnOff,
    OutcomeDistribution,
    QuadratureGrid,
    crb_variance,
    discrete_fisher,
    finite_difference_fisher,
)
from .discrete import (
    fisher_koutcome,
    fisher_koutcome_fock,
    fisher_onoff,
    fisher_onoff_coherent,
    fisher_onoff_fock,
    fisher_onoff_heralded,
    fisher_onoff_mixture,
    fisher_onoff_small_eta,
    koutcome_claimed_closed_form,
    koutcome_distribution,
    onoff_distribution,
)
from .errors import (
    BoundaryEstimate,
    BracketError,
    ConvergenceFailure,
    DomainError,
    EnergyMismatch,
    NoThreshold,
    QdetcalError,
    SingularOutcome,
    ZeroInformation,
)
from .hermite import hermite_psi, hermite_psi_table
from .homodyne import (
    fisher_homodyne,
    fisher_homodyne_coherent,
    fisher_homodyne_coherent_quadrature,
    fisher_homodyne_fock,
    fisher_homodyne_heralded,
    fisher_homodyne_mixture,
    pdf_coherent_lossy,
    pdf_fock_lossy,
)
from .montecarlo import EstimationResult, EstimationRun, mle_estimate, simulate_outcomes, validate_crb

__version__ = "0.1.0"
