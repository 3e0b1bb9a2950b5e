"""Comparisons built on the Fisher engines.

Fixed-energy sweeps scale each probe's Fisher information by its number of
uses (Fisher information is additive over independent repetitions).  Crossover
and threshold searches scan on a coarse grid, then bisect.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .core import (
    Coherent,
    DetectorModel,
    Fock,
    FisherResult,
    HeraldedSinglePhoton,
    Homodyne,
    KOutcome,
    OnOff,
    ProbeState,
    check_eta,
)
from .discrete import (
    fisher_koutcome,
    fisher_koutcome_fock,
    fisher_onoff,
    fisher_onoff_small_eta,
)
from .errors import BracketError, DomainError, EnergyMismatch, NoThreshold, QdetcalError
from .homodyne import fisher_homodyne

ENERGY_TOL = 1e-12
SCAN_STEP = 1e-3
CROSSOVER_TOL = 1e-8
THRESHOLD_TOL = 1e-10

THREADS_ENV = "QDETCAL_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def fisher_information(probe: ProbeState, detector: DetectorModel, eta: float) -> FisherResult:
    """Fisher information of one use of ``probe`` on ``detector`` at efficiency ``eta``."""
    if isinstance(detector, OnOff):
        return fisher_onoff(probe, eta, detector.delta)
    if isinstance(detector, KOutcome):
        return fisher_koutcome(probe, eta, detector.K)
    if isinstance(detector, Homodyne):
        return fisher_homodyne(probe, eta, detector.grid)
    raise DomainError(f"unsupported detector {detector!r}")


def _as_value(result: FisherResult) -> float:
    return math.inf if result.divergent else result.value


@dataclass(frozen=True)
class CurveSpec:
    probe: ProbeState
    detector: DetectorModel
    repetitions: Fraction | int = 1
    label: str = ""

    @property
    def energy(self) -> float:
        return float(self.repetitions) * self.probe.mean_photon_number

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        reps = f"{self.repetitions}x" if self.repetitions != 1 else ""
        return f"{reps}{self.probe.label()}"

    def fisher(self, eta: float) -> FisherResult:
        return fisher_information(self.probe, self.detector, eta).scaled(float(self.repetitions))

    def __call__(self, eta: float) -> float:
        return _as_value(self.fisher(eta))


@dataclass(frozen=True)
class ComparisonCurve:
    label: str
    probe: ProbeState
    detector: DetectorModel
    repetitions_per_unit_energy: Fraction
    eta_grid: tuple[float, ...]
    values: tuple[FisherResult, ...] = field(repr=False)

    def array(self) -> np.ndarray:
        return np.array([_as_value(v) for v in self.values])


def _as_spec(curve) -> CurveSpec:
    if isinstance(curve, CurveSpec):
        return curve
    return CurveSpec(*curve)


def check_equal_energy(specs: Sequence[CurveSpec]) -> None:
    energies = [s.energy for s in specs]
    if energies and max(energies) - min(energies) > ENERGY_TOL * max(1.0, max(energies)):
        raise EnergyMismatch(f"curves carry different total energies: {energies}")


def fixed_energy_sweep(
    curves: Sequence[CurveSpec | tuple],
    eta_grid: Sequence[float],
    *,
    check_energy: bool = True,
    workers: int | None = None,
) -> list[ComparisonCurve]:
    """Evaluate every curve on ``eta_grid``; each value is ``M`` times the single-use Fisher information."""
    specs = [_as_spec(c) for c in curves]
    if check_energy:
        check_equal_energy(specs)
    grid = tuple(check_eta(e) for e in eta_grid)
    tasks = [(s, e) for s in specs for e in grid]
    workers = workers or worker_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: t[0].fisher(t[1]), tasks))
    else:
        results = [s.fisher(e) for s, e in tasks]
    out = []
    for i, s in enumerate(specs):
        chunk = tuple(results[i * len(grid) : (i + 1) * len(grid)])
        reps = Fraction(s.repetitions).limit_denominator()
        out.append(ComparisonCurve(s.name, s.probe, s.detector, reps, grid, chunk))
    return out


# --------------------------------------------------------------------------
# crossovers


@dataclass(frozen=True)
class CrossoverResult:
    eta_star: float | None
    bracket: tuple[float, float]
    residual: float
    sign_changes: int = 0


def find_crossover(
    curve_a: Callable[[float], float] | CurveSpec,
    curve_b: Callable[[float], float] | CurveSpec,
    bracket: tuple[float, float],
    *,
    scan_step: float = SCAN_STEP,
    tol: float = CROSSOVER_TOL,
) -> CrossoverResult:
    """First efficiency in ``bracket`` where the two curves cross.

    The difference is scanned at ``scan_step`` resolution; the first sign
    change is refined by bisection to ``tol``.  Without a sign change,
    ``eta_star`` is None and ``residual`` is the smallest ``|F_a - F_b|`` seen.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0.0 <= lo < hi <= 1.0:
        raise DomainError(f"bad bracket {bracket!r}")

    def diff(eta: float) -> float:
        try:
            d = curve_a(eta) - curve_b(eta)
        except QdetcalError as exc:
            raise BracketError(f"curve evaluation failed at eta={eta!r}: {exc}") from exc
        if not math.isfinite(d):
            raise BracketError(f"curve difference not finite at eta={eta!r}")
        return d

    n = max(1, int(math.ceil((hi - lo) / scan_step - 1e-9)))
    xs = np.linspace(lo, hi, n + 1)
    ds = [diff(float(x)) for x in xs]
    signs = np.sign(ds)
    changes = [i for i in range(n) if signs[i] == 0 or signs[i] * signs[i + 1] < 0]
    if not changes and signs[-1] != 0:
        return CrossoverResult(None, (lo, hi), float(np.min(np.abs(ds))), 0)
    i = changes[0] if changes else n
    if signs[i] == 0:
        eta_star = float(xs[i])
    else:
        eta_star = optimize.bisect(diff, float(xs[i]), float(xs[i + 1]), xtol=tol / 4)
    return CrossoverResult(eta_star, (lo, hi), abs(diff(eta_star)), len(changes))


# --------------------------------------------------------------------------
# heralding thresholds


def default_threshold_eta(detector: DetectorModel) -> float:
    return 1.0 - 1e-4 if isinstance(detector, Homodyne) else 1.0


def heralding_threshold(
    detector: DetectorModel,
    reference: ProbeState = Coherent(1.0),
    eta_eval: float | None = None,
    *,
    tol: float = THRESHOLD_TOL,
) -> float:
    """Smallest heralding efficiency whose single photon matches ``reference``.

    Solves ``F_heralded(xi, eta_eval) = F_reference(eta_eval)`` for ``xi`` by
    bisection; the heralded Fisher information increases with ``xi``.  The
    comparison is one use of each probe, not energy-matched.
    """
    eta = default_threshold_eta(detector) if eta_eval is None else check_eta(eta_eval)
    target = _as_value(fisher_information(reference, detector, eta))

    def gap(xi: float) -> float:
        return _as_value(fisher_information(HeraldedSinglePhoton(xi), detector, eta)) - target

    top = gap(1.0)
    if math.isinf(target):
        if math.isinf(top):
            return 1.0
        raise NoThreshold("reference Fisher information diverges")
    if top < 0.0:
        raise NoThreshold(f"perfect heralding falls short of the reference by {-top:.6g}")
    if top == 0.0:
        return 1.0
    if gap(0.0) >= 0.0:
        return 0.0
    return optimize.bisect(gap, 0.0, 1.0, xtol=tol)


@dataclass(frozen=True)
class ThresholdSensitivity:
    eta_eval: float
    xi_star: float
    eta_alt: float
    xi_star_alt: float

    @property
    def shift(self) -> float:
        return abs(self.xi_star_alt - self.xi_star)


def threshold_sensitivity(
    detector: DetectorModel,
    reference: ProbeState = Coherent(1.0),
    eta_eval: float | None = None,
    eta_alt: float = 1.0 - 1e-3,
) -> ThresholdSensitivity:
    """Threshold at the default evaluation point and at ``eta_alt``."""
    eta = default_threshold_eta(detector) if eta_eval is None else eta_eval
    return ThresholdSensitivity(
        eta,
        heralding_threshold(detector, reference, eta),
        eta_alt,
        heralding_threshold(detector, reference, eta_alt),
    )


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class AsymptoticRow:
    eta: float
    exact: float
    approx: float

    @property
    def relative_error(self) -> float:
        return abs(self.exact - self.approx) / self.exact


def asymptotic_error_report(probe: ProbeState, delta: float, eta_grid: Sequence[float]) -> list[AsymptoticRow]:
    """Exact on/off Fisher information against its low-efficiency expansion."""
    rows = []
    for eta in eta_grid:
        if not 0.0 < eta <= 0.1:
            raise DomainError(f"asymptotic report is meant for eta in (0, 0.1], got {eta!r}")
        exact = fisher_onoff(probe, eta, delta)
        approx = fisher_onoff_small_eta(probe, eta, delta)
        rows.append(AsymptoticRow(float(eta), exact.value, approx.value))
    return rows


@dataclass(frozen=True)
class OptimalityRow:
    eta: float
    best_n: int
    values: dict[int, float]


def koutcome_optimality_scan(K: int, eta_grid: Sequence[float], extra: int = 10) -> list[OptimalityRow]:
    """For each eta, which Fock state ``n in K-1..K+extra`` maximizes the K-outcome Fisher information."""
    rows = []
    for eta in eta_grid:
        values = {n: fisher_koutcome_fock(n, K, eta).value for n in range(K - 1, K + extra + 1)}
        best = max(values, key=values.__getitem__)
        rows.append(OptimalityRow(float(eta), best, values))
    return rows


# --------------------------------------------------------------------------
# figure configurations


def figure_eta_grid() -> np.ndarray:
    """99 points 0.01, 0.02, ..., 0.99."""
    return np.round(np.arange(1, 100) * 0.01, 12)


def figure_curves(figure_id: int) -> tuple[list[CurveSpec], bool]:
    """Curve specs for a figure, and whether they are energy-matched."""
    if figure_id == 1:
        d = OnOff(0.0)
        return [
            CurveSpec(Fock(1), d, 3, "3xfock:1"),
            CurveSpec(Fock(3), d, 1, "fock:3"),
            CurveSpec(Coherent(1.0), d, 3, "3xcoherent:1"),
            CurveSpec(Coherent(3.0), d, 1, "coherent:3"),
        ], True
    if figure_id == 2:
        d = OnOff(0.05)
        return [
            CurveSpec(Fock(1), d, 5, "5xfock:1"),
            CurveSpec(Fock(5), d, 1, "fock:5"),
            CurveSpec(Coherent(5.0), d, 1, "coherent:5"),
        ], True
    if figure_id == 3:
        d = Homodyne()
        return [
            CurveSpec(Fock(1), d, 4, "4xfock:1"),
            CurveSpec(Fock(2), d, 2, "2xfock:2"),
            CurveSpec(Fock(4), d, 1, "fock:4"),
            CurveSpec(Coherent(4.0), d, 1, "coherent:4"),
        ], True
    if figure_id == 4:
        d = OnOff(0.0)
        return [
            CurveSpec(HeraldedSinglePhoton(0.80), d, 1, "heralded:0.8"),
            CurveSpec(HeraldedSinglePhoton(1 / math.e), d, 1, "heralded:1/e"),
            CurveSpec(Coherent(1.0), d, 1, "coherent:1"),
        ], False
    raise DomainError(f"unknown figure {figure_id!r}; expected 1-4")


def figure_sweep(figure_id: int, eta_grid: Sequence[float] | None = None) -> list[ComparisonCurve]:
    specs, matched = figure_curves(figure_id)
    grid = figure_eta_grid() if eta_grid is None else eta_grid
    return fixed_energy_sweep(specs, grid, check_energy=matched)
