"""Shared domain types and the generic Fisher-information definitions.

Every probe and detector is an immutable dataclass.  Efficiencies ``eta`` and
dark-count exponents ``delta`` are plain floats validated at the API boundary
by :func:`check_eta` and :func:`check_delta`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import DomainError, SingularOutcome, ZeroInformation

#: Probabilities below this are treated as exact zeros.
PROB_FLOOR = 1e-300

NORMALIZATION_TOL = 1e-12
DERIVATIVE_SUM_TOL = 1e-10
MIXTURE_WEIGHT_TOL = 1e-12


def check_eta(eta: float, *, open_interval: bool = False) -> float:
    """Validate an efficiency and return it as a float."""
    eta = float(eta)
    if not math.isfinite(eta) or eta < 0.0 or eta > 1.0:
        raise DomainError(f"efficiency must lie in [0, 1], got {eta!r}")
    if open_interval and (eta == 0.0 or eta == 1.0):
        raise DomainError(f"efficiency must lie in (0, 1), got {eta!r}")
    return eta


def check_delta(delta: float) -> float:
    delta = float(delta)
    if not math.isfinite(delta) or delta < 0.0:
        raise DomainError(f"dark-count exponent must be >= 0, got {delta!r}")
    return delta


# --------------------------------------------------------------------------
# probe states


@dataclass(frozen=True)
class Fock:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"Fock photon number must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def mean_photon_number(self) -> float:
        return float(self.n)

    def photon_weights(self) -> dict[int, float]:
        return {self.n: 1.0}

    def label(self) -> str:
        return f"fock:{self.n}"


@dataclass(frozen=True)
class Coherent:
    """Coherent state with real amplitude ``alpha = sqrt(mean_photons)``, in phase with the LO."""

    mean_photons: float

    def __post_init__(self):
        m = float(self.mean_photons)
        if not math.isfinite(m) or m < 0.0:
            raise DomainError(f"coherent mean photon number must be >= 0, got {self.mean_photons!r}")
        object.__setattr__(self, "mean_photons", m)

    @property
    def alpha(self) -> float:
        return math.sqrt(self.mean_photons)

    @property
    def mean_photon_number(self) -> float:
        return self.mean_photons

    def label(self) -> str:
        return f"coherent:{self.mean_photons:g}"


@dataclass(frozen=True)
class HeraldedSinglePhoton:
    """``xi |1><1| + (1 - xi) |0><0|`` for heralding efficiency ``xi``."""

    xi: float

    def __post_init__(self):
        xi = float(self.xi)
        if not math.isfinite(xi) or xi < 0.0 or xi > 1.0:
            raise DomainError(f"heralding efficiency must lie in [0, 1], got {self.xi!r}")
        object.__setattr__(self, "xi", xi)

    @property
    def mean_photon_number(self) -> float:
        return self.xi

    def photon_weights(self) -> dict[int, float]:
        return {0: 1.0 - self.xi, 1: self.xi}

    def label(self) -> str:
        return f"heralded:{self.xi:g}"


@dataclass(frozen=True)
class FockMixture:
    """Fock-diagonal state ``sum_j w_j |j><j|``.

    ``weights`` accepts a mapping ``{j: w_j}`` or an iterable of ``(j, w_j)``
    pairs; it is stored as a tuple of pairs sorted by ``j`` with duplicates
    merged.
    """

    weights: tuple[tuple[int, float], ...]

    def __post_init__(self):
        raw = self.weights.items() if isinstance(self.weights, Mapping) else self.weights
        merged: dict[int, float] = {}
        for j, w in raw:
            if int(j) != j or j < 0:
                raise DomainError(f"mixture photon numbers must be non-negative integers, got {j!r}")
            w = float(w)
            if not math.isfinite(w) or w < 0.0:
                raise DomainError(f"mixture weights must be >= 0, got {w!r}")
            merged[int(j)] = merged.get(int(j), 0.0) + w
        if not merged:
            raise DomainError("mixture needs at least one component")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > MIXTURE_WEIGHT_TOL:
            raise DomainError(f"mixture weights must sum to 1, got {total!r}")
        object.__setattr__(self, "weights", tuple(sorted(merged.items())))

    @property
    def mean_photon_number(self) -> float:
        return math.fsum(j * w for j, w in self.weights)

    @property
    def max_photons(self) -> int:
        return self.weights[-1][0]

    def photon_weights(self) -> dict[int, float]:
        return dict(self.weights)

    def label(self) -> str:
        return "mixture:" + ",".join(f"{j}={w:g}" for j, w in self.weights)


ProbeState = Union[Fock, Coherent, HeraldedSinglePhoton, FockMixture]


# --------------------------------------------------------------------------
# detectors


@dataclass(frozen=True)
class QuadratureGrid:
    """Integration settings for homodyne Fisher integrals.

    ``q_max=None`` means the per-probe default ``sqrt(2 n + 1) + 10`` around
    the density's centre.
    """

    q_max: float | None = None
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 500

    def __post_init__(self):
        if self.q_max is not None and not self.q_max > 0:
            raise DomainError("q_max must be positive")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")

    def half_range(self, n: int) -> float:
        if self.q_max is not None:
            return float(self.q_max)
        return math.sqrt(2 * n + 1) + 10.0


@dataclass(frozen=True)
class OnOff:
    delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "delta", check_delta(self.delta))

    def label(self) -> str:
        return "onoff"


@dataclass(frozen=True)
class KOutcome:
    """Resolves 0..K-2 photons exactly plus one overflow outcome."""

    K: int

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 2:
            raise DomainError(f"K-outcome detector needs integer K >= 2, got {self.K!r}")
        object.__setattr__(self, "K", int(self.K))

    def label(self) -> str:
        return f"koutcome:{self.K}"


@dataclass(frozen=True)
class Homodyne:
    grid: QuadratureGrid = field(default_factory=QuadratureGrid)

    def label(self) -> str:
        return "homodyne"


DetectorModel = Union[OnOff, KOutcome, Homodyne]


# --------------------------------------------------------------------------
# results


class Method(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"
    FINITE_DIFFERENCE = "finite-difference"


@dataclass(frozen=True)
class FisherResult:
    """A Fisher-information value in units of 1/eta^2.

    Divergent results carry ``divergent=True`` and ``value=inf``; they
    serialize with ``value: null``.
    """

    value: float
    method: Method = Method.CLOSED_FORM
    error_estimate: float = 0.0
    divergent: bool = False

    @classmethod
    def diverged(cls, method: Method = Method.CLOSED_FORM) -> "FisherResult":
        return cls(math.inf, method, 0.0, True)

    def scaled(self, repetitions: float) -> "FisherResult":
        """Fisher information of ``repetitions`` independent uses."""
        if self.divergent:
            return self
        return FisherResult(self.value * repetitions, self.method, self.error_estimate * repetitions)

    def to_dict(self) -> dict:
        return {
            "value": None if self.divergent else self.value,
            "method": self.method.value,
            "error_estimate": self.error_estimate,
            "divergent": self.divergent,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FisherResult":
        if d.get("divergent"):
            return cls.diverged(Method(d["method"]))
        return cls(float(d["value"]), Method(d["method"]), float(d["error_estimate"]))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Discrete pmf over detector outcomes with its analytic eta-derivative."""

    probabilities: np.ndarray
    derivatives: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        dp = np.array(self.derivatives, dtype=float)
        if p.ndim != 1 or p.shape != dp.shape or p.size == 0:
            raise DomainError("probabilities and derivatives must be equal-length 1-d sequences")
        if np.any(p < 0.0) or not np.all(np.isfinite(p)) or not np.all(np.isfinite(dp)):
            raise DomainError("probabilities must be finite and non-negative")
        if abs(math.fsum(p) - 1.0) > NORMALIZATION_TOL:
            raise DomainError(f"probabilities sum to {math.fsum(p)!r}, not 1")
        if abs(math.fsum(dp)) > DERIVATIVE_SUM_TOL:
            raise DomainError(f"derivatives sum to {math.fsum(dp)!r}, not 0")
        p[p < PROB_FLOOR] = 0.0
        p.setflags(write=False)
        dp.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "derivatives", dp)

    def __len__(self) -> int:
        return self.probabilities.size


def discrete_fisher(dist: OutcomeDistribution) -> FisherResult:
    """``sum_k (dp_k)^2 / p_k`` over the outcomes of ``dist``.

    Outcomes with ``p_k = 0`` and ``dp_k = 0`` are skipped.  A zero-probability
    outcome with non-zero derivative raises :class:`SingularOutcome`.
    """
    p, dp = dist.probabilities, dist.derivatives
    zero = p == 0.0
    if np.any(zero & (dp != 0.0)):
        raise SingularOutcome("outcome with zero probability has non-zero eta-derivative")
    live = ~zero
    terms = dp[live] ** 2 / p[live]
    return FisherResult(math.fsum(terms), Method.CLOSED_FORM, 0.0)


def crb_variance(fisher: FisherResult, repetitions: int) -> float:
    """Cramer-Rao lower bound ``1 / (M F)`` on the variance of an unbiased estimator."""
    if int(repetitions) != repetitions or repetitions < 1:
        raise DomainError(f"repetitions must be a positive integer, got {repetitions!r}")
    if fisher.divergent:
        return 0.0
    if fisher.value <= 0.0:
        raise ZeroInformation("Fisher information is zero; the variance is unbounded")
    return 1.0 / (repetitions * fisher.value)


def fd_step(eta: float) -> float:
    return 1e-6 * max(1.0, abs(eta))


def finite_difference_fisher(
    pmf: Callable[[float], Sequence[float]], eta: float, h: float | None = None
) -> FisherResult:
    """Fisher information from a central difference of ``pmf`` around ``eta``.

    ``pmf(eta)`` returns the outcome probabilities.  ``eta`` must sit at least
    ``10 h`` away from both ends of [0, 1].  The error estimate is the change
    when the step is doubled.
    """
    h = fd_step(eta) if h is None else float(h)
    if eta - 10 * h < 0.0 or eta + 10 * h > 1.0:
        raise DomainError(f"eta={eta!r} too close to an endpoint for step {h!r}")

    def fisher_at(step: float) -> float:
        p = np.asarray(pmf(eta), dtype=float)
        dp = (np.asarray(pmf(eta + step), dtype=float) - np.asarray(pmf(eta - step), dtype=float)) / (2 * step)
        live = p > PROB_FLOOR
        if np.any(~live & (np.abs(dp) > 0)):
            raise SingularOutcome("outcome with zero probability has non-zero eta-derivative")
        return math.fsum(dp[live] ** 2 / p[live])

    value = fisher_at(h)
    return FisherResult(value, Method.FINITE_DIFFERENCE, abs(value - fisher_at(2 * h)))


def standard_eta_grid() -> np.ndarray:
    """The 19-point grid 0.05, 0.10, ..., 0.95."""
    return np.round(np.arange(1, 20) * 0.05, 12)

