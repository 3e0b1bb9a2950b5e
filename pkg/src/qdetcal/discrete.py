"""Fisher information for on/off and K-outcome photon counters.

Losses are a beam splitter of transmissivity ``eta`` in front of an ideal
detector, so an input Fock state ``|n>`` arrives as a binomial photon number.
Dark counts multiply the no-click probability by ``exp(-delta)``.

Coherent-state closed forms use ``|alpha|^4 / (exp(delta + eta |alpha|^2) - 1)``;
this follows from the no-click probability ``exp(-delta - eta |alpha|^2)`` and
is positive, unlike the form with the denominator written the other way round.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .core import (
    Coherent,
    Fock,
    FockMixture,
    FisherResult,
    HeraldedSinglePhoton,
    OutcomeDistribution,
    ProbeState,
    check_delta,
    check_eta,
    discrete_fisher,
)
from .errors import DomainError, SingularOutcome

LOG_BINOM_THRESHOLD = 60


def binomial_pmf(n: int, k: int, eta: float) -> float:
    """``C(n, k) eta^k (1 - eta)^(n - k)``, in log space for large ``n``."""
    if k < 0 or k > n:
        return 0.0
    if eta == 0.0:
        return 1.0 if k == 0 else 0.0
    if eta == 1.0:
        return 1.0 if k == n else 0.0
    if n <= LOG_BINOM_THRESHOLD:
        return math.comb(n, k) * eta**k * (1.0 - eta) ** (n - k)
    log_c = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.exp(log_c + k * math.log(eta) + (n - k) * math.log1p(-eta))


def binomial_pmf_derivative(n: int, k: int, eta: float) -> float:
    """``d/d eta`` of :func:`binomial_pmf`, i.e. ``n [b(k-1; n-1) - b(k; n-1)]``."""
    if k < 0 or k > n or n == 0:
        return 0.0
    return n * (binomial_pmf(n - 1, k - 1, eta) - binomial_pmf(n - 1, k, eta))


def binomial_weights(n: int, eta: float) -> tuple[np.ndarray, np.ndarray]:
    """All ``n + 1`` loss-channel weights and their eta-derivatives."""
    w = np.array([binomial_pmf(n, m, eta) for m in range(n + 1)])
    dw = np.array([binomial_pmf_derivative(n, m, eta) for m in range(n + 1)])
    return w, dw


# --------------------------------------------------------------------------
# on/off detector


def vacuum_probability(probe: ProbeState, eta: float) -> tuple[float, float]:
    """Probability that no photon survives the loss, and its eta-derivative."""
    if isinstance(probe, Fock):
        n = probe.n
        if n == 0:
            return 1.0, 0.0
        return (1.0 - eta) ** n, -n * (1.0 - eta) ** (n - 1)
    if isinstance(probe, Coherent):
        m = probe.mean_photons
        q = math.exp(-eta * m)
        return q, -m * q
    if isinstance(probe, HeraldedSinglePhoton):
        return 1.0 - probe.xi * eta, -probe.xi
    if isinstance(probe, FockMixture):
        q = dq = 0.0
        for j, w in probe.weights:
            qj, dqj = vacuum_probability(Fock(j), eta)
            q += w * qj
            dq += w * dqj
        return q, dq
    raise DomainError(f"unsupported probe {probe!r}")


def _click_probability(probe: ProbeState, eta: float, delta: float) -> float:
    # avoids cancellation in 1 - p_off when eta and delta are small
    if isinstance(probe, Fock) and eta < 1.0:
        return -math.expm1(-delta + probe.n * math.log1p(-eta))
    if isinstance(probe, Coherent):
        return -math.expm1(-delta - eta * probe.mean_photons)
    if isinstance(probe, HeraldedSinglePhoton):
        return -math.expm1(-delta) + math.exp(-delta) * probe.xi * eta
    return 1.0 - math.exp(-delta) * vacuum_probability(probe, eta)[0]


def onoff_distribution(probe: ProbeState, eta: float, delta: float = 0.0) -> OutcomeDistribution:
    """``(p_off, p_on)`` with derivatives for any probe."""
    eta = check_eta(eta)
    delta = check_delta(delta)
    q, dq = vacuum_probability(probe, eta)
    p_off = math.exp(-delta) * q
    dp_off = math.exp(-delta) * dq
    p_on = _click_probability(probe, eta, delta)
    return OutcomeDistribution(np.array([p_off, p_on]), np.array([dp_off, -dp_off]))


def _two_outcome(probe: ProbeState, eta: float, delta: float) -> FisherResult:
    try:
        return discrete_fisher(onoff_distribution(probe, eta, delta))
    except SingularOutcome:
        return FisherResult.diverged()


def fisher_onoff_fock(n: int, eta: float, delta: float = 0.0) -> FisherResult:
    """``n^2 (1 - eta)^(n - 2) / (exp(delta) - (1 - eta)^n)``.

    Finite at ``eta = 1`` for ``n >= 2`` (``4 exp(-delta)`` for ``n = 2``, zero
    above).  Divergent for ``n = 1, eta = 1`` and for ``eta = 0, delta = 0``.
    """
    eta = check_eta(eta)
    delta = check_delta(delta)
    if int(n) != n or n < 0:
        raise DomainError(f"photon number must be a non-negative integer, got {n!r}")
    n = int(n)
    if n == 0:
        return FisherResult(0.0)
    if eta == 1.0:
        if n == 1:
            return FisherResult.diverged()
        return FisherResult(4.0 * math.exp(-delta) if n == 2 else 0.0)
    if eta == 0.0 and delta == 0.0:
        return FisherResult.diverged()
    # exp(delta) - (1-eta)^n, written with expm1 to keep digits at small eta
    denom = math.expm1(delta) - math.expm1(n * math.log1p(-eta))
    return FisherResult(n * n * (1.0 - eta) ** (n - 2) / denom)


def fisher_onoff_coherent(mean_photons: float, eta: float, delta: float = 0.0) -> FisherResult:
    """``|alpha|^4 / (exp(delta + eta |alpha|^2) - 1)``."""
    eta = check_eta(eta)
    delta = check_delta(delta)
    m = float(mean_photons)
    if not m > 0.0:
        raise DomainError(f"coherent mean photon number must be > 0, got {mean_photons!r}")
    x = delta + eta * m
    if x == 0.0:
        return FisherResult.diverged()
    return FisherResult(m * m / math.expm1(x))


def fisher_onoff_heralded(xi: float, eta: float, delta: float = 0.0) -> FisherResult:
    """Two-outcome Fisher information for ``p_off = exp(-delta) (1 - xi eta)``.

    At ``delta = 0`` this simplifies to ``xi / (eta (1 - xi eta))``.
    """
    return _two_outcome(HeraldedSinglePhoton(xi), check_eta(eta), check_delta(delta))


def fisher_onoff_mixture(mixture: FockMixture, eta: float, delta: float = 0.0) -> FisherResult:
    if not isinstance(mixture, FockMixture):
        mixture = FockMixture(mixture)
    return _two_outcome(mixture, check_eta(eta), check_delta(delta))


def fisher_onoff(probe: ProbeState, eta: float, delta: float = 0.0) -> FisherResult:
    if isinstance(probe, Fock):
        return fisher_onoff_fock(probe.n, eta, delta)
    if isinstance(probe, Coherent):
        if probe.mean_photons == 0.0:
            check_eta(eta), check_delta(delta)
            return FisherResult(0.0)
        return fisher_onoff_coherent(probe.mean_photons, eta, delta)
    if isinstance(probe, HeraldedSinglePhoton):
        return fisher_onoff_heralded(probe.xi, eta, delta)
    if isinstance(probe, FockMixture):
        return fisher_onoff_mixture(probe, eta, delta)
    raise DomainError(f"unsupported probe {probe!r}")


def fisher_onoff_small_eta(probe: ProbeState, eta: float, delta: float = 0.0) -> FisherResult:
    """Leading low-efficiency behaviour of the on/off Fisher information.

    Fock: ``n / (eta + (exp(delta) - 1) / n)``.
    Coherent: ``|alpha|^2 / (exp(delta) eta + (exp(delta) - 1) / |alpha|^2)``.
    This is an approximation valid for ``eta << 1``, not the exact value.
    """
    eta = check_eta(eta)
    delta = check_delta(delta)
    if isinstance(probe, Fock):
        size, scale = float(probe.n), 1.0
    elif isinstance(probe, Coherent):
        size, scale = probe.mean_photons, math.exp(delta)
    else:
        raise DomainError("small-eta expansion is defined for Fock and coherent probes only")
    if size <= 0.0:
        raise DomainError("small-eta expansion needs a non-vacuum probe")
    denom = scale * eta + math.expm1(delta) / size
    if denom == 0.0:
        return FisherResult.diverged()
    return FisherResult(size / denom)


# --------------------------------------------------------------------------
# K-outcome detector


def _fock_counts(n: int, eta: float, K: int) -> tuple[np.ndarray, np.ndarray]:
    p = np.zeros(K)
    dp = np.zeros(K)
    for k in range(min(K - 1, n + 1)):
        p[k] = binomial_pmf(n, k, eta)
        dp[k] = binomial_pmf_derivative(n, k, eta)
    if n >= K - 1:
        # P(X >= K-1) as a regularized incomplete beta, no 1 - sum cancellation
        k0 = K - 1
        p[-1] = float(special.betainc(k0, n - k0 + 1, eta)) if 0.0 < eta < 1.0 else float(eta == 1.0)
        dp[-1] = n * binomial_pmf(n - 1, k0 - 1, eta)
    return p, dp


def _poisson_pmf(k: int, lam: float) -> float:
    if k < 0:
        return 0.0
    if lam == 0.0:
        return float(k == 0)
    return math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))


def _poisson_counts(mean_photons: float, eta: float, K: int) -> tuple[np.ndarray, np.ndarray]:
    lam = eta * mean_photons
    p = np.zeros(K)
    dp = np.zeros(K)
    for k in range(K - 1):
        p[k] = _poisson_pmf(k, lam)
        dp[k] = mean_photons * (_poisson_pmf(k - 1, lam) - p[k])
    # P(X >= K-1) as a regularized incomplete gamma
    p[-1] = float(special.gammainc(K - 1, lam)) if lam > 0 else 0.0
    dp[-1] = mean_photons * _poisson_pmf(K - 2, lam)
    return p, dp


def koutcome_distribution(probe: ProbeState, eta: float, K: int) -> OutcomeDistribution:
    """Outcomes ``0, ..., K-2`` photons plus the overflow ``>= K-1``."""
    eta = check_eta(eta)
    if int(K) != K or K < 2:
        raise DomainError(f"K must be an integer >= 2, got {K!r}")
    K = int(K)
    if isinstance(probe, Fock):
        p, dp = _fock_counts(probe.n, eta, K)
    elif isinstance(probe, Coherent):
        p, dp = _poisson_counts(probe.mean_photons, eta, K)
    elif isinstance(probe, (HeraldedSinglePhoton, FockMixture)):
        p = np.zeros(K)
        dp = np.zeros(K)
        for j, w in probe.photon_weights().items():
            pj, dpj = _fock_counts(j, eta, K)
            p += w * pj
            dp += w * dpj
    else:
        raise DomainError(f"unsupported probe {probe!r}")
    return OutcomeDistribution(p, dp)


def fisher_koutcome(probe: ProbeState, eta: float, K: int) -> FisherResult:
    """Generic multinomial Fisher information for a K-outcome detector."""
    try:
        return discrete_fisher(koutcome_distribution(probe, eta, K))
    except SingularOutcome:
        return FisherResult.diverged()


def fisher_koutcome_fock(n: int, K: int, eta: float) -> FisherResult:
    """Closed-form sum for a Fock state on a K-outcome detector.

    ``sum_{k=0}^{K-2} C(n,k) (1-eta)^(n-k-2) eta^(k-2) (k - n eta)^2
    + (d p_K)^2 / p_K`` with ``p_K = 1 - sum_{k=0}^{K-2} C(n,k) (1-eta)^(n-k) eta^k``.

    The overflow probability is evaluated literally as one minus the resolved
    sum, independently of :func:`koutcome_distribution`.  For ``n < K - 1`` the
    overflow outcome is empty and contributes nothing.
    """
    eta = check_eta(eta, open_interval=True)
    if int(K) != K or K < 2:
        raise DomainError(f"K must be an integer >= 2, got {K!r}")
    if int(n) != n or n < 0:
        raise DomainError(f"photon number must be a non-negative integer, got {n!r}")
    n, K = int(n), int(K)
    resolved = []
    p_resolved = []
    dp_resolved = []
    for k in range(min(K - 2, n) + 1):
        c = math.comb(n, k)
        resolved.append(c * (1 - eta) ** (n - k - 2) * eta ** (k - 2) * (k - n * eta) ** 2)
        p_resolved.append(c * (1 - eta) ** (n - k) * eta**k)
        dp_resolved.append(c * (1 - eta) ** (n - k - 1) * eta ** (k - 1) * (k - n * eta))
    total = math.fsum(resolved)
    if n >= K - 1:
        p_K = 1.0 - math.fsum(p_resolved)
        dp_K = -math.fsum(dp_resolved)
        total += dp_K**2 / p_K
    return FisherResult(total)


def koutcome_claimed_closed_form(K: int, eta: float) -> float:
    """Reference value ``(K - 1) / (eta (1 - eta))``.

    Kept only for comparison: it does not agree with
    :func:`fisher_koutcome_fock` at ``n = K`` for ``K >= 3`` (e.g. 8.0 against
    10.5 at ``K = n = 3, eta = 0.5``).  Not used by any analysis routine.
    """
    eta = check_eta(eta, open_interval=True)
    if int(K) != K or K < 2:
        raise DomainError(f"K must be an integer >= 2, got {K!r}")
    return (K - 1) / (eta * (1 - eta))
