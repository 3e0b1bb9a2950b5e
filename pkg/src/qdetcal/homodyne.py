"""Quadrature densities for lossy probes and homodyne Fisher information.

Quadratures use vacuum variance 1/2.  A Fock-diagonal probe ``sum_j w_j |j><j|``
after loss ``eta`` is the photon-number mixture ``P_m = sum_j w_j C(j,m)
eta^m (1-eta)^(j-m)``, and its quadrature density is ``sum_m P_m psi_m(q)^2``.
A coherent state in phase with the local oscillator gives a Gaussian centred
on ``sqrt(2 eta) alpha``.

Fisher integrals ``int (dp/deta)^2 / p dq`` use analytic eta-derivatives of the
weights and adaptive Gauss-Kronrod quadrature (QUADPACK via scipy).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import integrate

from .core import (
    Coherent,
    Fock,
    FockMixture,
    FisherResult,
    HeraldedSinglePhoton,
    Method,
    ProbeState,
    QuadratureGrid,
    check_eta,
)
from .discrete import binomial_pmf, binomial_pmf_derivative
from .errors import ConvergenceFailure, DomainError
from .hermite import hermite_nodes, hermite_psi_table

#: Above this efficiency a node-bearing density makes the Fisher integral blow up.
ETA_CAP = 1.0 - 1e-6

#: Minimum surviving vacuum weight that keeps the density strictly positive.
VACUUM_FLOOR = 1e-6

SQRT_PI = math.sqrt(math.pi)

Density = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def lossy_number_distribution(weights: dict[int, float], eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Photon-number distribution after loss, and its eta-derivative."""
    top = max(weights)
    P = np.zeros(top + 1)
    dP = np.zeros(top + 1)
    for j, w in weights.items():
        if w == 0.0:
            continue
        for m in range(j + 1):
            P[m] += w * binomial_pmf(j, m, eta)
            dP[m] += w * binomial_pmf_derivative(j, m, eta)
    return P, dP


def _photon_weights(probe: ProbeState) -> dict[int, float]:
    if isinstance(probe, (Fock, HeraldedSinglePhoton, FockMixture)):
        return probe.photon_weights()
    raise DomainError(f"{probe!r} is not Fock-diagonal")


def fock_diagonal_density(weights: dict[int, float], eta: float) -> Density:
    """Closure returning ``(p(q), dp/deta(q))`` for a Fock-diagonal probe."""
    P, dP = lossy_number_distribution(weights, eta)
    top = P.size - 1

    def density(q):
        psi2 = hermite_psi_table(top, q) ** 2
        return np.tensordot(P, psi2, axes=1), np.tensordot(dP, psi2, axes=1)

    return density


def pdf_fock_lossy(n: int, eta: float, q):
    """Quadrature density of ``|n>`` after loss ``eta``: ``sum_m C(n,m) eta^m (1-eta)^(n-m) psi_m(q)^2``."""
    eta = check_eta(eta)
    p, _ = fock_diagonal_density(Fock(n).photon_weights(), eta)(np.asarray(q, dtype=float))
    return float(p) if np.ndim(p) == 0 else p


def pdf_fock_lossy_derivative(n: int, eta: float, q):
    eta = check_eta(eta)
    _, dp = fock_diagonal_density(Fock(n).photon_weights(), eta)(np.asarray(q, dtype=float))
    return float(dp) if np.ndim(dp) == 0 else dp


def coherent_mean(alpha: float, eta: float) -> float:
    return math.sqrt(2.0 * eta) * alpha


def pdf_coherent_lossy(alpha: float, eta: float, q):
    """``exp(-(q - sqrt(2 eta) alpha)^2) / sqrt(pi)``."""
    eta = check_eta(eta)
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha!r}")
    q = np.asarray(q, dtype=float)
    p = np.exp(-((q - coherent_mean(alpha, eta)) ** 2)) / SQRT_PI
    return float(p) if p.ndim == 0 else p


def coherent_density(alpha: float, eta: float) -> Density:
    mu = coherent_mean(alpha, eta)
    dmu = alpha / math.sqrt(2.0 * eta)

    def density(q):
        p = np.exp(-((q - mu) ** 2)) / SQRT_PI
        return p, 2.0 * (q - mu) * dmu * p

    return density


def fisher_integrand(density: Density) -> Callable[[float], float]:
    def f(q):
        p, dp = density(np.asarray(q, dtype=float))
        if p <= 0.0:
            return 0.0
        return float(dp * dp / p)

    return f


def quadrature_fisher(
    density: Density,
    lo: float,
    hi: float,
    grid: QuadratureGrid,
    points=None,
    factor: float = 1.0,
) -> FisherResult:
    """Adaptive integral of ``(dp)^2 / p`` over ``[lo, hi]``, times ``factor``."""
    pts = None
    if points is not None:
        pts = [float(x) for x in points if lo < x < hi] or None
    value, abserr, info = integrate.quad(
        fisher_integrand(density),
        lo,
        hi,
        epsabs=grid.abs_tol,
        epsrel=grid.rel_tol,
        limit=grid.max_subdivisions,
        points=pts,
        full_output=1,
    )[:3]
    tol = max(grid.abs_tol, grid.rel_tol * abs(value))
    if abserr > 100 * tol:
        raise ConvergenceFailure(
            f"quadrature error {abserr:.3g} above tolerance {tol:.3g} after {info['last']} subintervals"
        )
    return FisherResult(factor * value, Method.QUADRATURE, factor * abserr)


def fisher_homodyne_mixture(
    weights: dict[int, float], eta: float, grid: QuadratureGrid | None = None
) -> FisherResult:
    """Fisher information for any Fock-diagonal probe on a homodyne detector."""
    grid = grid or QuadratureGrid()
    eta = check_eta(eta)
    top = max(j for j, w in weights.items() if w > 0.0)
    if top == 0:
        return FisherResult(0.0, Method.QUADRATURE)
    P, _ = lossy_number_distribution(weights, eta)
    if eta > ETA_CAP and P[0] < VACUUM_FLOOR:
        return FisherResult.diverged(Method.QUADRATURE)
    # even integrand: integrate q >= 0 and double
    return quadrature_fisher(
        fock_diagonal_density(weights, eta),
        0.0,
        grid.half_range(top),
        grid,
        points=hermite_nodes(top),
        factor=2.0,
    )


def fisher_homodyne_fock(n: int, eta: float, grid: QuadratureGrid | None = None) -> FisherResult:
    """Numerical Fisher information of ``|n>`` on a lossy homodyne detector.

    Returns the divergent sentinel for ``eta > 1 - 1e-6`` and ``n >= 1``.
    """
    return fisher_homodyne_mixture(Fock(n).photon_weights(), eta, grid)


def fisher_homodyne_heralded(xi: float, eta: float, grid: QuadratureGrid | None = None) -> FisherResult:
    return fisher_homodyne_mixture(HeraldedSinglePhoton(xi).photon_weights(), eta, grid)


def fisher_homodyne_coherent(alpha: float, eta: float) -> FisherResult:
    """``alpha^2 / eta``."""
    eta = check_eta(eta)
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha!r}")
    if eta == 0.0:
        return FisherResult.diverged()
    return FisherResult(alpha * alpha / eta)


def fisher_homodyne_coherent_quadrature(
    alpha: float, eta: float, grid: QuadratureGrid | None = None
) -> FisherResult:
    """Same quantity as :func:`fisher_homodyne_coherent`, by integrating the Gaussian density."""
    grid = grid or QuadratureGrid()
    eta = check_eta(eta)
    if eta == 0.0:
        return FisherResult.diverged(Method.QUADRATURE)
    mu = coherent_mean(alpha, eta)
    half = grid.half_range(0)
    return quadrature_fisher(coherent_density(alpha, eta), mu - half, mu + half, grid, points=[mu])


def fisher_homodyne(probe: ProbeState, eta: float, grid: QuadratureGrid | None = None) -> FisherResult:
    if isinstance(probe, Coherent):
        if probe.mean_photons == 0.0:
            check_eta(eta)
            return FisherResult(0.0)
        # mean_photons / eta directly, avoiding the round trip through sqrt
        result = fisher_homodyne_coherent(probe.alpha, eta)
        return result if result.divergent else FisherResult(probe.mean_photons / eta)
    return fisher_homodyne_mixture(_photon_weights(probe), eta, grid)
