"""L2-normalized Hermite functions by three-term recurrence.

``psi_m(q) = H_m(q) exp(-q^2/2) / sqrt(2^m m! sqrt(pi))`` are the position
wavefunctions of Fock states with vacuum variance 1/2.  The raw polynomial
and ``2^m m!`` overflow near m = 85; the normalized recurrence stays O(1).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

MAX_ORDER = 200


def hermite_psi_table(m_max: int, q) -> np.ndarray:
    """Rows ``psi_0(q) ... psi_{m_max}(q)``; shape ``(m_max + 1,) + shape(q)``."""
    if int(m_max) != m_max or m_max < 0:
        raise DomainError(f"Hermite order must be a non-negative integer, got {m_max!r}")
    if m_max > MAX_ORDER:
        raise DomainError(f"Hermite order {m_max} above the supported cap {MAX_ORDER}")
    q = np.asarray(q, dtype=float)
    out = np.empty((int(m_max) + 1,) + q.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * q * q)
    if m_max >= 1:
        out[1] = math.sqrt(2.0) * q * out[0]
    for m in range(2, int(m_max) + 1):
        out[m] = math.sqrt(2.0 / m) * q * out[m - 1] - math.sqrt((m - 1) / m) * out[m - 2]
    return out


def hermite_psi(m: int, q):
    """Single Hermite function ``psi_m`` at ``q`` (scalar or array)."""
    values = hermite_psi_table(m, q)[-1]
    return float(values) if values.ndim == 0 else values


def hermite_nodes(m: int) -> np.ndarray:
    """Non-negative zeros of ``psi_m``, sorted."""
    if m <= 0:
        return np.empty(0)
    roots, _ = np.polynomial.hermite.hermgauss(m)
    return np.sort(roots[roots >= -1e-14].clip(min=0.0))
