"""Closed-form two-point correlators <a_i^dag a_j>(theta) under the Kerr lattice.

All functions take the dimensionless time ``theta = U t`` (scalar or array)
and 0-based site indices.
"""

import numpy as np

from ._numeric import as_theta, int_power, restore


def _check_sites(i, j, M):
    for name, k in (("i", i), ("j", j)):
        if int(k) != k or not 0 <= k < M:
            raise IndexError(f"site index {name}={k!r} out of range for M={M}")


def tpcf_mmgs(state, theta, i, j):
    """Two-point correlator of a multi-mode Glauber state.

    For ``i != j`` this is
    ``conj(a_i) a_j exp(|a_i|^2 (e^{i theta} - 1)) exp(|a_j|^2 (e^{-i theta} - 1))``;
    the diagonal ``|a_i|^2`` does not evolve.
    """
    _check_sites(i, j, state.M)
    th, scalar = as_theta(theta)
    ai, aj = state.alpha[i], state.alpha[j]
    if i == j:
        out = np.full(th.shape, abs(ai) ** 2, dtype=np.complex128)
    else:
        ni, nj = abs(ai) ** 2, abs(aj) ** 2
        out = np.conj(ai) * aj * np.exp(ni * np.expm1(1j * th) + nj * np.expm1(-1j * th))
    return restore(out, scalar)


def tpcf_gcs(state, theta, i, j):
    """Two-point correlator of a generalized coherent state.

    ``S conj(xi_i) xi_j (|xi_i|^2 e^{i theta} + |xi_j|^2 e^{-i theta} + rest)^(S-1)``
    for ``i != j``, where ``rest`` is the population of all other sites; the
    diagonal is the constant ``S |xi_i|^2``. The vacuum returns 0.
    """
    _check_sites(i, j, state.M)
    th, scalar = as_theta(theta)
    S = state.S
    if S == 0:
        return restore(np.zeros(th.shape, dtype=np.complex128), scalar)
    pop = state.populations
    if i == j:
        out = np.full(th.shape, S * pop[i], dtype=np.complex128)
        return restore(out, scalar)
    # sum_k |xi_k|^2 = 1, so the bracket is 1 + |xi_i|^2 (e^{it}-1) + |xi_j|^2 (e^{-it}-1)
    base = 1.0 + pop[i] * np.expm1(1j * th) + pop[j] * np.expm1(-1j * th)
    out = S * np.conj(state.xi[i]) * state.xi[j] * int_power(base, S - 1)
    return restore(out, scalar)


def tpcf_thermo(lam, theta):
    """Thermodynamic-limit correlator ``lam exp(lam (2 cos theta - 2))`` (real)."""
    if lam < 0:
        raise ValueError(f"filling factor must be non-negative, got {lam!r}")
    th = np.asarray(theta, dtype=np.float64)
    return lam * np.exp(lam * (2.0 * np.cos(th) - 2.0))


def thermo_gap(S, lam, theta):
    """``|tpcf_gcs - tpcf_thermo|`` for the homogeneous GCS with ``M = S / lam``.

    Uses the homogeneous simplification
    ``(S/M) [1 + (2/M)(cos theta - 1)]^(S-1)`` of ``tpcf_gcs`` for any pair of
    distinct sites; requires ``M >= 2``.
    """
    if int(S) != S or S < 1:
        raise ValueError(f"S must be a positive integer, got {S!r}")
    if lam <= 0:
        raise ValueError(f"filling factor must be positive, got {lam!r}")
    m_real = S / lam
    M = int(round(m_real))
    if abs(m_real - M) > 1e-9 * max(1.0, m_real):
        raise ValueError(f"S/lambda = {m_real!r} is not an integer site count")
    if M < 2:
        raise ValueError("thermo_gap needs at least two sites")
    th = np.asarray(theta, dtype=np.float64)
    base = 1.0 + (2.0 / M) * (np.cos(th) - 1.0)
    gcs = (S / M) * np.real(int_power(base, int(S) - 1))
    return np.abs(gcs - tpcf_thermo(lam, th))
