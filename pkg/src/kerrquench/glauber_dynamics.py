"""Multi-mode Glauber states under the Kerr lattice and the Fourier relations.

A Glauber state has no fixed particle number, but its ``S``-particle
component is a GCS. The GCS Loschmidt amplitude is therefore the ``S``-th
Fourier coefficient, in a phase-shift variable ``x``, of the cross
correlation between ``|alpha>`` and ``|alpha e^{-2 pi i x}>``. Here that
coefficient is taken with the uniform rectangle rule on ``N_x`` nodes, which
is exact for trigonometric polynomials of degree below ``N_x``.
"""

from dataclasses import dataclass
from math import ceil, lgamma, log, pi, sqrt

import numpy as np
from scipy.stats import poisson

from . import kernels
from ._numeric import as_theta, int_power, restore
from .errors import AliasingError, TailToleranceError
from .states import ComplexSeries

TAIL_TOL = 1e-14


@dataclass(frozen=True)
class TruncationSpec:
    """Per-mode occupation cutoff ``n_cut`` with its admissible Poisson tail."""

    n_cut: int
    tail_tol: float = TAIL_TOL

    def __post_init__(self):
        if int(self.n_cut) != self.n_cut or self.n_cut < 0:
            raise ValueError(f"n_cut must be a non-negative integer, got {self.n_cut!r}")
        if not 0 < self.tail_tol < 1:
            raise ValueError(f"tail_tol must lie in (0, 1), got {self.tail_tol!r}")
        object.__setattr__(self, "n_cut", int(self.n_cut))

    @classmethod
    def for_mean(cls, mu, tail_tol=TAIL_TOL):
        """Default cutoff ``ceil(mu + 12 sqrt(mu) + 25)`` for a Poisson mean ``mu``."""
        if mu < 0:
            raise ValueError(f"Poisson mean must be non-negative, got {mu!r}")
        return cls(int(ceil(mu + 12.0 * sqrt(mu) + 25.0)), tail_tol)

    def tail_mass(self, mu):
        """``P(n > n_cut)`` for a Poisson distribution of mean ``mu``."""
        if mu == 0:
            return 0.0
        return float(np.exp(poisson.logsf(self.n_cut, mu)))

    def check(self, mu):
        """Raise ``TailToleranceError`` when the tail beyond ``n_cut`` is too heavy."""
        if mu == 0:
            return
        if poisson.logsf(self.n_cut, mu) >= log(self.tail_tol):
            raise TailToleranceError(
                f"Poisson({mu:.6g}) tail beyond n_cut={self.n_cut} is "
                f"{self.tail_mass(mu):.3e}, above tail_tol={self.tail_tol:.1e}"
            )


def _resolve_trunc(trunc, mu):
    if trunc is None:
        trunc = TruncationSpec.for_mean(mu)
    trunc.check(mu)
    return trunc


def aliasing_margin(lam):
    """Per-mode Fourier margin ``ceil(10 sqrt(lam) + 20)``."""
    return int(ceil(10.0 * sqrt(lam) + 20.0))


def min_nodes(S, M, lam):
    """Smallest ``N_x`` allowed by the aliasing rule ``N_x >= S + M * margin``."""
    return int(S) + int(M) * aliasing_margin(lam)


@dataclass(frozen=True)
class XGrid:
    """Nodes ``x_k = k / N_x`` on ``[0, 1)``."""

    N_x: int

    def __post_init__(self):
        if int(self.N_x) != self.N_x or self.N_x < 2:
            raise ValueError(f"N_x must be an integer >= 2, got {self.N_x!r}")
        object.__setattr__(self, "N_x", int(self.N_x))

    @property
    def nodes(self):
        return np.arange(self.N_x, dtype=np.float64) / self.N_x

    @classmethod
    def minimal(cls, S, M, lam):
        """Smallest power of two satisfying the aliasing rule."""
        need = min_nodes(S, M, lam)
        n = 2
        while n < need:
            n *= 2
        return cls(n)

    def check_aliasing(self, S, M, lam):
        need = min_nodes(S, M, lam)
        if self.N_x < need:
            raise AliasingError(
                f"N_x={self.N_x} is below the aliasing bound {need} "
                f"(S={S}, M={M}, lambda={lam:.6g})"
            )


def _kerr_series(logmag, arg, logpref, theta, n_cut):
    logmag, arg, logpref, theta = np.broadcast_arrays(
        np.asarray(logmag, dtype=np.float64),
        np.asarray(arg, dtype=np.float64),
        np.asarray(logpref, dtype=np.float64),
        np.asarray(theta, dtype=np.float64),
    )
    shape = logmag.shape
    flat = [np.ascontiguousarray(a.reshape(-1)) for a in (logmag, arg, logpref, theta)]
    return kernels.kerr_series(*flat, int(n_cut)).reshape(shape)


def _safe_log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def survival_mmgs(state, theta, trunc=None):
    """Survival amplitude ``<alpha| e^{-iH t} |alpha>`` of a Glauber state.

    Each mode contributes ``e^{-|a|^2} sum_n |a|^{2n}/n! e^{-i n (n-1) theta / 2}``.
    """
    th, scalar = as_theta(theta)
    pops, counts = np.unique(np.abs(state.alpha) ** 2, return_counts=True)
    trunc = _resolve_trunc(trunc, float(pops.max()))
    out = np.ones(th.shape, dtype=np.complex128)
    for p, m in zip(pops, counts):
        f = _kerr_series(_safe_log(p), 0.0, -p, th, trunc.n_cut)
        out = out * int_power(f, int(m))
    return restore(out, scalar)


def cross_corr_single(beta, alpha, theta, trunc=None):
    """Single-site cross correlation ``<beta| e^{-iH t} |alpha>``.

    ``e^{-(|a|^2 + |b|^2)/2} sum_n (a conj(b))^n / n! e^{-i n (n-1) theta / 2}``.
    Broadcasts over ``beta``, ``alpha`` and ``theta``. The truncation is
    checked against a Poisson tail of mean ``max |a b|``.
    """
    beta = np.asarray(beta, dtype=np.complex128)
    alpha = np.asarray(alpha, dtype=np.complex128)
    z = alpha * np.conj(beta)
    trunc = _resolve_trunc(trunc, float(np.max(np.abs(z))) if z.size else 0.0)
    logpref = -0.5 * (np.abs(alpha) ** 2 + np.abs(beta) ** 2)
    out = _kerr_series(_safe_log(np.abs(z)), np.angle(z), logpref, theta, trunc.n_cut)
    return out[()] if out.ndim == 0 else out


def G_of_x(x, theta, lam, M, trunc=None):
    """``G(x, theta) = [sum_n Poi(lam)(n) e^{-i n (n-1) theta/2 + 2 pi i x n}]^M``.

    Broadcasts over ``x`` and ``theta``.
    """
    if lam < 0:
        raise ValueError(f"filling factor must be non-negative, got {lam!r}")
    trunc = _resolve_trunc(trunc, lam)
    x = np.asarray(x, dtype=np.float64)
    f = _kerr_series(_safe_log(lam), 2.0 * pi * x, -lam, theta, trunc.n_cut)
    out = int_power(f, int(M))
    return out[()] if out.ndim == 0 else out


def _fourier_coefficient(values, S, grid):
    # (1/N_x) sum_k e^{-2 pi i x_k S} values[..., k]; np.sum is pairwise
    k = np.arange(grid.N_x)
    kernel = np.exp(-2j * pi * ((k * int(S)) % grid.N_x) / grid.N_x)
    prod = values * kernel
    return (np.sum(prod.real, axis=-1) + 1j * np.sum(prod.imag, axis=-1)) / grid.N_x


def fourier_autocorr_stirling(S, M, theta, grid, trunc=None):
    """Stirling-form estimate ``sqrt(2 pi S) * [S-th Fourier coefficient of G]``.

    Approximates the GCS amplitude (Kerr phase convention) of the
    homogeneous state with ``lam = S / M``; the ratio to the exact value is
    ``sqrt(2 pi S) e^-S S^S / S!`` at every ``theta``.
    """
    if int(S) != S or S < 1:
        raise ValueError(f"S must be a positive integer, got {S!r}")
    lam = S / M
    grid.check_aliasing(S, M, lam)
    th, scalar = as_theta(theta)
    x = grid.nodes
    vals = G_of_x(x[None, :], th[:, None], lam, M, trunc)
    out = sqrt(2.0 * pi * S) * _fourier_coefficient(vals, S, grid)
    return restore(out, scalar)


class DeepLatticeProvider:
    """Closed-form ``<alpha e^{-2 pi i x}| e^{-iH t} |alpha>`` for the Kerr lattice."""

    def __init__(self, state, trunc=None):
        self.state = state
        mags = np.abs(state.alpha) ** 2
        self.trunc = _resolve_trunc(trunc, float(mags.max()))
        vals, counts = np.unique(state.alpha, return_counts=True)
        self.groups = list(zip(vals.tolist(), counts.tolist()))

    def __call__(self, x, theta):
        x = np.asarray(x, dtype=np.float64)
        out = None
        for a, m in self.groups:
            beta = a * np.exp(-2j * pi * x)
            f = cross_corr_single(beta, a, theta, self.trunc)
            f = int_power(f, int(m))
            out = f if out is None else out * f
        return out


def fourier_autocorr_exact(S, state, cross_corr_provider, grid, theta):
    """GCS amplitude from the exact projection of a Glauber cross correlation.

    ``e^{N} S! / N^S * (1/N_x) sum_k e^{-2 pi i x_k S} provider(x_k, theta)``
    with ``N = state.ntilde``, prefactor in log space. Valid for any
    number-conserving Hamiltonian; the result is the amplitude of the GCS
    ``gcs_from_mmgs(state, S)`` in the Hamiltonian's own phase convention.

    Parameters
    ----------
    cross_corr_provider : callable
        ``provider(x, theta)`` broadcasting over ``x`` and ``theta``.
    grid : XGrid
    """
    if int(S) != S or S < 0:
        raise ValueError(f"S must be a non-negative integer, got {S!r}")
    if state.ntilde == 0:
        raise ValueError("the vacuum Glauber state has no S-particle component")
    lam = float(np.max(np.abs(state.alpha) ** 2))
    grid.check_aliasing(S, state.M, lam)
    th, scalar = as_theta(theta)
    vals = np.asarray(cross_corr_provider(grid.nodes[None, :], th[:, None]))
    vals = np.broadcast_to(vals, (th.size, grid.N_x))
    N = state.ntilde
    logpref = N + lgamma(S + 1) - S * log(N)
    out = np.exp(logpref) * _fourier_coefficient(vals, S, grid)
    return restore(out, scalar)


def F_integrand_profile(S, lam, M, theta, grid, trunc=None):
    """Integrand ``F(x) = e^{-2 pi i x S} G(x, theta)`` tabulated on the x nodes.

    Returns a ``ComplexSeries`` over ``x``; its mean is the Fourier
    coefficient used by ``fourier_autocorr_stirling``.
    """
    x = grid.nodes
    vals = G_of_x(x, float(theta), lam, M, trunc)
    k = np.arange(grid.N_x)
    F = vals * np.exp(-2j * pi * ((k * int(S)) % grid.N_x) / grid.N_x)
    return ComplexSeries(x, F, unit="x")


def profile_cancellation(series):
    """``(|mean F|, mean |F|)`` for an integrand profile."""
    F = series.values
    return float(abs(np.mean(F))), float(np.mean(np.abs(F)))
