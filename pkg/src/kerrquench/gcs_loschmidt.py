"""Loschmidt amplitude of a generalized coherent state under the Kerr lattice.

The amplitude is the restricted multinomial sum

    A(theta) = S! sum_{n_1+...+n_M = S} prod_i |xi_i|^{2 n_i} / n_i! * exp(-i q(n_i) theta / 2)

with ``q(n) = n**2`` (``phase="n2"``, the default) or ``q(n) = n (n - 1)``
(``phase="kerr"``, the spectrum of ``(U/2) sum n (n - 1)``). The two differ by
the global factor ``exp(i S theta / 2)`` and have the same modulus.

Three evaluators are provided:

* ``autocorr_enumerated`` walks every occupation vector (small sectors only);
* ``autocorr_genfun`` reads the sum off as ``[x^S]`` of a product of per-mode
  polynomials, using Poisson-rescaled coefficients so nothing overflows;
* ``autocorr_highprec`` is the same generating function in mpmath, used to
  repair double-precision points where ``|A|`` is far below rounding noise.
"""

from dataclasses import dataclass, field
from math import lgamma, log

import mpmath
import numpy as np
from scipy.special import gammaln

from . import kernels
from ._numeric import as_theta, restore
from .errors import DimensionGuardError
from .states import hilbert_dim

ENUMERATION_GUARD = 2_000_000
SATURATION_FLOOR = 1e-300
FFT_THRESHOLD = 64
_THETA_CHUNK = 512
PHASES = ("n2", "kerr")


def _phase_exponents(n, phase):
    if phase == "n2":
        return n * n
    if phase == "kerr":
        return n * (n - 1)
    raise ValueError(f"phase must be one of {PHASES}, got {phase!r}")


# ---------------------------------------------------------------------------
# scaled polynomials and their products


@dataclass
class ScaledPolynomial:
    """Polynomial ``exp(log_scale) * sum_k coeffs[k] x^k``.

    ``renormalize`` moves the largest coefficient magnitude into
    ``log_scale`` so the stored coefficients stay of order one.
    """

    coeffs: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        self.coeffs = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if self.coeffs.size == 0:
            raise ValueError("a polynomial needs at least one coefficient")
        self.log_scale = float(self.log_scale)

    @property
    def degree(self):
        return self.coeffs.size - 1

    def renormalize(self):
        peak = float(np.max(np.abs(self.coeffs)))
        if peak > 0.0 and np.isfinite(peak):
            self.coeffs = self.coeffs / peak
            self.log_scale += log(peak)
        return self

    def coefficient(self, k):
        """Unscaled coefficient of ``x^k`` (0 beyond the stored degree)."""
        if k < 0 or k > self.degree:
            return 0j
        return complex(self.coeffs[k] * np.exp(self.log_scale))

    def to_array(self):
        return self.coeffs * np.exp(self.log_scale)


def _fft_len(n):
    size = 1
    while size < n:
        size *= 2
    return size


def _conv_fft(a, b, dmax):
    n = _fft_len(a.shape[1] + b.shape[1] - 1)
    fa = np.fft.fft(a, n, axis=1)
    fb = fa if b is a else np.fft.fft(b, n, axis=1)
    return np.fft.ifft(fa * fb, axis=1)[:, : dmax + 1]


def _conv_batch(a, b, dmax, backend):
    """Row-wise truncated product of two (B, L) coefficient batches."""
    if backend == "auto":
        backend = "fft" if min(a.shape[1], b.shape[1]) > FFT_THRESHOLD else "direct"
    if backend == "direct":
        out = kernels.convolve_direct(np.ascontiguousarray(a), np.ascontiguousarray(b), dmax)
    elif backend == "fft":
        out = _conv_fft(a, b, dmax)
    else:
        raise ValueError(f"unknown convolution backend {backend!r}")
    width = dmax + 1
    if out.shape[1] < width:
        out = np.pad(out, ((0, 0), (0, width - out.shape[1])))
    return out


def _renorm_rows(c, logs):
    peak = np.max(np.abs(c), axis=1)
    ok = (peak > 0.0) & np.isfinite(peak)
    peak = np.where(ok, peak, 1.0)
    return c / peak[:, None], logs + np.log(peak)


def _mul_rows(a, la, b, lb, dmax, backend):
    c = _conv_batch(a, b, dmax, backend)
    return _renorm_rows(c, la + lb)


def _power_rows(base, logs, m, dmax, backend):
    """Binary exponentiation of a batch of scaled polynomials."""
    base = base[:, : dmax + 1]
    res, res_log = None, None
    sq, sq_log = base, logs
    while m:
        if m & 1:
            if res is None:
                res, res_log = sq, sq_log
            else:
                res, res_log = _mul_rows(res, res_log, sq, sq_log, dmax, backend)
        m >>= 1
        if m:
            sq, sq_log = _mul_rows(sq, sq_log, sq, sq_log, dmax, backend)
    return res, res_log


def convolve(a, b, D_max, backend="auto"):
    """Truncated product ``a * b`` up to degree ``D_max``.

    ``backend`` is ``"direct"`` (O(D^2), compiled when available), ``"fft"``
    (O(D log D), length the next power of two covering the full product) or
    ``"auto"`` (FFT once both factors are longer than 64 coefficients).
    """
    c, logs = _mul_rows(
        a.coeffs[None, :], np.array([a.log_scale]), b.coeffs[None, :], np.array([b.log_scale]),
        int(D_max), backend,
    )
    return ScaledPolynomial(c[0], float(logs[0]))


def power_product(f, M, D_max, backend="auto"):
    """``f**M`` truncated at degree ``D_max`` by binary exponentiation."""
    if int(M) != M or M < 1:
        raise ValueError(f"exponent must be a positive integer, got {M!r}")
    c, logs = _power_rows(f.coeffs[None, :], np.array([f.log_scale]), int(M), int(D_max), backend)
    if c.shape[1] < D_max + 1:
        c = np.pad(c, ((0, 0), (0, D_max + 1 - c.shape[1])))
    return ScaledPolynomial(c[0], float(logs[0]))


def _log_weights(mu, D):
    k = np.arange(D + 1, dtype=np.float64)
    if mu == 0.0:
        out = np.full(D + 1, -np.inf)
        out[0] = 0.0
        return out
    return k * log(mu) - mu - gammaln(k + 1.0)


def poisson_polynomial(mu, D, theta=0.0, phase="n2"):
    """Per-mode factor ``sum_k e^-mu mu^k / k! exp(-i q(k) theta / 2) x^k`` to degree ``D``."""
    if mu < 0:
        raise ValueError(f"Poisson mean must be non-negative, got {mu!r}")
    k = np.arange(D + 1, dtype=np.float64)
    coeffs = np.exp(_log_weights(mu, D)) * np.exp(-0.5j * theta * _phase_exponents(k, phase))
    return ScaledPolynomial(coeffs).renormalize()


# ---------------------------------------------------------------------------
# amplitude evaluators


def _mode_groups(state):
    """Distinct nonzero populations and their multiplicities."""
    pop = state.populations
    pop = pop[pop > 0.0]
    values, counts = np.unique(pop, return_counts=True)
    return list(zip(values.tolist(), counts.tolist()))


def _log_prefactor(S):
    # S! e^S / S^S; about sqrt(2 pi S)
    return lgamma(S + 1) + S - S * log(S)


def _genfun_rows(groups, S, theta, phase, backend):
    k = np.arange(S + 1, dtype=np.float64)
    q = _phase_exponents(k, phase)
    phase_rows = np.exp(-0.5j * np.outer(theta, q))
    total, total_log = None, None
    for p, m in groups:
        w = np.exp(_log_weights(S * p, S))
        base = phase_rows * w[None, :]
        base, logs = _renorm_rows(base, np.zeros(theta.size))
        part, part_log = _power_rows(base, logs, m, S, backend)
        if total is None:
            total, total_log = part, part_log
        else:
            total, total_log = _mul_rows(total, total_log, part, part_log, S, backend)
    if total.shape[1] < S + 1:
        return np.zeros(theta.size, dtype=np.complex128)
    return total[:, S] * np.exp(total_log + _log_prefactor(S))


def autocorr_genfun(state, theta, phase="n2", backend="auto"):
    """Loschmidt amplitude from the generating function ``[x^S] prod_i f_i(x)``.

    Parameters
    ----------
    state : GcsState
    theta : float or array_like
        Dimensionless time ``U t``.
    phase : {"n2", "kerr"}
        Phase convention, see the module docstring.
    backend : {"auto", "direct", "fft"}
        Convolution backend.

    Returns
    -------
    complex or ndarray of complex
    """
    th, scalar = as_theta(theta)
    _phase_exponents(0, phase)
    S = state.S
    if S == 0:
        return restore(np.ones(th.shape, dtype=np.complex128), scalar)
    groups = _mode_groups(state)
    out = np.empty(th.shape, dtype=np.complex128)
    for start in range(0, th.size, _THETA_CHUNK):
        sl = slice(start, start + _THETA_CHUNK)
        out[sl] = _genfun_rows(groups, S, th[sl], phase, backend)
    return restore(out, scalar)


def autocorr_enumerated(state, theta, phase="n2", guard=ENUMERATION_GUARD):
    """Loschmidt amplitude by explicit enumeration of all occupation vectors.

    Raises ``DimensionGuardError`` when ``hilbert_dim(S, M)`` exceeds ``guard``;
    ``autocorr_genfun`` has no such limit.
    """
    th, scalar = as_theta(theta)
    dim = hilbert_dim(state.S, state.M, limit=None)
    if dim > guard:
        raise DimensionGuardError(
            f"sector dimension {dim} exceeds the enumeration guard {guard}; "
            "use autocorr_genfun instead"
        )
    S = state.S
    pop = state.populations
    pop = pop[pop > 0.0]
    n = np.arange(S + 1, dtype=np.float64)
    logp = n[None, :] * np.log(pop)[:, None] - gammaln(n + 1.0)[None, :]
    q = _phase_exponents(np.arange(S + 1, dtype=np.int64), phase)
    out = kernels.composition_autocorr(logp, q, th, lgamma(S + 1))
    return restore(np.asarray(out, dtype=np.complex128), scalar)


def _mp_power(poly, m, S, mul):
    res, sq = None, poly
    while m:
        if m & 1:
            res = sq if res is None else mul(res, sq)
        m >>= 1
        if m:
            sq = mul(sq, sq)
    return res


def _mp_genfun(groups, S, theta, phase, dps):
    with mpmath.workdps(dps):
        th = mpmath.mpf(theta)

        def mul(a, b):
            return [mpmath.fdot(a[: d + 1], b[d::-1]) for d in range(S + 1)]

        phases = [mpmath.expj(-th * int(_phase_exponents(k, phase)) / 2) for k in range(S + 1)]
        total = None
        for p, m in groups:
            mu = S * mpmath.mpf(p)
            w = [mpmath.exp(-mu)]
            for k in range(1, S + 1):
                w.append(w[-1] * mu / k)
            part = _mp_power([w[k] * phases[k] for k in range(S + 1)], m, S, mul)
            total = part if total is None else mul(total, part)
        pref = mpmath.factorial(S) * mpmath.exp(S) / mpmath.mpf(S) ** S
        return pref * total[S]


def autocorr_highprec(state, theta, phase="n2", dps=30, max_dps=400, rtol=1e-13):
    """Generating-function amplitude in arbitrary precision (scalar ``theta``).

    The working precision is raised in steps until two evaluations agree to
    ``rtol``, or the amplitude is resolved below ``1e-160`` in absolute terms
    (far under the free-energy saturation floor).
    """
    _phase_exponents(0, phase)
    S = state.S
    if S == 0:
        return 1.0 + 0j
    groups = _mode_groups(state)
    prev = _mp_genfun(groups, S, float(theta), phase, dps)
    while True:
        step = max(15, dps // 2)
        dps += step
        cur = _mp_genfun(groups, S, float(theta), phase, dps)
        diff = abs(cur - prev)
        if diff <= rtol * abs(cur) or (abs(cur) < 1e-160 and diff < 1e-160) or dps >= max_dps:
            return complex(cur)
        prev = cur


# ---------------------------------------------------------------------------
# dynamical free energy


def free_energy(A, M):
    """Dynamical free-energy density ``L = -(1/M) log |A|^2``.

    Returns
    -------
    (L, saturated)
        ``|A|^2`` is clamped at 1e-300; ``saturated`` flags clamped entries
        (exact or numerically indistinguishable zeros of the amplitude).
    """
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M!r}")
    a2 = np.abs(np.asarray(A)) ** 2
    saturated = a2 < SATURATION_FLOOR
    L = -np.log(np.maximum(a2, SATURATION_FLOOR)) / M
    if np.ndim(L) == 0:
        return float(L), bool(saturated)
    return L, saturated


def find_peaks(theta, L):
    """Three-point local maxima of a sampled curve, refined by a parabola.

    A point counts when it is strictly above its left neighbour and not below
    its right neighbour, so a two-sample plateau is reported once. Grid end
    points are never peaks. Returns a list of ``(theta, L)`` pairs.
    """
    theta = np.asarray(theta, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    peaks = []
    if L.size < 3:
        return peaks
    left, mid, right = L[:-2], L[1:-1], L[2:]
    idx = np.nonzero((mid > left) & (mid >= right))[0] + 1
    for k in idx:
        y0, y1, y2 = L[k - 1], L[k], L[k + 1]
        denom = y0 - 2.0 * y1 + y2
        h = theta[k + 1] - theta[k]
        if denom < 0.0:
            delta = 0.5 * (y0 - y2) / denom
            peaks.append((float(theta[k] + delta * h), float(y1 - 0.25 * (y0 - y2) * delta)))
        else:
            peaks.append((float(theta[k]), float(y1)))
    return peaks


@dataclass
class FreeEnergyCurve:
    """Sampled free-energy density with its local maxima."""

    theta: np.ndarray
    L: np.ndarray
    amplitude: np.ndarray
    saturated: np.ndarray
    refined: np.ndarray
    peaks: list = field(default_factory=list)

    def peaks_in(self, lo, hi):
        """Peaks with ``lo < theta < hi``, largest ``L`` first."""
        sel = [p for p in self.peaks if lo < p[0] < hi]
        return sorted(sel, key=lambda p: -p[1])


def free_energy_curve(state, grid, phase="n2", refine=True, rtol=1e-9, jobs=1):
    """Free-energy density on a time grid, with peak detection.

    The amplitude is evaluated with both convolution backends. Points where
    they disagree by more than ``rtol`` (relative) are below double-precision
    resolution and, when ``refine`` is set, are recomputed with
    ``autocorr_highprec``.

    Parameters
    ----------
    state : GcsState
    grid : TimeGrid or array_like
    jobs : int
        Worker threads for the double-precision pass; results do not depend
        on it since every time point is computed independently.
    """
    theta = np.asarray(getattr(grid, "values", grid), dtype=np.float64).reshape(-1)
    if jobs > 1 and theta.size > _THETA_CHUNK:
        from concurrent.futures import ThreadPoolExecutor

        chunks = [theta[i : i + _THETA_CHUNK] for i in range(0, theta.size, _THETA_CHUNK)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            direct = np.concatenate(list(pool.map(
                lambda c: autocorr_genfun(state, c, phase, backend="direct"), chunks)))
            fft = np.concatenate(list(pool.map(
                lambda c: autocorr_genfun(state, c, phase, backend="fft"), chunks)))
    else:
        direct = autocorr_genfun(state, theta, phase, backend="direct")
        fft = autocorr_genfun(state, theta, phase, backend="fft")
    amp = direct.copy()
    scale = np.maximum(np.abs(direct), np.abs(fft))
    with np.errstate(invalid="ignore", divide="ignore"):
        bad = np.abs(direct - fft) > rtol * scale
    refined = np.zeros(theta.size, dtype=bool)
    if refine:
        for k in np.nonzero(bad)[0]:
            amp[k] = autocorr_highprec(state, theta[k], phase)
            refined[k] = True
    L, sat = free_energy(amp, state.M)
    L = np.atleast_1d(L)
    sat = np.atleast_1d(sat)
    return FreeEnergyCurve(theta, L, amp, sat, refined, find_peaks(theta, L))
