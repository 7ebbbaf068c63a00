"""Pure numpy implementations of the hot kernels.

Semantics here are the reference for ``_speedups.pyx``; both modules expose
the same three functions with identical signatures.
"""

from itertools import combinations, islice

import numpy as np
from scipy.special import gammaln

_CHUNK = 4096
_HIST_LIMIT = 10_000_000


def convolve_direct(a, b, dmax):
    """Row-wise truncated product of two batches of complex polynomials.

    Parameters
    ----------
    a, b : ndarray of complex128, shape (B, La) and (B, Lb)
    dmax : int
        Highest degree kept.

    Returns
    -------
    ndarray of complex128, shape (B, dmax + 1)
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    nb, la = a.shape
    lb = b.shape[1]
    out = np.zeros((nb, dmax + 1), dtype=np.complex128)
    # loop over the shorter factor, accumulate shifted copies of the longer
    if la > lb:
        a, b, la, lb = b, a, lb, la
    for i in range(min(la, dmax + 1)):
        stop = min(lb, dmax + 1 - i)
        out[:, i:i + stop] += a[:, i:i + 1] * b[:, :stop]
    return out


def kerr_series(logmag, arg, logpref, theta, n_cut):
    """Truncated Kerr-evolved coherent-state sum, element-wise.

    Computes, for every element ``e``::

        sum_{n=0}^{n_cut} exp(logpref + n*logmag - lgamma(n+1))
                          * exp(1j*(n*arg - n*(n-1)/2 * theta))

    ``logmag`` may be ``-inf`` (z = 0); the n = 0 term is then ``exp(logpref)``.
    All four inputs are 1-D float64 arrays of equal length.
    """
    logmag = np.asarray(logmag, dtype=np.float64)
    arg = np.asarray(arg, dtype=np.float64)
    logpref = np.asarray(logpref, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    n = np.arange(n_cut + 1, dtype=np.float64)
    lgam = gammaln(n + 1.0)
    qhalf = n * (n - 1.0) / 2.0
    out = np.empty(logmag.shape[0], dtype=np.complex128)
    for start in range(0, logmag.shape[0], _CHUNK):
        sl = slice(start, start + _CHUNK)
        lm = logmag[sl, None]
        with np.errstate(invalid="ignore"):
            nlog = np.where(n[None, :] == 0.0, 0.0, n[None, :] * lm)
        logterm = logpref[sl, None] + nlog - lgam[None, :]
        phase = n[None, :] * arg[sl, None] - qhalf[None, :] * theta[sl, None]
        with np.errstate(under="ignore"):
            mag = np.exp(logterm)
        out[sl] = np.sum(mag * np.cos(phase), axis=1) + 1j * np.sum(mag * np.sin(phase), axis=1)
    return out


def _compositions(S, M):
    """Yield chunks of compositions of S into M parts (reverse-lexicographic)."""
    # stars and bars: bar positions in S + M - 1 slots; ascending bar tuples
    # map to reverse-lexicographic occupation vectors
    slots = S + M - 1
    it = combinations(range(slots), M - 1)
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            return
        bars = np.array(block, dtype=np.int64).reshape(len(block), M - 1)
        edges = np.concatenate(
            [np.full((len(block), 1), -1), bars, np.full((len(block), 1), slots)], axis=1
        )
        occ = np.diff(edges, axis=1) - 1
        yield occ[:, ::-1]


def composition_autocorr(logp, q, theta, log_norm):
    """Restricted multinomial sum over all compositions of S into M parts.

    Returns, for each theta,
    ``sum_n exp(log_norm + sum_i logp[i, n_i]) * exp(-0.5j * theta * sum_i q[n_i])``
    with ``sum_i n_i = S = logp.shape[1] - 1``. ``logp`` must be finite.
    """
    logp = np.ascontiguousarray(logp, dtype=np.float64)
    q = np.asarray(q, dtype=np.int64)
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    M, S1 = logp.shape
    S = S1 - 1
    emax = int(S * q.max()) if S > 0 else 0
    rows = np.arange(M)
    if M == 1:
        chunks = iter([np.array([[S]], dtype=np.int64)])
    else:
        chunks = _compositions(S, M)
    if emax < _HIST_LIMIT:
        hist = np.zeros(emax + 1)
        for occ in chunks:
            w = np.exp(log_norm + logp[rows[None, :], occ].sum(axis=1))
            e = q[occ].sum(axis=1)
            hist += np.bincount(e, weights=w, minlength=emax + 1)
        nz = np.nonzero(hist)[0]
        return np.exp(-0.5j * np.outer(theta, nz.astype(np.float64))) @ hist[nz]
    acc = np.zeros(theta.shape[0], dtype=np.complex128)
    for occ in chunks:
        w = np.exp(log_norm + logp[rows[None, :], occ].sum(axis=1))
        e = q[occ].sum(axis=1).astype(np.float64)
        acc += np.exp(-0.5j * np.outer(theta, e)) @ w
    return acc
