# cython: language_level=3
"""Compiled hot kernels; see ``_fallback.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, lgamma, isinf

cnp.import_array()

cdef long long HIST_LIMIT = 10000000


def convolve_direct(const double complex[:, ::1] a, const double complex[:, ::1] b, Py_ssize_t dmax):
    cdef Py_ssize_t nb = a.shape[0], la = a.shape[1], lb = b.shape[1]
    out = np.zeros((nb, dmax + 1), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t r, n, i, lo, hi
    cdef double complex acc
    with nogil:
        for r in range(nb):
            for n in range(dmax + 1):
                lo = n - lb + 1
                if lo < 0:
                    lo = 0
                hi = n
                if hi > la - 1:
                    hi = la - 1
                acc = 0
                for i in range(lo, hi + 1):
                    acc = acc + a[r, i] * b[r, n - i]
                o[r, n] = acc
    return out


def kerr_series(const double[::1] logmag, const double[::1] arg, const double[::1] logpref,
                const double[::1] theta, Py_ssize_t n_cut):
    cdef Py_ssize_t ne = logmag.shape[0], e, n
    out = np.empty(ne, dtype=np.complex128)
    cdef double complex[::1] o = out
    lg = np.empty(n_cut + 1)
    cdef double[::1] lgam = lg
    for n in range(n_cut + 1):
        lgam[n] = lgamma(n + 1.0)
    cdef double re, im, lt, ph, mag, lm, qhalf
    with nogil:
        for e in range(ne):
            lm = logmag[e]
            re = exp(logpref[e])
            im = 0.0
            if not (isinf(lm) and lm < 0):
                for n in range(1, n_cut + 1):
                    lt = logpref[e] + n * lm - lgam[n]
                    if lt < -745.0:
                        continue
                    mag = exp(lt)
                    qhalf = n * (n - 1.0) / 2.0
                    ph = n * arg[e] - qhalf * theta[e]
                    re += mag * cos(ph)
                    im += mag * sin(ph)
            o[e] = re + 1j * im
    return out


def composition_autocorr(logp_in, q_in, theta_in, double log_norm):
    cdef double[:, ::1] logp = np.ascontiguousarray(logp_in, dtype=np.float64)
    cdef long long[::1] q = np.ascontiguousarray(q_in, dtype=np.int64)
    theta_arr = np.atleast_1d(np.asarray(theta_in, dtype=np.float64))
    cdef Py_ssize_t M = logp.shape[0], S = logp.shape[1] - 1
    cdef long long emax = S * np.max(q_in) if S > 0 else 0
    nvec = np.zeros(M, dtype=np.int64)
    pref_w = np.zeros(M + 1)
    pref_e = np.zeros(M + 1, dtype=np.int64)
    zsuf = np.zeros(M + 1)
    qsuf = np.zeros(M + 1, dtype=np.int64)
    cdef long long[::1] nv = nvec
    cdef double[::1] pw = pref_w
    cdef long long[::1] pe = pref_e
    cdef double[::1] zs = zsuf
    cdef long long[::1] qs = qsuf
    cdef Py_ssize_t i, k, t
    for i in range(M - 1, -1, -1):
        zs[i] = zs[i + 1] + logp[i, 0]
        qs[i] = qs[i + 1] + q[0]
    cdef bint use_hist = emax < HIST_LIMIT
    hist_arr = np.zeros(emax + 1 if use_hist else 1)
    cdef double[::1] hist = hist_arr
    cdef double[::1] th = theta_arr
    cdef Py_ssize_t nt = th.shape[0]
    acc_arr = np.zeros(nt, dtype=np.complex128)
    cdef double complex[::1] acc = acc_arr
    cdef double w, ang
    cdef long long E, tail

    # first composition (S, 0, ..., 0)
    nv[0] = S
    pw[1] = logp[0, S]
    pe[1] = q[S]
    for i in range(1, M):
        pw[i + 1] = pw[i] + logp[i, 0]
        pe[i + 1] = pe[i] + q[0]
    with nogil:
        while True:
            w = exp(log_norm + pw[M])
            E = pe[M]
            if use_hist:
                hist[E] += w
            else:
                for t in range(nt):
                    ang = -0.5 * th[t] * E
                    acc[t] = acc[t] + w * (cos(ang) + 1j * sin(ang))
            if M == 1:
                break
            # advance in reverse-lexicographic order
            tail = nv[M - 1]
            nv[M - 1] = 0
            k = M - 2
            while k >= 0 and nv[k] == 0:
                k -= 1
            if k < 0:
                break
            nv[k] -= 1
            nv[k + 1] = tail + 1
            pw[k + 1] = pw[k] + logp[k, nv[k]]
            pe[k + 1] = pe[k] + q[nv[k]]
            pw[k + 2] = pw[k + 1] + logp[k + 1, nv[k + 1]]
            pe[k + 2] = pe[k + 1] + q[nv[k + 1]]
            # positions beyond k+1 are zero; close the sums with the suffix tables
            pw[M] = pw[k + 2] + zs[k + 2]
            pe[M] = pe[k + 2] + qs[k + 2]
    if use_hist:
        nz = np.nonzero(hist_arr)[0]
        return np.exp(-0.5j * np.outer(theta_arr, nz.astype(np.float64))) @ hist_arr[nz]
    return acc_arr
