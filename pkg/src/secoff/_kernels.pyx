# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the per-subcarrier dual subproblems and the per-user
power response. Mirrors ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log1p, fmin

cnp.import_array()

cdef double LN2 = 0.6931471805599453


cdef inline double _power(double lam, double h, double g, double alpha, double B) noexcept nogil:
    cdef double d = h - g
    cdef double c, x, p
    if d <= 0.0:
        return 0.0
    c = lam * B / (LN2 * alpha)
    if g == 0.0:
        p = c - 1.0 / h
    else:
        x = c * d
        p = 2.0 * (x - 1.0) / (sqrt(d * d + 4.0 * h * g * x) + h + g)
    return p if p > 0.0 else 0.0


def dual_eval_core(const double[::1] lam, const double[:, ::1] h, const double[:, ::1] g,
                   const double[::1] alpha, const double[::1] lcoef, const double[::1] lmax,
                   const double[::1] L, double B, double T):
    cdef Py_ssize_t K = h.shape[0], N = h.shape[1]
    cdef Py_ssize_t k, n, win
    cdef double value = 0.0, p, bits, psi, best, bestp, bestbits, lk
    l_arr = np.empty(K)
    owner_arr = np.empty(N, dtype=np.intp)
    pwin_arr = np.empty(N)
    off_arr = np.zeros(K)
    cdef double[::1] l = l_arr
    cdef Py_ssize_t[::1] owner = owner_arr
    cdef double[::1] pwin = pwin_arr
    cdef double[::1] off = off_arr

    with nogil:
        for k in range(K):
            if lam[k] > 0.0:
                lk = fmin(sqrt(lam[k] / (3.0 * alpha[k] * lcoef[k])), lmax[k])
            else:
                lk = 0.0
            l[k] = lk
            value += alpha[k] * lcoef[k] * lk * lk * lk - lam[k] * lk
        for n in range(N):
            win = 0
            best = 0.0
            bestp = 0.0
            bestbits = 0.0
            for k in range(K):
                p = _power(lam[k], h[k, n], g[k, n], alpha[k], B)
                if p > 0.0:
                    bits = B * (log1p(h[k, n] * p) - log1p(g[k, n] * p)) / LN2
                else:
                    bits = 0.0
                psi = alpha[k] * p * T - lam[k] * T * bits
                if k == 0 or psi < best:
                    best = psi
                    win = k
                    bestp = p
                    bestbits = bits
            owner[n] = win
            pwin[n] = bestp
            off[win] += T * bestbits
            value += best
        for k in range(K):
            value += lam[k] * L[k]
    return value, l_arr, owner_arr, pwin_arr, off_arr


def user_response_core(double mu, h_in, g_in, double alpha, double B):
    cdef const double[::1] h = np.ascontiguousarray(h_in, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(g_in, dtype=np.float64)
    cdef Py_ssize_t M = h.shape[0], n
    cdef double rate = 0.0, p
    p_arr = np.empty(M)
    cdef double[::1] pw = p_arr
    with nogil:
        for n in range(M):
            p = _power(mu, h[n], g[n], alpha, B)
            pw[n] = p
            if p > 0.0:
                rate += log1p(h[n] * p) - log1p(g[n] * p)
    return B * rate / LN2, p_arr
