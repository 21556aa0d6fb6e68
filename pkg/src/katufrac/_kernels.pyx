# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled product-integration kernels (see _kernels_py.py for the reference)."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport pow, log, expm1, fmin, fmax

cnp.import_array()

cdef enum:
    NTERMS = 20
cdef double SERIES_CUT = 0.125
cdef double TINY = 1e-300


cdef inline void _coefficients(double alpha, double* cl, double* cr) noexcept nogil:
    cdef double c = 1.0
    cdef int m
    for m in range(NTERMS):
        cl[m] = c / ((m + 1.0) * (m + 2.0))
        cr[m] = c / (m + 2.0)
        c = c * (m + 1.0 - alpha) / (m + 1.0)


cdef inline void _moments(double A, double B, double D, double alpha,
                          const double* cl, const double* cr,
                          double* left, double* right) noexcept nogil:
    cdef double x, scale, pl, pr, r, E, denom
    cdef int m
    if A < TINY:
        left[0] = 0.0
        right[0] = 0.0
        return
    x = fmin(D / A, 1.0)
    scale = pow(A, alpha)
    if x < SERIES_CUT:
        pl = 0.0
        pr = 0.0
        for m in range(NTERMS - 1, -1, -1):
            pl = pl * x + cl[m]
            pr = pr * x + cr[m]
        left[0] = scale * x * pl
        right[0] = scale * x * pr
    else:
        r = fmax(B, 0.0) / A
        if r > 0.0:
            E = expm1(alpha * log(r))
        else:
            E = -1.0
        denom = alpha * (alpha + 1.0)
        left[0] = scale / x * (alpha * x + r * E) / denom
        right[0] = scale / x * (-E * (1.0 + alpha * x) - alpha * x) / denom


cdef void _row(const double[::1] u, Py_ssize_t j, double alpha,
               const double* cl, const double* cr, double* w) noexcept nogil:
    cdef Py_ssize_t i
    cdef double lw, rw, target = u[j]
    for i in range(j + 1):
        w[i] = 0.0
    for i in range(j):
        _moments(target - u[i], target - u[i + 1], u[i + 1] - u[i], alpha, cl, cr, &lw, &rw)
        w[i] += lw
        w[i + 1] += rw


def weight_row(u, Py_ssize_t j, double alpha):
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef double cl[NTERMS]
    cdef double cr[NTERMS]
    out = np.zeros(j + 1)
    cdef double[::1] ov = out
    if j == 0:
        return out
    _coefficients(alpha, cl, cr)
    _row(uv, j, alpha, cl, cr, &ov[0])
    return out


def weight_matrix(u, double alpha, int num_threads=1):
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n1 = uv.shape[0]
    cdef Py_ssize_t j
    cdef double cl[NTERMS]
    cdef double cr[NTERMS]
    W = np.zeros((n1, n1))
    cdef double[:, ::1] Wv = W
    _coefficients(alpha, cl, cr)
    for j in prange(1, n1, nogil=True, schedule="dynamic", num_threads=num_threads):
        _row(uv, j, alpha, cl, cr, &Wv[j, 0])
    return W


def integrate_all(u, values, double alpha, int num_threads=1):
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[::1] hv = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n1 = uv.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc, lw, rw, target
    cdef double cl[NTERMS]
    cdef double cr[NTERMS]
    out = np.zeros(n1)
    cdef double[::1] ov = out
    _coefficients(alpha, cl, cr)
    for j in prange(1, n1, nogil=True, schedule="dynamic", num_threads=num_threads):
        target = uv[j]
        acc = 0.0
        for i in range(j):
            _moments(target - uv[i], target - uv[i + 1], uv[i + 1] - uv[i],
                     alpha, cl, cr, &lw, &rw)
            acc = acc + lw * hv[i] + rw * hv[i + 1]
        ov[j] = acc
    return out
