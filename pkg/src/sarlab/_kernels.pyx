# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels (see ``_kernels_py`` for the reference implementations)."""

import numpy as np
from libc.math cimport cos, erfc, log1p, log2, sin, sqrt
from libc.stdlib cimport malloc, free

cdef double INV_SQRT2 = 0.7071067811865476


cdef inline double _plogp(double p) nogil:
    if p > 0.0:
        return -p * log2(p)
    return 0.0


cdef void _accumulate_masses(double m, double scale, const double[::1] th,
                             double w, double* pmf) nogil:
    # pmf[i] += w * P(cell i) for N(m, 1/(2 scale^2)); Q = 0.5 erfc((T - m) scale)
    cdef Py_ssize_t i, nt = th.shape[0]
    cdef double q_prev = 1.0, q
    for i in range(nt):
        q = 0.5 * erfc((th[i] - m) * scale)
        pmf[i] += w * (q_prev - q)
        q_prev = q
    pmf[nt] += w * q_prev


cdef void _accumulate_point(double m, const double[::1] th, double w, double* pmf) nogil:
    cdef Py_ssize_t i = 0, nt = th.shape[0]
    while i < nt and th[i] < m:
        i += 1
    pmf[i] += w


def quantized_entropy_gaussian(centers, double sd, thresholds):
    cdef const double[::1] c = np.ascontiguousarray(centers, dtype=np.float64).ravel()
    cdef const double[::1] th = np.ascontiguousarray(thresholds, dtype=np.float64)
    shape = np.shape(centers)
    out_arr = np.zeros(c.shape[0])
    if th.shape[0] == 0 or sd <= 0.0:
        return out_arr.reshape(shape)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t n = c.shape[0], nt = th.shape[0], k, i
    cdef double scale = INV_SQRT2 / sd, h
    cdef double* pmf = <double*> malloc((nt + 1) * sizeof(double))
    if pmf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for k in range(n):
                for i in range(nt + 1):
                    pmf[i] = 0.0
                _accumulate_masses(c[k], scale, th, 1.0, pmf)
                h = 0.0
                for i in range(nt + 1):
                    h += _plogp(pmf[i])
                out[k] = h
    finally:
        free(pmf)
    return out_arr.reshape(shape)


def quantized_entropy_mixture(centers, offsets, weights, double sd, thresholds):
    cdef const double[::1] c = np.ascontiguousarray(centers, dtype=np.float64).ravel()
    cdef const double[::1] off = np.ascontiguousarray(offsets, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] th = np.ascontiguousarray(thresholds, dtype=np.float64)
    shape = np.shape(centers)
    out_arr = np.zeros(c.shape[0])
    if th.shape[0] == 0:
        return out_arr.reshape(shape)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t n = c.shape[0], nj = off.shape[0], nt = th.shape[0], k, j, i
    cdef double scale = INV_SQRT2 / sd if sd > 0.0 else 0.0
    cdef double h, p
    cdef bint point = sd <= 0.0
    cdef double* pmf = <double*> malloc((nt + 1) * sizeof(double))
    if pmf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for k in range(n):
                for i in range(nt + 1):
                    pmf[i] = 0.0
                for j in range(nj):
                    if point:
                        _accumulate_point(c[k] + off[j], th, w[j], pmf)
                    else:
                        _accumulate_masses(c[k] + off[j], scale, th, w[j], pmf)
                h = 0.0
                for i in range(nt + 1):
                    p = pmf[i]
                    if p < 0.0:
                        p = 0.0
                    h += _plogp(p)
                out[k] = h
    finally:
        free(pmf)
    return out_arr.reshape(shape)


def box_muller(uniforms):
    """Complex normals from uniform pairs: ``sqrt(-ln(1 - u1)) exp(2 pi i u2)``."""
    cdef const double[:, ::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0], k
    out_arr = np.empty(n, dtype=np.complex128)
    cdef double[::1] out = out_arr.view(np.float64)
    cdef double r, th, two_pi = 6.283185307179586
    with nogil:
        for k in range(n):
            r = sqrt(-log1p(-u[k, 0]))
            th = two_pi * u[k, 1]
            out[2 * k] = r * cos(th)
            out[2 * k + 1] = r * sin(th)
    return out_arr
