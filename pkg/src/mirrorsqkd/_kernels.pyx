# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the Monte Carlo tally and the entropy objective.

Mirrors ``_kernels_py`` function for function.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log2, sqrt, INFINITY

cnp.import_array()

DEF N_OPS = 4
DEF N_BASES = 2
DEF N_OUTCOMES = 4


cdef inline double _h2(double x) nogil:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


cdef inline double _bracket(double e_a, double e_b, double re, double m) nogil:
    cdef double w = e_a + e_b
    cdef double lam
    if w <= 0.0:
        return 0.0
    lam = 0.5 + sqrt((e_a - e_b) * (e_a - e_b) + 4.0 * re * re) / (2.0 * w)
    if lam > 1.0:
        lam = 1.0
    return (w / m) * (_h2(e_a / w) - _h2(lam))


cdef inline double _objective(double e0, double e1, double e2, double e3, double m,
                              double lower, double cs03, double slack, double t) nogil:
    cdef double re03 = lower - t
    if re03 < 0.0:
        re03 = 0.0
    if re03 > cs03:
        if re03 > cs03 + slack:
            return INFINITY
        re03 = cs03
    return _bracket(e0, e3, re03, m) + _bracket(e1, e2, t, m)


def sae_point(double e0, double e1, double e2, double e3, double m, double re03, double re12):
    return _bracket(e0, e3, re03, m) + _bracket(e1, e2, re12, m)


def sae_scan(double e0, double e1, double e2, double e3, double m,
             double lower, double cs03, double slack, t):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t n = tv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _objective(e0, e1, e2, e3, m, lower, cs03, slack, tv[i])
    return out


def golden_section(double e0, double e1, double e2, double e3, double m,
                   double lower, double cs03, double slack,
                   double lo, double hi, double tol):
    cdef double invphi = (sqrt(5.0) - 1.0) / 2.0
    cdef double a = lo, b = hi, c, d, fc, fd, best_t, best_f, f
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _objective(e0, e1, e2, e3, m, lower, cs03, slack, c)
    fd = _objective(e0, e1, e2, e3, m, lower, cs03, slack, d)
    if fc <= fd:
        best_t = c
        best_f = fc
    else:
        best_t = d
        best_f = fd
    while b - a > tol:
        if fc <= fd:
            b = d
            d = c
            fd = fc
            c = b - invphi * (b - a)
            fc = _objective(e0, e1, e2, e3, m, lower, cs03, slack, c)
            if fc < best_f:
                best_t = c
                best_f = fc
        else:
            a = c
            c = d
            fc = fd
            d = a + invphi * (b - a)
            fd = _objective(e0, e1, e2, e3, m, lower, cs03, slack, d)
            if fd < best_f:
                best_t = d
                best_f = fd
    f = _objective(e0, e1, e2, e3, m, lower, cs03, slack, lo)
    if f < best_f:
        best_t = lo
        best_f = f
    f = _objective(e0, e1, e2, e3, m, lower, cs03, slack, hi)
    if f < best_f:
        best_t = hi
        best_f = f
    return best_t, best_f


cdef inline Py_ssize_t _draw(const double* cdf, Py_ssize_t k, double u) nogil:
    cdef Py_ssize_t j = 0
    while j < k - 1 and u >= cdf[j]:
        j += 1
    return j


def tally_rounds(op_cdf, double basis_p0, alice_cdf, bob_cdf, uniforms):
    cdef double[::1] opc = np.ascontiguousarray(op_cdf, dtype=np.float64)
    cdef double[:, ::1] ac = np.ascontiguousarray(alice_cdf, dtype=np.float64)
    cdef double[:, :, :, ::1] bc = np.ascontiguousarray(bob_cdf, dtype=np.float64)
    cdef double[:, ::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    counts = np.zeros((N_OPS, N_BASES, N_OUTCOMES, N_OUTCOMES), dtype=np.int64)
    cdef cnp.int64_t[:, :, :, ::1] cv = counts
    cdef Py_ssize_t n = u.shape[0], r, op, basis, alice, bob
    with nogil:
        for r in range(n):
            op = _draw(&opc[0], N_OPS, u[r, 0])
            basis = 0 if u[r, 1] < basis_p0 else 1
            alice = _draw(&ac[op, 0], N_OUTCOMES, u[r, 2])
            bob = _draw(&bc[op, alice, basis, 0], N_OUTCOMES, u[r, 3])
            cv[op, basis, alice, bob] += 1
    return counts
