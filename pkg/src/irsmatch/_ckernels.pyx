# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; mirrors ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log2, INFINITY

cnp.import_array()

PIVOT_RTOL = 1e-12


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _solve_inplace(double complex[:, ::1] a, double complex[:, ::1] x,
                        double pivot_rtol, double* min_piv, double* max_piv) nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t nr = x.shape[1]
    cdef Py_ssize_t i, j, col, r, p
    cdef double row_scale = 0.0, acc, piv, mag
    cdef double complex factor, tmp, pivval

    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += cabs2(a[i, j])
        acc = sqrt(acc)
        if acc > row_scale:
            row_scale = acc
    cdef double thresh = pivot_rtol * row_scale
    min_piv[0] = INFINITY
    max_piv[0] = 0.0

    for col in range(n):
        p = col
        piv = sqrt(cabs2(a[col, col]))
        for r in range(col + 1, n):
            mag = sqrt(cabs2(a[r, col]))
            if mag > piv:
                piv = mag
                p = r
        if piv <= thresh or piv == 0.0:
            min_piv[0] = piv
            return 0
        if piv < min_piv[0]:
            min_piv[0] = piv
        if piv > max_piv[0]:
            max_piv[0] = piv
        if p != col:
            for j in range(n):
                tmp = a[col, j]
                a[col, j] = a[p, j]
                a[p, j] = tmp
            for j in range(nr):
                tmp = x[col, j]
                x[col, j] = x[p, j]
                x[p, j] = tmp
        pivval = a[col, col]
        for r in range(col + 1, n):
            factor = a[r, col] / pivval
            if factor != 0:
                for j in range(col, n):
                    a[r, j] = a[r, j] - factor * a[col, j]
                for j in range(nr):
                    x[r, j] = x[r, j] - factor * x[col, j]

    for col in range(n - 1, -1, -1):
        for j in range(nr):
            tmp = x[col, j]
            for r in range(col + 1, n):
                tmp = tmp - a[col, r] * x[r, j]
            x[col, j] = tmp / a[col, col]
    return 1


def gauss_solve(a, b, double pivot_rtol=PIVOT_RTOL):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] aa = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] xx
    b_arr = np.array(b, dtype=np.complex128, order="C", copy=True)
    vector = b_arr.ndim == 1
    xx = b_arr.reshape(-1, 1) if vector else b_arr
    cdef double min_piv, max_piv
    cdef int ok = _solve_inplace(aa, xx, pivot_rtol, &min_piv, &max_piv)
    out = xx.reshape(-1) if vector else xx
    return out, bool(ok), min_piv, max_piv


def greedy_phases(f, g_col, phasors):
    cdef double complex[::1] fv = np.ascontiguousarray(f, dtype=np.complex128)
    cdef double complex[::1] gv = np.ascontiguousarray(g_col, dtype=np.complex128)
    cdef double complex[::1] ph = np.ascontiguousarray(phasors, dtype=np.complex128)
    cdef Py_ssize_t n = fv.shape[0]
    cdef Py_ssize_t q = ph.shape[0]
    idx_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] idx = idx_arr
    cdef double complex s = 0, a, sa, cand
    cdef double best_val, val
    cdef Py_ssize_t i, t, best
    for i in range(n):
        a = fv[i].conjugate() * gv[i]
        sa = s.conjugate() * a
        best = 0
        cand = sa * ph[0]
        best_val = cand.real
        for t in range(1, q):
            cand = sa * ph[t]
            val = cand.real
            if val > best_val:
                best_val = val
                best = t
        idx[i] = best
        s = s + a * ph[best]
    return idx_arr, complex(s)


def zf_rates(h_desired, composite, powers, double noise_power, double pivot_rtol=PIVOT_RTOL):
    cdef double complex[:, ::1] h = np.ascontiguousarray(h_desired, dtype=np.complex128)
    cdef double complex[:, ::1] c = np.ascontiguousarray(composite, dtype=np.complex128)
    cdef double[::1] p = np.ascontiguousarray(powers, dtype=np.float64)
    cdef Py_ssize_t k = h.shape[0]
    cdef Py_ssize_t m = h.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double complex acc
    gram_arr = np.empty((k, k), dtype=np.complex128)
    y_arr = np.array(h, dtype=np.complex128, order="C", copy=True)
    rates_arr = np.zeros(k, dtype=np.float64)
    cdef double complex[:, ::1] gram = gram_arr
    cdef double complex[:, ::1] y = y_arr
    cdef double[::1] rates = rates_arr
    cdef double min_piv, max_piv, norm2, signal, interf, g
    for i in range(k):
        for j in range(k):
            acc = 0
            for t in range(m):
                acc = acc + h[i, t] * h[j, t].conjugate()
            gram[i, j] = acc
    if not _solve_inplace(gram, y, pivot_rtol, &min_piv, &max_piv):
        return rates_arr, False, min_piv
    norms_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] norms = norms_arr
    for j in range(k):
        norm2 = 0.0
        for t in range(m):
            norm2 += cabs2(y[j, t])
        norms[j] = norm2
    for i in range(k):
        signal = 0.0
        interf = 0.0
        for j in range(k):
            acc = 0
            for t in range(m):
                acc = acc + c[i, t] * y[j, t].conjugate()
            g = p[j] * cabs2(acc) / norms[j]
            if j == i:
                signal = g
            else:
                interf += g
        rates[i] = log2(1.0 + signal / (interf + noise_power))
    return rates_arr, True, min_piv
