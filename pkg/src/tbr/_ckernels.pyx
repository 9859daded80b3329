# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-ball kernels: binning, grouped accumulation, residual lookup.

Contract-identical to tbr._pykernels; accumulation order is input order in
both lanes so results are bit-for-bit equal.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def flat_bin_index(ev, la, double ev_min, double ev_width, long n_ev,
                   double la_min, double la_width, long n_la):
    cdef double[::1] e = np.ascontiguousarray(ev, dtype=np.float64)
    cdef double[::1] l = np.ascontiguousarray(la, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    cdef Py_ssize_t k
    cdef long i, j
    with nogil:
        for k in range(n):
            i = <long>((e[k] - ev_min) / ev_width)
            if i > n_ev - 1:
                i = n_ev - 1
            j = <long>((l[k] - la_min) / la_width)
            if j > n_la - 1:
                j = n_la - 1
            o[k] = i * n_la + j
    return out


def accumulate(idx, values, long n_bins):
    cdef long long[::1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = ix.shape[0]
    sums = np.zeros(n_bins, dtype=np.float64)
    counts = np.zeros(n_bins, dtype=np.int64)
    cdef double[::1] s = sums
    cdef long long[::1] c = counts
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            s[ix[k]] += v[k]
            c[ix[k]] += 1
    return sums, counts


def subtract_lookup(idx, values, table):
    cdef long long[::1] ix = np.ascontiguousarray(idx, dtype=np.int64)
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(table, dtype=np.float64)
    cdef Py_ssize_t n = ix.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            o[k] = v[k] - t[ix[k]]
    return out
