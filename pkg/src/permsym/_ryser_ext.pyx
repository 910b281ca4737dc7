# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled permanent kernels.

``permanent``: Ryser's formula with Gray-code subset iteration, O(2^N N).
``permanent_nonneg``: subset dynamic programme without subtractions, so a
matrix whose support has no perfect matching gives exactly 0.0.
"""
import numpy as np
from libc.stdlib cimport malloc, free

cdef enum:
    MAX_N = 20


cdef double complex _ryser(const double complex[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef double complex rowsum[MAX_N]
    cdef double complex acc = 0.0
    cdef double complex prodv
    cdef unsigned long long k, total, gray
    cdef Py_ssize_t i, j
    cdef int size = 0
    if n == 0:
        return 1.0
    for i in range(n):
        rowsum[i] = 0.0
    total = (<unsigned long long> 1) << n
    gray = 0
    for k in range(1, total):
        # bit flipped between consecutive Gray codes is the lowest set bit of k
        j = 0
        while not ((k >> j) & 1):
            j += 1
        gray ^= (<unsigned long long> 1) << j
        if (gray >> j) & 1:
            for i in range(n):
                rowsum[i] = rowsum[i] + a[i, j]
            size += 1
        else:
            for i in range(n):
                rowsum[i] = rowsum[i] - a[i, j]
            size -= 1
        prodv = rowsum[0]
        for i in range(1, n):
            prodv = prodv * rowsum[i]
        if (n - size) & 1:
            acc = acc - prodv
        else:
            acc = acc + prodv
    return acc


cdef int _popcount(unsigned long long x) noexcept nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef double _nonneg_dp(const double[:, ::1] a, Py_ssize_t n, double* f) noexcept nogil:
    cdef unsigned long long mask, total, bit
    cdef Py_ssize_t i, j
    cdef double s
    if n == 0:
        return 1.0
    total = (<unsigned long long> 1) << n
    f[0] = 1.0
    for mask in range(1, total):
        i = _popcount(mask) - 1
        s = 0.0
        for j in range(n):
            bit = (<unsigned long long> 1) << j
            if mask & bit and a[i, j] != 0.0:
                s = s + f[mask ^ bit] * a[i, j]
        f[mask] = s
    return f[total - 1]


def _check_square(shape, int ndim):
    if shape[ndim - 1] != shape[ndim - 2]:
        raise ValueError("permanent needs square matrices")
    if shape[ndim - 1] > MAX_N:
        raise ValueError(f"matrix size {shape[ndim - 1]} exceeds the supported maximum {MAX_N}")


def permanent(a):
    cdef const double complex[:, ::1] m = np.ascontiguousarray(a, dtype=np.complex128)
    _check_square((m.shape[0], m.shape[1]), 2)
    cdef double complex out
    with nogil:
        out = _ryser(m, m.shape[0])
    return complex(out)


def permanent_batch(a):
    cdef const double complex[:, :, ::1] m = np.ascontiguousarray(a, dtype=np.complex128)
    _check_square((m.shape[0], m.shape[1], m.shape[2]), 3)
    cdef Py_ssize_t b, nb = m.shape[0], n = m.shape[1]
    out = np.empty(nb, dtype=np.complex128)
    cdef double complex[::1] res = out
    with nogil:
        for b in range(nb):
            res[b] = _ryser(m[b], n)
    return out


def permanent_nonneg(a):
    cdef const double[:, ::1] m = np.ascontiguousarray(a, dtype=np.float64)
    _check_square((m.shape[0], m.shape[1]), 2)
    if np.any(np.asarray(m) < 0):
        raise ValueError("permanent_nonneg needs a non-negative matrix")
    cdef Py_ssize_t n = m.shape[0]
    cdef double out
    cdef double* f = <double*> malloc(sizeof(double) << n)
    if f == NULL:
        raise MemoryError()
    try:
        with nogil:
            out = _nonneg_dp(m, n, f)
    finally:
        free(f)
    return float(out)


def permanent_nonneg_batch(a):
    cdef const double[:, :, ::1] m = np.ascontiguousarray(a, dtype=np.float64)
    _check_square((m.shape[0], m.shape[1], m.shape[2]), 3)
    if np.any(np.asarray(m) < 0):
        raise ValueError("permanent_nonneg needs non-negative matrices")
    cdef Py_ssize_t b, nb = m.shape[0], n = m.shape[1]
    out = np.empty(nb, dtype=np.float64)
    cdef double[::1] res = out
    cdef double* f = <double*> malloc(sizeof(double) << n)
    if f == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(nb):
                res[b] = _nonneg_dp(m[b], n, f)
    finally:
        free(f)
    return out
