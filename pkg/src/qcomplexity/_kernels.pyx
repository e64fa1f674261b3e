# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every routine mirrors ``_kernels_py`` operation for operation so that both
backends return bit-identical floats (``row_power_sums`` with ``p`` outside
``{1, 2}`` excepted, where libm ``pow`` may differ from numpy by an ulp).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow
from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


def row_power_sums(const double[:, ::1] M, double p):
    """Neumaier-compensated ``sum_j |M_ij|^p`` for every row ``i``."""
    cdef Py_ssize_t rows = M.shape[0], cols = M.shape[1], i, j
    out = np.empty(rows, dtype=np.float64)
    cdef double[::1] res = out
    cdef double s, c, t, x
    cdef int mode = 1 if p == 1.0 else (2 if p == 2.0 else 0)
    with nogil:
        for i in range(rows):
            s = 0.0
            c = 0.0
            for j in range(cols):
                x = fabs(M[i, j])
                if mode == 2:
                    x = x * x
                elif mode == 0:
                    x = pow(x, p)
                t = s + x
                if fabs(s) >= fabs(x):
                    c = c + ((s - t) + x)
                else:
                    c = c + ((x - t) + s)
                s = t
            res[i] = s + c
    return out


cdef inline double _sup_abs(const double[:, ::1] F, double* acc, int64_t* negate) noexcept nogil:
    cdef Py_ssize_t m = F.shape[0], C = F.shape[1], i, col
    cdef double best = 0.0, v
    for col in range(C):
        acc[col] = 0.0
    for i in range(m):
        if negate[i]:
            for col in range(C):
                acc[col] = acc[col] + (-F[i, col])
        else:
            for col in range(C):
                acc[col] = acc[col] + F[i, col]
    for col in range(C):
        v = fabs(acc[col])
        if v > best:
            best = v
    return best


def sup_abs_exact(const double[:, ::1] F, long long start, long long count):
    """``max_c |sum_i eps_i F[i, c]|`` for sign indices ``start .. start+count-1``.

    Bit ``i`` of the index set means ``eps_i = -1`` (``i < m - 1``); the last
    sign is pinned to ``+1``.
    """
    cdef Py_ssize_t m = F.shape[0], C = F.shape[1], i
    cdef long long k
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] res = out
    cdef double* acc = <double*> malloc(max(C, 1) * sizeof(double))
    cdef int64_t* negate = <int64_t*> malloc(max(m, 1) * sizeof(int64_t))
    if acc == NULL or negate == NULL:
        free(acc)
        free(negate)
        raise MemoryError()
    try:
        with nogil:
            for k in range(count):
                for i in range(m - 1):
                    negate[i] = ((start + k) >> i) & 1
                if m > 0:
                    negate[m - 1] = 0
                res[k] = _sup_abs(F, acc, negate)
    finally:
        free(acc)
        free(negate)
    return out


def sup_abs_words(const double[:, ::1] F, const uint64_t[:, ::1] words):
    """``max_c |sum_i eps_i F[i, c]|`` with signs read from random words.

    Bit ``i % 64`` of ``words[b, i // 64]`` set means ``eps_i = -1``.
    """
    cdef Py_ssize_t m = F.shape[0], C = F.shape[1], B = words.shape[0], b, i
    out = np.empty(B, dtype=np.float64)
    cdef double[::1] res = out
    cdef double* acc = <double*> malloc(max(C, 1) * sizeof(double))
    cdef int64_t* negate = <int64_t*> malloc(max(m, 1) * sizeof(int64_t))
    if acc == NULL or negate == NULL:
        free(acc)
        free(negate)
        raise MemoryError()
    try:
        with nogil:
            for b in range(B):
                for i in range(m):
                    negate[i] = (words[b, i >> 6] >> (i & 63)) & 1
                res[b] = _sup_abs(F, acc, negate)
    finally:
        free(acc)
        free(negate)
    return out
