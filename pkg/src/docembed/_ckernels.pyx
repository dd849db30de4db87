# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`docembed._pykernels`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def weighted_row_sums(const double[:, ::1] matrix,
                      const long long[::1] indptr,
                      const long long[::1] indices,
                      const double[::1] coef,
                      double[:, ::1] out):
    """out[r] = sum of coef[j] * matrix[indices[j]] for j in indptr[r]:indptr[r+1].

    Terms are accumulated strictly left to right.
    """
    cdef Py_ssize_t n_rows = out.shape[0]
    cdef Py_ssize_t dim = matrix.shape[1]
    cdef Py_ssize_t r, j, k, row
    cdef double w
    with nogil:
        for r in range(n_rows):
            for k in range(dim):
                out[r, k] = 0.0
            for j in range(indptr[r], indptr[r + 1]):
                row = indices[j]
                w = coef[j]
                for k in range(dim):
                    out[r, k] += w * matrix[row, k]


def pair_cosines(const double[:, ::1] vectors,
                 const long long[::1] left,
                 const long long[::1] right,
                 double zero_tol):
    cdef Py_ssize_t n = vectors.shape[0]
    cdef Py_ssize_t dim = vectors.shape[1]
    cdef Py_ssize_t m = left.shape[0]
    cdef Py_ssize_t i, k, a, b
    cdef double acc, na, nb
    norms_arr = np.empty(n, dtype=np.float64)
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] norms = norms_arr
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            acc = 0.0
            for k in range(dim):
                acc += vectors[i, k] * vectors[i, k]
            norms[i] = sqrt(acc)
        for i in range(m):
            a = left[i]
            b = right[i]
            na = norms[a]
            nb = norms[b]
            if na < zero_tol or nb < zero_tol:
                out[i] = 0.0
                continue
            acc = 0.0
            for k in range(dim):
                acc += vectors[a, k] * vectors[b, k]
            acc = acc / (na * nb)
            if acc > 1.0:
                acc = 1.0
            elif acc < -1.0:
                acc = -1.0
            out[i] = acc
    return out_arr


def doubled_positive_rank_sum(const double[::1] scores,
                              const signed char[::1] labels,
                              const long long[::1] order):
    """Twice the tie-averaged rank sum of the positive labels.

    ``order`` sorts ``scores`` ascending. A tie block occupying sorted
    positions i..j-1 gets average rank (i + 1 + j) / 2, so doubling keeps
    everything in exact integer arithmetic.
    """
    cdef Py_ssize_t n = scores.shape[0]
    cdef Py_ssize_t i = 0, j, q
    cdef long long total = 0
    cdef long long pos_in_block
    cdef double s
    with nogil:
        while i < n:
            s = scores[order[i]]
            j = i + 1
            while j < n and scores[order[j]] == s:
                j += 1
            pos_in_block = 0
            for q in range(i, j):
                if labels[order[q]] == 1:
                    pos_in_block += 1
            total += pos_in_block * (i + 1 + j)
            i = j
    return total
