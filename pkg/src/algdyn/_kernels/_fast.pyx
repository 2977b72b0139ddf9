# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: compensated log-modulus accumulation and bit-packed
GF(2) elimination.  Semantics match algdyn._kernels.pure bit for bit."""

from libc.math cimport log, sqrt, INFINITY

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def logabs_kahan_masked(cnp.ndarray[cnp.complex128_t, ndim=1] values,
                        cnp.ndarray[cnp.uint8_t, ndim=1, cast=True] exclude_mask,
                        Py_ssize_t slab_size):
    """Kahan sum of 0.5*log(re^2+im^2) over non-excluded entries, per slab,
    slab partials combined in order.  Returns (total, min_abs, n_summed)."""
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t start, i, stop
    cdef double total = 0.0, total_c = 0.0
    cdef double s, c, y, t, sq, re, im
    cdef double min_sq = INFINITY
    cdef long n_summed = 0
    for start in range(0, n, slab_size):
        s = 0.0
        c = 0.0
        stop = start + slab_size
        if stop > n:
            stop = n
        for i in range(start, stop):
            if exclude_mask[i]:
                continue
            re = values[i].real
            im = values[i].imag
            sq = re * re + im * im
            if sq < min_sq:
                min_sq = sq
            y = 0.5 * log(sq) - c
            t = s + y
            c = (t - s) - y
            s = t
            n_summed += 1
        y = s - total_c
        t = total + y
        total_c = (t - total) - y
        total = t
    return total, sqrt(min_sq) if min_sq < INFINITY else INFINITY, n_summed


def gf2_rref(cnp.ndarray[cnp.uint64_t, ndim=2] mat, Py_ssize_t ncols):
    """In-place RREF of a bit-packed GF(2) matrix; pivots over the first
    ncols columns, extra (augmented) columns carried along.
    Returns (rank, pivot_columns)."""
    cdef Py_ssize_t n_rows = mat.shape[0]
    cdef Py_ssize_t n_words = mat.shape[1]
    cdef Py_ssize_t rank = 0, col, w, r, k, p
    cdef unsigned long long bit
    pivots = []
    for col in range(ncols):
        if rank == n_rows:
            break
        w = col >> 6
        bit = (<unsigned long long>1) << (col & 63)
        p = -1
        for r in range(rank, n_rows):
            if mat[r, w] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for k in range(n_words):
                mat[p, k], mat[rank, k] = mat[rank, k], mat[p, k]
        for r in range(n_rows):
            if r != rank and (mat[r, w] & bit):
                for k in range(n_words):
                    mat[r, k] ^= mat[rank, k]
        pivots.append(col)
        rank += 1
    return rank, pivots
