# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled banded accumulation for the monotone shortest-path search."""

import numpy as np

from libc.math cimport INFINITY


def accumulate(const double[:, ::1] w, const Py_ssize_t[::1] lo, const Py_ssize_t[::1] hi):
    """Cumulative node-weight table and back-pointers over a row-banded lattice.

    ``D[i, j] = w[i, j] + min(D[i-1, j-1], D[i, j-1], D[i-1, j])`` with ties
    resolved in that order. Back-pointer codes: 0 diagonal, 1 from the left
    (step (0, 1)), 2 from above (step (1, 0)), -1 unreachable/out of band.
    """
    cdef Py_ssize_t n = w.shape[0], m = w.shape[1]
    D_arr = np.full((n, m), np.inf)
    back_arr = np.full((n, m), -1, dtype=np.int8)
    cdef double[:, ::1] D = D_arr
    cdef signed char[:, ::1] back = back_arr
    cdef Py_ssize_t i, j
    cdef double best, cand
    cdef signed char code

    for i in range(n):
        for j in range(lo[i], hi[i] + 1):
            if i == 0 and j == 0:
                D[0, 0] = w[0, 0]
                back[0, 0] = -1
                continue
            best = INFINITY
            code = -1
            if i > 0 and j > 0:
                best = D[i - 1, j - 1]
                code = 0
            if j > 0:
                cand = D[i, j - 1]
                if cand < best:
                    best = cand
                    code = 1
            if i > 0:
                cand = D[i - 1, j]
                if cand < best:
                    best = cand
                    code = 2
            if best == INFINITY:
                continue
            D[i, j] = best + w[i, j]
            back[i, j] = code
    return D_arr, back_arr
