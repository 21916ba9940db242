# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled reduced-row-echelon kernels.

Semantics are identical to sparserank._elim_py: pivots are chosen by scanning
columns left to right and taking the first row with a nonzero entry, and each
pivot eliminates every other row, so the result is the (unique) RREF.
"""

import numpy as np

cimport numpy as cnp

ctypedef unsigned long long u64

ctypedef fused elem_t:
    cnp.uint8_t
    cnp.uint16_t

BACKEND = "cython"


def rref_gf2(u64[:, ::1] rows, Py_ssize_t ncols):
    """In-place RREF of a bit-packed GF(2) matrix (64 columns per word,
    column c lives in word c >> 6, bit c & 63).  Returns (rank, pivots)."""
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t nwords = rows.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv, word
    cdef u64 mask, tmp
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        word = c >> 6
        mask = (<u64> 1) << (c & 63)
        piv = -1
        for i in range(r, m):
            if rows[i, word] & mask:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(nwords):
                tmp = rows[r, j]
                rows[r, j] = rows[piv, j]
                rows[piv, j] = tmp
        for i in range(m):
            if i != r and (rows[i, word] & mask):
                for j in range(nwords):
                    rows[i, j] ^= rows[r, j]
        pivots.append(c)
        r += 1
    return r, pivots


def rref_modq(elem_t[:, ::1] mat, elem_t[:, ::1] mul, elem_t[:, ::1] sub,
              elem_t[:] inv):
    """In-place RREF of a matrix of F_q element indices, using the field's
    multiplication/subtraction/inverse tables.  Returns (rank, pivots)."""
    cdef Py_ssize_t m = mat.shape[0]
    cdef Py_ssize_t n = mat.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef elem_t pv, f, t
    pivots = []
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if mat[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                t = mat[r, j]
                mat[r, j] = mat[piv, j]
                mat[piv, j] = t
        pv = mat[r, c]
        if pv != 1:
            pv = inv[pv]
            for j in range(n):
                mat[r, j] = mul[pv, mat[r, j]]
        for i in range(m):
            f = mat[i, c]
            if i != r and f != 0:
                for j in range(n):
                    mat[i, j] = sub[mat[i, j], mul[f, mat[r, j]]]
        pivots.append(c)
        r += 1
    return r, pivots
