"""Pure numpy reduced-row-echelon kernels.

Fallback twin of the compiled sparserank._speedups module; both produce the
same pivots and the same reduced matrix for the same input (pivot = first row
with a nonzero entry, scanning columns left to right; every other row is
eliminated, yielding the unique RREF).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def rref_gf2(rows: np.ndarray, ncols: int):
    """In-place RREF of a bit-packed GF(2) matrix (uint64 words, column c in
    word c >> 6, bit c & 63).  Returns (rank, pivots)."""
    m = rows.shape[0]
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == m:
            break
        word, bit = divmod(c, 64)
        col = (rows[r:, word] >> np.uint64(bit)) & np.uint64(1)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            rows[[r, piv]] = rows[[piv, r]]
        colall = (rows[:, word] >> np.uint64(bit)) & np.uint64(1)
        colall[r] = 0
        sel = np.nonzero(colall)[0]
        if sel.size:
            rows[sel] ^= rows[r]
        pivots.append(c)
        r += 1
    return r, pivots


def rref_modq(mat: np.ndarray, mul: np.ndarray, sub: np.ndarray, inv: np.ndarray):
    """In-place RREF of a matrix of F_q element indices via operation tables.
    Returns (rank, pivots)."""
    m, n = mat.shape
    r = 0
    pivots: list[int] = []
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(mat[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            mat[[r, piv]] = mat[[piv, r]]
        pv = mat[r, c]
        if pv != 1:
            mat[r] = mul[inv[pv], mat[r]]
        col = mat[:, c].copy()
        col[r] = 0
        sel = np.nonzero(col)[0]
        if sel.size:
            f = mat[sel, c]
            mat[sel] = sub[mat[sel], mul[f[:, None], mat[r][None, :]]]
        pivots.append(c)
        r += 1
    return r, pivots
