"""Exact linear algebra over F_q: rank, kernel, frozen coordinates, uniform
kernel sampling, degree-weighted value frequencies, and a one-sided rational
full-row-rank certificate for 0/1 patterns.

Dense elimination runs through the backend selected at import (compiled
Cython kernel or its numpy twin); GF(2) matrices are bit-packed 64 columns
per word, larger fields use element-index matrices plus operation tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import rref_gf2, rref_modq
from .errors import LengthMismatch, TooLarge
from .gf import FieldCtx, field_new

MAX_COLS = 8192


@dataclass(frozen=True)
class SparseMatrix:
    """Row-sparse matrix over F_q; each row holds (column, coefficient) pairs
    with strictly increasing columns and nonzero coefficients."""

    nrows: int
    ncols: int
    rows: tuple[tuple[tuple[int, int], ...], ...]
    field: FieldCtx

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise LengthMismatch(f"{len(self.rows)} row records for nrows={self.nrows}")
        q = self.field.q
        for row in self.rows:
            prev = -1
            for col, coeff in row:
                if not (0 <= col < self.ncols):
                    raise LengthMismatch(f"column {col} out of range 0..{self.ncols - 1}")
                if col <= prev:
                    raise LengthMismatch("row columns must be strictly increasing")
                if not (1 <= coeff < q):
                    raise LengthMismatch(f"stored coefficient {coeff} is zero or not in F_{q}")
                prev = col
        if self.ncols > MAX_COLS:
            raise TooLarge(f"ncols={self.ncols} exceeds the dense cap {MAX_COLS}")

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def row_support_sizes(self) -> list[int]:
        return [len(r) for r in self.rows]

    def col_support_sizes(self) -> list[int]:
        out = [0] * self.ncols
        for row in self.rows:
            for col, _ in row:
                out[col] += 1
        return out

    def to_dense(self) -> np.ndarray:
        """Dense matrix of element indices."""
        out = np.zeros((self.nrows, self.ncols), dtype=self.field.table_dtype)
        for i, row in enumerate(self.rows):
            for col, coeff in row:
                out[i, col] = coeff
        return out


def from_dense(dense: np.ndarray, field: FieldCtx) -> SparseMatrix:
    rows = []
    for i in range(dense.shape[0]):
        nz = np.nonzero(dense[i])[0]
        rows.append(tuple((int(j), int(dense[i, j])) for j in nz))
    return SparseMatrix(dense.shape[0], dense.shape[1], tuple(rows), field)


@dataclass(frozen=True)
class EliminationResult:
    rank: int
    pivots: tuple[int, ...]
    rref_rows: np.ndarray  # dense element indices, shape (nrows, ncols)


@dataclass(frozen=True)
class KernelSummary:
    nullity: int
    basis: np.ndarray  # shape (nullity, ncols), element indices
    frozen: frozenset[int]


def _pack_gf2(dense: np.ndarray) -> np.ndarray:
    m, n = dense.shape
    nwords = max((n + 63) // 64, 1)
    padded = np.zeros((m, nwords * 64), dtype=np.uint8)
    padded[:, :n] = dense
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(m, -1).copy()


def _unpack_gf2(packed: np.ndarray, ncols: int) -> np.ndarray:
    m = packed.shape[0]
    bits = np.unpackbits(packed.view(np.uint8).reshape(m, -1), axis=1, bitorder="little")
    return bits[:, :ncols].astype(np.uint8)


def eliminate(A: SparseMatrix) -> EliminationResult:
    """Deterministic Gaussian elimination to reduced row-echelon form.
    Pivoting: first row with a nonzero entry, columns scanned left to right."""
    dense = A.to_dense()
    if A.field.q == 2:
        packed = _pack_gf2(dense)
        rank, pivots = rref_gf2(packed, A.ncols)
        rref = _unpack_gf2(packed, A.ncols)
    else:
        ctx = A.field
        rank, pivots = rref_modq(dense, ctx.mul_table, ctx.sub_table, ctx.inv_table)
        rref = dense
    return EliminationResult(rank=int(rank), pivots=tuple(int(p) for p in pivots), rref_rows=rref)


def rank(A: SparseMatrix) -> int:
    return eliminate(A).rank


def nullity(A: SparseMatrix) -> int:
    return A.ncols - eliminate(A).rank


def kernel(A: SparseMatrix, elim: EliminationResult | None = None) -> KernelSummary:
    """Kernel basis from the free columns of the RREF, plus the frozen set
    (coordinates that vanish across the whole kernel)."""
    elim = elim or eliminate(A)
    ctx = A.field
    n = A.ncols
    pivots = list(elim.pivots)
    free = sorted(set(range(n)) - set(pivots))
    nul = len(free)
    basis = np.zeros((nul, n), dtype=ctx.table_dtype)
    if nul:
        rref = elim.rref_rows
        neg = ctx.neg_table.astype(ctx.table_dtype)
        block = rref[: elim.rank][:, free]  # (rank, nul)
        for j, fc in enumerate(free):
            basis[j, fc] = 1
        if pivots:
            basis[:, pivots] = neg[block].T
    if nul == 0:
        frozen = frozenset(range(n))
    else:
        frozen = frozenset(int(i) for i in np.nonzero(~basis.any(axis=0))[0])
    return KernelSummary(nullity=nul, basis=basis, frozen=frozen)


def sample_kernel(A: SparseMatrix, rng: np.random.Generator,
                  summary: KernelSummary | None = None) -> np.ndarray:
    """One uniform draw from ker A: iid uniform coefficients on the kernel
    basis (free coordinates uniform, pivots back-substituted)."""
    summary = summary or kernel(A)
    ctx = A.field
    x = np.zeros(A.ncols, dtype=ctx.table_dtype)
    if summary.nullity == 0:
        return x
    coeffs = rng.integers(0, ctx.q, size=summary.nullity)
    if ctx.q == 2:
        sel = summary.basis[coeffs == 1]
        if len(sel):
            x = np.bitwise_xor.reduce(sel).astype(ctx.table_dtype)
        return x
    add_t, mul_t = ctx.add_table, ctx.mul_table
    for c, b in zip(coeffs, summary.basis):
        if c:
            x = add_t[x, mul_t[int(c), b]]
    return x


def matvec(A: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """A @ x over F_q."""
    ctx = A.field
    out = np.zeros(A.nrows, dtype=ctx.table_dtype)
    for i, row in enumerate(A.rows):
        acc = 0
        for col, coeff in row:
            acc = ctx.add(acc, ctx.mul(coeff, int(x[col])))
        out[i] = acc
    return out


def stack_rows(A: SparseMatrix, extra_rows) -> SparseMatrix:
    """A with additional sparse rows appended."""
    rows = list(A.rows)
    rows.extend(tuple(row) for row in extra_rows)
    return SparseMatrix(len(rows), A.ncols, tuple(rows), A.field)


class Gf2RankTracker:
    """Incrementally tracks the rank of a growing GF(2) matrix.

    Maintains a bit-packed RREF; appending a row costs O(rank * words).
    Used to follow nullity paths under row augmentation without re-running
    the full elimination per step.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.nwords = max((ncols + 63) // 64, 1)
        self.rows = np.zeros((0, self.nwords), dtype=np.uint64)
        self.pivots: list[int] = []

    @classmethod
    def from_elimination(cls, A: SparseMatrix, elim: EliminationResult) -> "Gf2RankTracker":
        if A.field.q != 2:
            raise LengthMismatch("Gf2RankTracker requires q = 2")
        t = cls(A.ncols)
        t.rows = _pack_gf2(elim.rref_rows[: elim.rank])
        t.pivots = list(elim.pivots)
        return t

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _bit(self, row: np.ndarray, c: int) -> int:
        return int((row[c >> 6] >> np.uint64(c & 63)) & np.uint64(1))

    def add_row(self, cols) -> bool:
        """Append a row with 1-entries at the given columns; returns whether
        the rank increased."""
        r = np.zeros(self.nwords, dtype=np.uint64)
        for c in cols:
            r[c >> 6] ^= np.uint64(1) << np.uint64(c & 63)
        for i, pc in enumerate(self.pivots):
            if self._bit(r, pc):
                r ^= self.rows[i]
        nz = np.nonzero(r)[0]
        if nz.size == 0:
            return False
        w0 = int(nz[0])
        pc = (w0 << 6) + ((int(r[w0]) & -int(r[w0])).bit_length() - 1)
        # keep the stored rows mutually reduced so single-pass reduction stays valid
        if self.rank:
            mask = ((self.rows[:, pc >> 6] >> np.uint64(pc & 63)) & np.uint64(1)).astype(bool)
            if mask.any():
                self.rows[mask] ^= r
        self.rows = np.vstack([self.rows, r[None, :]])
        self.pivots.append(pc)
        return True


def rho(sigma: np.ndarray, dvec: np.ndarray, q: int) -> dict[int, int]:
    """Degree-weighted value frequencies: rho(s) = sum_i d_i * [sigma_i == s],
    for every s in F_q (including 0)."""
    sigma = np.asarray(sigma)
    dvec = np.asarray(dvec)
    if sigma.shape != dvec.shape:
        raise LengthMismatch(f"sigma has shape {sigma.shape}, dvec {dvec.shape}")
    counts = np.zeros(q, dtype=np.int64)
    np.add.at(counts, sigma.astype(np.int64), dvec.astype(np.int64))
    return {s: int(counts[s]) for s in range(q)}


@dataclass(frozen=True)
class RationalRankReport:
    verdict: str  # "full" | "not_full" | "inconclusive"
    witnesses: tuple[tuple[int, int], ...]  # (prime, rank) in evaluation order
    f_d: int


def _primes_coprime_to(f_d: int, count: int) -> list[int]:
    out: list[int] = []
    cand = 2
    while len(out) < count:
        if all(cand % p for p in range(2, int(math.isqrt(cand)) + 1)):
            if math.gcd(cand, f_d) == 1:
                out.append(cand)
        cand += 1
    return out


def rational_full_row_rank(B01: SparseMatrix, prime_budget: int = 3) -> RationalRankReport:
    """One-sided certificate for full rational row rank of a 0/1 pattern.

    Full row rank modulo any prime implies full rational row rank, so a single
    full witness is a proof.  If every witness prime (the smallest primes
    coprime to the gcd of the column support sizes) comes out non-full the
    verdict "not_full" is a high-confidence heuristic, not a proof.
    """
    if prime_budget < 1:
        raise LengthMismatch("prime_budget must be >= 1")
    if any(coeff != 1 for row in B01.rows for _, coeff in row):
        raise LengthMismatch("rational_full_row_rank expects a 0/1 pattern")
    col_sizes = [s for s in B01.col_support_sizes() if s > 0]
    f_d = 0
    for s in col_sizes:
        f_d = math.gcd(f_d, s)
    f_d = max(f_d, 1)
    witnesses: list[tuple[int, int]] = []
    failed = False
    for p in _primes_coprime_to(f_d, prime_budget):
        try:
            ctx = field_new(p)
            Ap = SparseMatrix(B01.nrows, B01.ncols, B01.rows, ctx)
            r = rank(Ap)
        except TooLarge:
            failed = True
            continue
        witnesses.append((p, r))
        if r == B01.nrows:
            return RationalRankReport("full", tuple(witnesses), f_d)
    if failed and not witnesses:
        return RationalRankReport("inconclusive", tuple(witnesses), f_d)
    verdict = "not_full" if witnesses and all(r < B01.nrows for _, r in witnesses) else "inconclusive"
    return RationalRankReport(verdict, tuple(witnesses), f_d)
