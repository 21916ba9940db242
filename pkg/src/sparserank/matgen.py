"""Samplers for the random matrix models: coupled degree sequences, the
pairing-model (configuration) matrix, the simple Tanner-graph matrix, the 0/1
biadjacency matrix, ternary-row augmentation, and the pinning operation.

All randomness flows through a caller-owned numpy Generator; for a fixed seed
the draw order is deterministic (degree draws, then the clone matching, then
one coefficient draw per nonzero cell in sorted (row, column) order), so
identical (spec, n, seed) reproduces identical matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import degdist as dd
from .errors import BadParameter, RetriesExhausted
from .gf import FieldCtx, field_new
from .linalg import SparseMatrix
from .threshold import ModelSpec


@dataclass(frozen=True)
class DegreeSequencePair:
    """Variable degrees d_1..d_n and check degrees k_1..k_m with equal sums."""

    dvec: np.ndarray
    kvec: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        if int(self.dvec.sum()) != int(self.kvec.sum()):
            raise BadParameter("degree sums differ")


def _chi_cum(chi) -> tuple[np.ndarray, np.ndarray]:
    vals = np.array([v for v, _ in chi], dtype=np.int64)
    cum = np.cumsum([p for _, p in chi])
    return vals, cum


def _draw_chi(chi_vals, chi_cum, rng, size: int) -> np.ndarray:
    u = rng.random(size)
    idx = np.minimum(np.searchsorted(chi_cum, u, side="right"), len(chi_vals) - 1)
    return chi_vals[idx]


def degree_sum_attainable(ddist: dd.DegreeDist, f_k: int, n: int) -> bool:
    """Whether the event sum(d) = sum(k) can occur at all: sum(k) is always a
    multiple of f_k, and the reachable residues of sum(d) mod f_k are
    n*s0 + <support differences>."""
    values = ddist.values
    s0 = values[0]
    g_diff = 0
    for v in values[1:]:
        g_diff = math.gcd(g_diff, v - s0)
    h = math.gcd(f_k, g_diff) if g_diff else f_k
    return (n * s0) % h == 0


def sample_degrees(
    spec: ModelSpec,
    n: int,
    rng: np.random.Generator,
    max_tries: int | None = None,
) -> DegreeSequencePair:
    """Rejection-sample (d_1..d_n, m, k_1..k_m) until the sums match.

    m is Poisson with mean d*n/k.  The acceptance probability is
    Omega(n^{-1/2}) whenever the residue condition checked by
    degree_sum_attainable holds, hence the default cap of 200*sqrt(n) tries.
    """
    if n < 1:
        raise BadParameter(f"n must be >= 1, got {n}")
    if not degree_sum_attainable(spec.ddist, spec.f_k, n):
        raise BadParameter(
            f"sum(d) = sum(k) is unattainable for n={n}: the check-degree gcd "
            f"{spec.f_k} never divides the variable degree total"
        )
    if max_tries is None:
        max_tries = int(200 * math.sqrt(n)) + 1
    if max_tries < 1:
        raise BadParameter("max_tries must be >= 1")
    mean_m = spec.d_mean * n / spec.k_mean
    for _ in range(max_tries):
        dvec = dd.sample_many(spec.ddist, rng, n)
        m = int(rng.poisson(mean_m))
        kvec = dd.sample_many(spec.kdist, rng, m)
        if int(dvec.sum()) == int(kvec.sum()):
            return DegreeSequencePair(dvec=dvec, kvec=kvec, n=n, m=m)
    raise RetriesExhausted(f"no degree sequence with equal sums in {max_tries} tries")


def _matching_cells(degs: DegreeSequencePair, rng: np.random.Generator):
    """Uniform perfect matching of variable clones and check clones,
    contracted to cells: returns (cell_rows, cell_cols, multiplicities),
    sorted by (row, col)."""
    var_owner = np.repeat(np.arange(degs.n, dtype=np.int64), degs.dvec)
    check_owner = np.repeat(np.arange(max(degs.m, 1), dtype=np.int64)[: degs.m], degs.kvec)
    perm = rng.permutation(var_owner.shape[0])
    keys = check_owner * degs.n + var_owner[perm]
    cells, counts = np.unique(keys, return_counts=True)
    return cells // degs.n, cells % degs.n, counts


def _rows_from_cells(ci, cj, coeffs, degs: DegreeSequencePair, field: FieldCtx):
    rows: list[tuple[tuple[int, int], ...]] = []
    keep = coeffs != 0
    ci, cj, coeffs = ci[keep], cj[keep], coeffs[keep]
    bounds = np.searchsorted(ci, np.arange(degs.m + 1))
    for i in range(degs.m):
        lo, hi = bounds[i], bounds[i + 1]
        rows.append(tuple((int(cj[t]), int(coeffs[t])) for t in range(lo, hi)))
    return SparseMatrix(degs.m, degs.n, tuple(rows), field)


def gen_pairing(spec: ModelSpec, degs: DegreeSequencePair, rng: np.random.Generator) -> SparseMatrix:
    """Pairing-model matrix: entry (i, j) is chi_{ij} times the i-j edge
    multiplicity reduced in F_q; entries that reduce to zero are dropped."""
    ctx = spec.field
    ci, cj, counts = _matching_cells(degs, rng)
    chi_vals, chi_cum = _chi_cum(spec.chi)
    chis = _draw_chi(chi_vals, chi_cum, rng, len(ci))
    mults = (counts % ctx.p).astype(np.int64)  # scalar embedding of the multiplicity
    coeffs = ctx.mul_table[chis, mults].astype(np.int64)
    return _rows_from_cells(ci, cj, coeffs, degs, ctx)


def _simple_try_budget(degs: DegreeSequencePair) -> int:
    """Whole-matching rejection succeeds with probability ~exp(-lambda) where
    lambda is the expected multi-edge count of the pairing model; budget 50
    expected successes, clamped to [1000, 100000]."""
    total = float(degs.dvec.sum())
    if total == 0:
        return 1000
    lam = (
        float((degs.dvec * (degs.dvec - 1)).sum()) / total
        * float((degs.kvec * (degs.kvec - 1)).sum()) / total
        / 2.0
    )
    return int(min(max(50.0 * math.exp(lam), 1000.0), 100_000.0))


def gen_simple(
    spec: ModelSpec,
    degs: DegreeSequencePair,
    rng: np.random.Generator,
    max_tries: int | None = None,
) -> SparseMatrix:
    """Simple-graph matrix: the pairing matching is redrawn until no
    multi-edge occurs, then each edge carries exactly one chi draw."""
    ctx = spec.field
    if max_tries is None:
        max_tries = _simple_try_budget(degs)
    for _ in range(max_tries):
        ci, cj, counts = _matching_cells(degs, rng)
        if counts.size == 0 or int(counts.max()) == 1:
            chi_vals, chi_cum = _chi_cum(spec.chi)
            coeffs = _draw_chi(chi_vals, chi_cum, rng, len(ci))
            return _rows_from_cells(ci, cj, coeffs, degs, ctx)
    raise RetriesExhausted(f"no simple matching in {max_tries} tries")


def gen_biadjacency(
    degs: DegreeSequencePair,
    rng: np.random.Generator,
    q: int = 2,
    simple: bool = True,
    max_tries: int | None = None,
) -> SparseMatrix:
    """0/1 biadjacency matrix of the Tanner graph, read over F_q (all stored
    coefficients are 1).  With simple=False the pairing multigraph's support
    pattern is used instead of rejecting multi-edges."""
    ctx = field_new(q)
    if simple:
        if max_tries is None:
            max_tries = _simple_try_budget(degs)
        for _ in range(max_tries):
            ci, cj, counts = _matching_cells(degs, rng)
            if counts.size == 0 or int(counts.max()) == 1:
                coeffs = np.ones(len(ci), dtype=np.int64)
                return _rows_from_cells(ci, cj, coeffs, degs, ctx)
        raise RetriesExhausted(f"no simple matching in {max_tries} tries")
    ci, cj, counts = _matching_cells(degs, rng)
    coeffs = np.ones(len(ci), dtype=np.int64)
    return _rows_from_cells(ci, cj, coeffs, degs, ctx)


def add_ternary_rows(
    A: SparseMatrix,
    t: int,
    rng: np.random.Generator,
    chi: tuple[tuple[int, float], ...] | None = None,
) -> SparseMatrix:
    """Append t rows with three uniformly chosen positions each (with
    replacement); coefficients are iid chi draws, colliding positions merge by
    field addition and zero results are dropped."""
    if t < 0:
        raise BadParameter(f"t must be >= 0, got {t}")
    if A.ncols < 3:
        raise BadParameter("need at least 3 columns for ternary rows")
    ctx = A.field
    if chi is None:
        chi = ((1, 1.0),)
    chi_vals, chi_cum = _chi_cum(chi)
    new_rows = []
    for _ in range(t):
        cols = rng.integers(0, A.ncols, size=3)
        coeffs = _draw_chi(chi_vals, chi_cum, rng, 3)
        acc: dict[int, int] = {}
        for c, x in zip(cols, coeffs):
            c = int(c)
            acc[c] = ctx.add(acc.get(c, 0), int(x))
        row = tuple((c, v) for c, v in sorted(acc.items()) if v != 0)
        new_rows.append(row)
    rows = A.rows + tuple(new_rows)
    return SparseMatrix(A.nrows + t, A.ncols, rows, ctx)


def pin(A: SparseMatrix, theta: int, rng: np.random.Generator) -> SparseMatrix:
    """Append theta rows, each with a single 1 at a uniformly random column."""
    if theta < 0:
        raise BadParameter(f"theta must be >= 0, got {theta}")
    new_rows = tuple(((int(rng.integers(0, A.ncols)), 1),) for _ in range(theta))
    return SparseMatrix(A.nrows + theta, A.ncols, A.rows + new_rows, A.field)
