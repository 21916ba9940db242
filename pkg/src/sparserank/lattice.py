"""Solution-frequency lattices of a single linear equation over F_q.

For coefficients chi_1..chi_k0 (units), the solutions sigma of
sum chi_i sigma_i = 0 induce frequency vectors (counts of each nonzero field
value); their integer span is a module of Z^(q-1), of index q when all
coefficients are equal and full otherwise.  This module constructs:

  * the solution sets themselves (exhaustive, capped enumeration),
  * the frequency-vector module via a Hermite-normal-form oracle,
  * the explicit triangular basis pair for identical coefficients (the
    "cancel by -X^i multiples" basis and the l1<=3 shortening basis),
  * the orbit basis for mixed coefficients (three cases keyed on the
    normalized second and third coefficients),
  * verification of any candidate basis against the brute-force module, and
  * the bounded check that module points with f_d-divisible coordinates are
    f_d-multiples of module points (f_d coprime to q).

Vectors live in Z^(q-1) with coordinate j-1 belonging to the unit with index
f = j under the length-monotone bijection from the gf module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadInput, BadParameter, NotCoprime, TooLarge
from .gf import FieldCtx

ENUM_CAP = 10**7
INTERSECT_CAP = 2 * 10**7


@dataclass(frozen=True)
class SolutionSet:
    ctx: FieldCtx
    coeffs: tuple[int, ...]
    sols: np.ndarray  # shape (q^(k0-1), k0), element indices

    @property
    def k0(self) -> int:
        return len(self.coeffs)


def _check_coeffs(ctx: FieldCtx, coeffs) -> tuple[int, ...]:
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) < 3:
        raise BadParameter(f"need k0 >= 3 coefficients, got {len(coeffs)}")
    if any(not (1 <= c < ctx.q) for c in coeffs):
        raise BadParameter(f"coefficients must be units of F_{ctx.q}: {coeffs}")
    return coeffs


def solutions(ctx: FieldCtx, coeffs) -> SolutionSet:
    """All sigma in F_q^k0 with sum chi_i sigma_i = 0: free choice of
    sigma_2..sigma_k0, solve for sigma_1."""
    coeffs = _check_coeffs(ctx, coeffs)
    q, k0 = ctx.q, len(coeffs)
    if q**k0 > ENUM_CAP:
        raise TooLarge(f"q^k0 = {q**k0} exceeds enumeration cap {ENUM_CAP}")
    n = q ** (k0 - 1)
    sols = np.zeros((n, k0), dtype=ctx.table_dtype)
    idx = np.arange(n)
    mul_t, add_t = ctx.mul_table, ctx.add_table
    acc = np.zeros(n, dtype=ctx.table_dtype)
    for t in range(1, k0):
        digit = ((idx // q ** (t - 1)) % q).astype(ctx.table_dtype)
        sols[:, t] = digit
        acc = add_t[acc, mul_t[coeffs[t], digit]]
    neg_inv = ctx.mul(ctx.neg(1), ctx.inv(coeffs[0]))
    sols[:, 0] = mul_t[neg_inv, acc]
    return SolutionSet(ctx=ctx, coeffs=coeffs, sols=sols)


def freq_vector(ctx: FieldCtx, sigma) -> np.ndarray:
    """Counts of each nonzero field value in sigma, in f-order."""
    out = np.zeros(ctx.q - 1, dtype=np.int64)
    for s in sigma:
        s = int(s)
        if s:
            out[ctx.f_index(s) - 1] += 1
    return out


def _freq_matrix(ctx: FieldCtx, sols: np.ndarray) -> np.ndarray:
    """Frequency vectors of all solution rows at once."""
    n, k0 = sols.shape
    fmap = np.zeros(ctx.q, dtype=np.int64)
    for h in ctx.units():
        fmap[h] = ctx.f_index(h)
    out = np.zeros((n, ctx.q - 1), dtype=np.int64)
    rows = np.arange(n)
    for t in range(k0):
        vals = sols[:, t].astype(np.int64)
        nz = vals != 0
        np.add.at(out, (rows[nz], fmap[vals[nz]] - 1), 1)
    return out


# -- exact integer Hermite normal form ----------------------------------------


def _row_hnf(rows: list[list[int]], ncols: int):
    """Canonical row-style HNF: echelon rows with positive pivots, entries
    above each pivot reduced into [0, pivot).  Returns (rows, pivot_cols)."""
    work = [list(map(int, r)) for r in rows if any(r)]
    i0 = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(i0, len(work)) if work[i][c] != 0]
            if not nz:
                pivot = False
                break
            ip = min(nz, key=lambda i: abs(work[i][c]))
            work[i0], work[ip] = work[ip], work[i0]
            clean = True
            for i in range(i0 + 1, len(work)):
                if work[i][c]:
                    f = work[i][c] // work[i0][c]
                    work[i] = [x - f * y for x, y in zip(work[i], work[i0])]
                    if work[i][c]:
                        clean = False
            if clean:
                pivot = True
                break
        if pivot:
            if work[i0][c] < 0:
                work[i0] = [-x for x in work[i0]]
            i0 += 1
    work = work[:i0]
    piv_cols = [next(j for j, x in enumerate(r) if x) for r in work]
    # reduce above-pivot entries in ascending pivot order, so entries a
    # reduction introduces in later columns are themselves reduced afterwards
    for i in range(len(work)):
        pc = piv_cols[i]
        pv = work[i][pc]
        for i2 in range(i):
            if work[i2][pc]:
                f = work[i2][pc] // pv
                work[i2] = [x - f * y for x, y in zip(work[i2], work[i])]
    return work, piv_cols


def hnf(int_matrix) -> tuple[np.ndarray, int]:
    """Column-style HNF of the module generated by the matrix columns.
    Returns (canonical basis matrix with HNF columns, |det|), where |det| is
    the product of the pivots for a full-rank module and 0 otherwise."""
    mat = np.asarray(int_matrix, dtype=object)
    if mat.ndim != 2:
        raise BadParameter("hnf expects a 2d integer matrix")
    dim, ngen = mat.shape
    if dim > 63 or ngen > 4096:
        raise TooLarge(f"hnf caps at 63 dimensions, got {dim}x{ngen}")
    rows = [[int(mat[i, g]) for i in range(dim)] for g in range(ngen)]
    hrows, piv = _row_hnf(rows, dim)
    det_abs = 0
    if len(hrows) == dim:
        det_abs = 1
        for i, pc in enumerate(piv):
            det_abs *= hrows[i][pc]
    cols = np.array(hrows, dtype=np.int64).T if hrows else np.zeros((dim, 0), dtype=np.int64)
    return cols, int(det_abs)


def hnf_member(hnf_cols: np.ndarray, x) -> bool:
    """Whether x lies in the module with the given canonical HNF basis."""
    rows = [list(map(int, hnf_cols[:, j])) for j in range(hnf_cols.shape[1])]
    piv = [next((c for c, v in enumerate(r) if v), None) for r in rows]
    rem = list(map(int, x))
    for r, pc in zip(rows, piv):
        if pc is None:
            continue
        if rem[pc] % r[pc]:
            return False
        f = rem[pc] // r[pc]
        rem = [a - f * b for a, b in zip(rem, r)]
    return not any(rem)


def det_bareiss(mat) -> int:
    """Exact determinant by fraction-free elimination on Python ints."""
    a = [[int(x) for x in row] for row in np.asarray(mat, dtype=object)]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# -- bases ---------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeBasis:
    """(q-1) integer columns indexed by F_q* via the f bijection."""

    matrix: np.ndarray  # shape (q-1, q-1), int64, columns are basis vectors
    det_abs: int

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.matrix[:, j].copy() for j in range(self.matrix.shape[1])]


@dataclass(frozen=True)
class IdenticalBases:
    B1: LatticeBasis  # triangular "cancel against -X^i" basis (M_q)
    B2: LatticeBasis  # l1 <= 3 shortening basis (A_q)


def module_bruteforce(ctx: FieldCtx, coeffs) -> tuple[np.ndarray, int]:
    """HNF and |det| of the module spanned by the frequency vectors of every
    solution (the oracle the explicit bases are checked against)."""
    sols = solutions(ctx, coeffs).sols
    fmat = _freq_matrix(ctx, sols)
    gens = np.unique(fmat, axis=0)
    return hnf(gens.T)


def basis_identical(ctx: FieldCtx) -> IdenticalBases:
    """The two explicit bases of the identical-coefficient module, assembled
    in f-order (column at position f(h) - 1 is the vector associated to h)."""
    q, p, ell = ctx.q, ctx.p, ctx.ell
    pos = {h: ctx.f_index(h) - 1 for h in ctx.units()}

    m1 = np.zeros((q - 1, q - 1), dtype=np.int64)
    for h in ctx.units():
        col = pos[h]
        m1[pos[h], col] += 1
        for i, a in enumerate(ctx.coeffs(h)):
            if a:
                x_i = ctx.from_coeffs(tuple(1 if j == i else 0 for j in range(ell)))
                m1[pos[ctx.neg(x_i)], col] += a

    m2 = np.zeros((q - 1, q - 1), dtype=np.int64)
    for h in ctx.units():
        col = pos[h]
        length = ctx.element_len(h)
        if length >= 2:
            cs = ctx.coeffs(h)
            r = max(i for i, a in enumerate(cs) if a)
            u = ctx.from_coeffs(tuple(cs[r] if j == r else 0 for j in range(ell)))
            m2[pos[h], col] += 1
            m2[pos[ctx.neg(u)], col] += 1
            m2[pos[ctx.sub(u, h)], col] += 1
        elif p == 2:
            m2[pos[h], col] += 2
        else:
            a = max(ctx.coeffs(h))
            r = max(i for i, c in enumerate(ctx.coeffs(h)) if c)
            if a <= (p - 1) // 2:
                m2[pos[h], col] += 1
                m2[pos[ctx.neg(h)], col] += 1
            else:
                x_r = ctx.from_coeffs(tuple(1 if j == r else 0 for j in range(ell)))
                m2[pos[h], col] += 1
                m2[pos[ctx.neg(x_r)], col] += 1
                m2[pos[ctx.sub(x_r, h)], col] += 1

    return IdenticalBases(
        B1=LatticeBasis(m1, abs(det_bareiss(m1))),
        B2=LatticeBasis(m2, abs(det_bareiss(m2))),
    )


def _orbit_partition(ctx: FieldCtx, mu: int) -> list[list[int]]:
    """Orbits of F_q* under repeated multiplication by mu, starting each orbit
    at its first uncovered element in f-order."""
    seen: set[int] = set()
    orbits = []
    for h in ctx.f_order:
        if h in seen:
            continue
        orb = [h]
        g = ctx.mul(mu, h)
        while g != h:
            orb.append(g)
            g = ctx.mul(mu, g)
        seen.update(orb)
        orbits.append(orb)
    return orbits


def _normalize_case(ctx: FieldCtx, coeffs: tuple[int, ...]):
    """Pick (1, chi2, chi3) from the (globally scaled) coefficient multiset so
    that chi3 != 1 and one of the case guards applies, preferring case 1, 2, 3
    in that order."""
    values = sorted(set(coeffs))
    counts = {v: coeffs.count(v) for v in values}
    minus_one = ctx.neg(1)
    triples = []
    for v1 in values:
        inv1 = ctx.inv(v1)
        for v2 in values:
            if counts[v2] < 1 + (v2 == v1):
                continue
            for v3 in values:
                if counts[v3] < 1 + (v3 == v1) + (v3 == v2):
                    continue
                c2, c3 = ctx.mul(inv1, v2), ctx.mul(inv1, v3)
                if c3 == 1:
                    continue
                triples.append((c2, c3, v1, v2, v3))
    for case in (1, 2, 3):
        for c2, c3, *_ in triples:
            if case == 1 and ctx.p == 2 and c2 == 1:
                return case, c2, c3
            if case == 2 and ctx.p != 2 and c2 == minus_one:
                return case, c2, c3
            if case == 3 and c2 != minus_one:
                return case, c2, c3
    raise BadInput(f"no case ordering found for coefficients {coeffs}")  # unreachable


def basis_general(ctx: FieldCtx, coeffs) -> LatticeBasis:
    """Orbit basis for a coefficient multiset with >= 2 distinct values:
    per orbit of the case multiplier, chained pair vectors plus one triple."""
    coeffs = _check_coeffs(ctx, coeffs)
    if len(set(coeffs)) < 2:
        raise BadInput("coefficients are all equal; use basis_identical")
    case, c2, c3 = _normalize_case(ctx, coeffs)
    if case in (1, 2):
        mu = ctx.inv(c3)
    else:
        mu = ctx.neg(ctx.inv(c2))
    pos = {h: ctx.f_index(h) - 1 for h in ctx.units()}
    cols: list[np.ndarray] = []
    for orb in _orbit_partition(ctx, mu):
        o = len(orb)
        for i in range(o - 1):
            v = np.zeros(ctx.q - 1, dtype=np.int64)
            v[pos[orb[i]]] += 1
            v[pos[orb[i + 1]]] += 1
            cols.append(v)
        v = np.zeros(ctx.q - 1, dtype=np.int64)
        v[pos[orb[0]]] += 1
        v[pos[orb[1 % o]]] += 1
        if case == 1:
            extra = ctx.add(orb[1 % o], orb[2 % o])
        elif case == 2:
            extra = ctx.add(orb[0], orb[0])
        else:
            extra = ctx.mul(ctx.sub(1, c3), orb[0])
        v[pos[extra]] += 1
        cols.append(v)
    matrix = np.stack(cols, axis=1)
    return LatticeBasis(matrix, abs(det_bareiss(matrix)))


# -- verification ---------------------------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    freq_vectors_ok: bool
    hnf_ok: bool
    det_ok: bool
    det_abs: int
    expected_det: int

    @property
    def all_ok(self) -> bool:
        return self.freq_vectors_ok and self.hnf_ok and self.det_ok

    def to_dict(self) -> dict:
        return {
            "freq_vectors_ok": self.freq_vectors_ok,
            "hnf_ok": self.hnf_ok,
            "det_ok": self.det_ok,
            "det_abs": self.det_abs,
            "expected_det": self.expected_det,
            "all_ok": self.all_ok,
        }


def _is_solution_freq(ctx: FieldCtx, coeffs: tuple[int, ...], v: np.ndarray) -> bool:
    """Whether v is the frequency vector of an actual solution.

    Identical coefficients: the defining equation may be padded with zeros to
    any length (the module is k0-independent), so v qualifies iff it is
    nonzero, non-negative, and its weighted field sum vanishes.  Mixed
    coefficients: additionally ||v||_1 <= 3 and the value multiset must embed
    into distinct coefficient slots with vanishing weighted sum.
    """
    if np.any(v < 0) or not np.any(v):
        return False
    values: list[int] = []
    for j, count in enumerate(v):
        values.extend([ctx.f_order[j]] * int(count))
    if len(set(coeffs)) == 1:
        acc = 0
        for s in values:
            acc = ctx.add(acc, s)
        return acc == 0
    if len(values) > 3:
        return False
    for slots in itertools.permutations(range(len(coeffs)), len(values)):
        acc = 0
        for s, t in zip(values, slots):
            acc = ctx.add(acc, ctx.mul(coeffs[t], s))
        if acc == 0:
            return True
    return False


def verify_basis(ctx: FieldCtx, coeffs, basis: LatticeBasis) -> VerifyReport:
    """Check a candidate basis against the brute-force module: (a) every
    column is a genuine solution frequency vector, (b) equal HNFs, (c) the
    determinant matches q^[all coefficients equal]."""
    coeffs = _check_coeffs(ctx, coeffs)
    if basis.matrix.shape != (ctx.q - 1, ctx.q - 1):
        raise BadParameter(f"basis must be square of size {ctx.q - 1}")
    freq_ok = all(
        _is_solution_freq(ctx, coeffs, basis.matrix[:, j])
        for j in range(basis.matrix.shape[1])
    )
    h_basis, _ = hnf(basis.matrix)
    h_brute, det_brute = module_bruteforce(ctx, coeffs)
    hnf_ok = h_basis.shape == h_brute.shape and bool(np.array_equal(h_basis, h_brute))
    expected = ctx.q if len(set(coeffs)) == 1 else 1
    det_ok = basis.det_abs == expected and det_brute == expected
    return VerifyReport(
        freq_vectors_ok=freq_ok,
        hnf_ok=hnf_ok,
        det_ok=det_ok,
        det_abs=basis.det_abs,
        expected_det=expected,
    )


@dataclass(frozen=True)
class IntersectReport:
    ok: bool
    lattice_points: int
    divisible_points: int
    forward_ok: bool  # divisible module points are f_d * (module points)
    converse_ok: bool  # f_d * (module points) are divisible module points
    converse_checked: int

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "lattice_points": self.lattice_points,
            "divisible_points": self.divisible_points,
            "forward_ok": self.forward_ok,
            "converse_ok": self.converse_ok,
            "converse_checked": self.converse_checked,
        }


def intersect_divisible(ctx: FieldCtx, basis: LatticeBasis, f_d: int) -> IntersectReport:
    """Bounded verification that (module) intersect (f_d Z^(q-1)) equals
    f_d * (module): enumerate combinations with coefficients in [-f_d, f_d]
    (covering the coordinate box of radius 3 f_d q for l1<=3 bases)."""
    if f_d < 1:
        raise BadParameter(f"f_d must be >= 1, got {f_d}")
    if math.gcd(f_d, ctx.q) != 1:
        raise NotCoprime(f"f_d={f_d} shares a factor with q={ctx.q}")
    dim = ctx.q - 1
    width = 2 * f_d + 1
    total = width**dim
    if total > INTERSECT_CAP:
        raise TooLarge(f"{total} combinations exceed the cap {INTERSECT_CAP}")
    B = basis.matrix.astype(np.int64)
    coeff_range = np.arange(-f_d, f_d + 1, dtype=np.int64)
    grids = np.meshgrid(*([coeff_range] * dim), indexing="ij")
    lam = np.stack([g.ravel() for g in grids], axis=1)  # (total, dim)
    points = lam @ B.T
    divisible = np.all(points % f_d == 0, axis=1)
    h_cols, _ = hnf(B)
    forward_ok = all(
        hnf_member(h_cols, points[i] // f_d) for i in np.nonzero(divisible)[0]
    )
    n_conv = min(total, 2048)
    conv_idx = np.linspace(0, total - 1, n_conv).astype(np.int64)
    converse_ok = True
    for i in conv_idx:
        y = f_d * points[i]
        if np.any(y % f_d) or not hnf_member(h_cols, y):
            converse_ok = False
            break
    return IntersectReport(
        ok=forward_ok and converse_ok,
        lattice_points=int(total),
        divisible_points=int(divisible.sum()),
        forward_ok=forward_ok,
        converse_ok=converse_ok,
        converse_checked=int(n_conv),
    )
