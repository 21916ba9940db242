"""Exact arithmetic in F_q for prime powers q = p^ell.

Field elements are plain ints in ``range(q)`` encoding the coefficient
vector of the polynomial basis: the element a0 + a1*X + ... + a_{ell-1}*X^{ell-1}
is stored as the integer a0 + a1*p + ... + a_{ell-1}*p^{ell-1} (base-p digits
are the polynomial coefficients).  Reduction happens modulo a deterministic
irreducible polynomial g, so every int in range(q) is a canonical element.

Besides the arithmetic, this module provides the element-length function
(number of nonzero polynomial coefficients) and the length-monotone indexing
bijection f : F_q* -> {1, ..., q-1} used by the lattice constructions.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property, lru_cache

import numpy as np

from .errors import DivisionByZero, NotPrimePower, Unsupported

MAX_Q = 1024


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _poly_mul_mod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    """Schoolbook product of coefficient lists, reduced mod the monic modulus."""
    ell = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for deg in range(len(prod) - 1, ell - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for k in range(ell + 1):
                prod[deg - ell + k] = (prod[deg - ell + k] - c * modulus[k]) % p
    out = prod[:ell]
    out += [0] * (ell - len(out))
    return out


def _poly_divides(div: list[int], g: list[int], p: int) -> bool:
    """True if the monic polynomial ``div`` divides the monic polynomial ``g`` over F_p."""
    rem = list(g)
    dd = len(div) - 1
    while len(rem) - 1 >= dd:
        lead = rem[-1]
        if lead:
            shift = len(rem) - 1 - dd
            for k in range(dd + 1):
                rem[shift + k] = (rem[shift + k] - lead * div[k]) % p
        rem.pop()
    return not any(rem)


def _is_irreducible(g: list[int], p: int) -> bool:
    """Trial division by all monic polynomials of degree <= deg(g)//2."""
    ell = len(g) - 1
    if ell == 1:
        return True
    if g[0] == 0:  # divisible by X
        return False
    for deg in range(1, ell // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            div = list(tail) + [1]
            if _poly_divides(div, g, p):
                return False
    return True


def _smallest_irreducible(p: int, ell: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible polynomial of degree ell,
    coefficient tuples (a0, ..., a_{ell-1}) compared low-degree first."""
    for tail in itertools.product(range(p), repeat=ell):
        g = list(tail) + [1]
        if _is_irreducible(g, p):
            return tuple(g)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldCtx:
    """Immutable arithmetic context for F_q.  Use :func:`field_new`."""

    def __init__(self, p: int, ell: int):
        self.p = p
        self.ell = ell
        self.q = p**ell
        self.modulus: tuple[int, ...] = _smallest_irreducible(p, ell)
        if not _is_irreducible(list(self.modulus), p):
            raise AssertionError("modulus is reducible")
        self._pow_p = tuple(p**i for i in range(ell + 1))

    def __repr__(self) -> str:
        return f"FieldCtx(q={self.q}, p={self.p}, ell={self.ell}, g={list(self.modulus)})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldCtx)
            and (self.p, self.ell, self.modulus) == (other.p, other.ell, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.ell, self.modulus))

    # -- element encoding ---------------------------------------------------

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Polynomial-basis coefficients (a0, ..., a_{ell-1}) of an element."""
        out = []
        for _ in range(self.ell):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        a = 0
        for i, c in enumerate(coeffs):
            a += (c % self.p) * self._pow_p[i]
        return a

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    # -- arithmetic ---------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.ell == 1:
            return (a + b) % self.p
        out = 0
        for i in range(self.ell):
            da = (a // self._pow_p[i]) % self.p
            db = (b // self._pow_p[i]) % self.p
            out += ((da + db) % self.p) * self._pow_p[i]
        return out

    def neg(self, a: int) -> int:
        if self.ell == 1:
            return (-a) % self.p
        out = 0
        for i in range(self.ell):
            da = (a // self._pow_p[i]) % self.p
            out += ((-da) % self.p) * self._pow_p[i]
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        log, exp = self._log_exp
        return exp[(log[a] + log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero in F_q")
        log, exp = self._log_exp
        return exp[(-log[a]) % (self.q - 1)]

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        log, exp = self._log_exp
        return exp[(log[a] * e) % (self.q - 1)]

    def scalar(self, c: int) -> int:
        """The element c*1 (the image of the integer c under the prime subfield)."""
        return c % self.p

    # -- discrete logs ------------------------------------------------------

    @cached_property
    def _log_exp(self) -> tuple[list[int], list[int]]:
        q, p = self.q, self.p
        g = list(self.modulus)
        factors = _factorize(q - 1) if q > 2 else {}

        def order_is_full(cand: int) -> bool:
            for r in factors:
                e = (q - 1) // r
                # cand^e by square-and-multiply on coefficient lists
                base = list(self.coeffs(cand))
                acc = [1] + [0] * (self.ell - 1)
                k = e
                while k:
                    if k & 1:
                        acc = _poly_mul_mod(acc, base, g, p)
                    base = _poly_mul_mod(base, base, g, p)
                    k >>= 1
                if self.from_coeffs(acc) == 1:
                    return False
            return True

        gen = next(c for c in range(1, q) if order_is_full(c))
        exp = [0] * (q - 1)
        log = [0] * q
        cur = [1] + [0] * (self.ell - 1)
        gen_c = list(self.coeffs(gen))
        for t in range(q - 1):
            v = self.from_coeffs(cur)
            exp[t] = v
            log[v] = t
            cur = _poly_mul_mod(cur, gen_c, g, p)
        return log, exp

    # -- numpy operation tables (used by the dense linear algebra) ----------

    @cached_property
    def table_dtype(self):
        return np.uint8 if self.q <= 256 else np.uint16

    @cached_property
    def add_table(self) -> np.ndarray:
        q, p = self.q, self.p
        idx = np.arange(q)
        out = np.zeros((q, q), dtype=np.int64)
        for i in range(self.ell):
            da = (idx // self._pow_p[i]) % p
            out += ((da[:, None] + da[None, :]) % p) * self._pow_p[i]
        return out.astype(self.table_dtype)

    @cached_property
    def neg_table(self) -> np.ndarray:
        q, p = self.q, self.p
        idx = np.arange(q)
        out = np.zeros(q, dtype=np.int64)
        for i in range(self.ell):
            da = (idx // self._pow_p[i]) % p
            out += ((-da) % p) * self._pow_p[i]
        return out.astype(self.table_dtype)

    @cached_property
    def sub_table(self) -> np.ndarray:
        return np.ascontiguousarray(self.add_table[:, self.neg_table])

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        log, exp = self._log_exp
        loga = np.array(log, dtype=np.int64)
        expa = np.array(exp, dtype=np.int64)
        out = np.zeros((q, q), dtype=np.int64)
        units = np.arange(1, q)
        out[1:, 1:] = expa[(loga[units][:, None] + loga[units][None, :]) % (q - 1)]
        return out.astype(self.table_dtype)

    @cached_property
    def inv_table(self) -> np.ndarray:
        out = np.zeros(self.q, dtype=self.table_dtype)
        for a in range(1, self.q):
            out[a] = self.inv(a)
        return out

    # -- length and indexing ------------------------------------------------

    def element_len(self, h: int) -> int:
        """Number of nonzero polynomial-basis coefficients; 0 iff h = 0."""
        n = 0
        p = self.p
        while h:
            h, r = divmod(h, p)
            n += r != 0
        return n

    @cached_property
    def f_order(self) -> tuple[int, ...]:
        """Units ordered by the indexing bijection: position i-1 holds f^{-1}(i).

        f is length-monotone decreasing.  Length classes >= 2 come first
        (largest length first, ascending lexicographic coefficient order
        inside a class); length-one elements occupy the tail exactly via
        f(a*X^i) = q - 1 - (ell - i)(p - 1) + a.
        """
        p, ell, q = self.p, self.ell, self.q
        long_elems = sorted(
            (h for h in range(1, q) if self.element_len(h) >= 2),
            key=lambda h: (-self.element_len(h), self.coeffs(h)),
        )
        order = [0] * (q - 1)
        for pos, h in enumerate(long_elems):
            order[pos] = h
        for i in range(ell):
            for a in range(1, p):
                f = q - 1 - (ell - i) * (p - 1) + a
                order[f - 1] = a * self._pow_p[i]
        return tuple(order)

    @cached_property
    def _f_index(self) -> dict[int, int]:
        return {h: i + 1 for i, h in enumerate(self.f_order)}

    def f_index(self, h: int) -> int:
        """f(h) for a unit h."""
        return self._f_index[h]


@lru_cache(maxsize=None)
def field_new(q: int) -> FieldCtx:
    """Build the arithmetic context for F_q.

    The modulus is the lexicographically smallest monic irreducible polynomial
    of degree ell over F_p (coefficients compared low-degree first), so the
    context is deterministic.  Contexts are cached: they are immutable and
    their operation tables are expensive to rebuild.
    """
    if not isinstance(q, int) or q < 2:
        raise NotPrimePower(f"q={q!r} is not a prime power >= 2")
    if q > MAX_Q:
        raise Unsupported(f"q={q} exceeds the supported cap {MAX_Q}")
    factors = _factorize(q)
    if len(factors) != 1:
        raise NotPrimePower(f"q={q} has prime factorization {factors}")
    ((p, ell),) = factors.items()
    return FieldCtx(p, ell)


def add(ctx: FieldCtx, a: int, b: int) -> int:
    return ctx.add(a, b)


def mul(ctx: FieldCtx, a: int, b: int) -> int:
    return ctx.mul(a, b)


def neg(ctx: FieldCtx, a: int) -> int:
    return ctx.neg(a)


def inv(ctx: FieldCtx, a: int) -> int:
    return ctx.inv(a)


def element_len(ctx: FieldCtx, h: int) -> int:
    return ctx.element_len(h)


def index_f(ctx: FieldCtx) -> dict[int, int]:
    """The indexing bijection F_q* -> {1, ..., q-1} as a mapping."""
    return dict(ctx._f_index)


def prime_powers_upto(limit: int) -> list[int]:
    """All prime powers q with 2 <= q <= limit, ascending."""
    out = []
    for q in range(2, limit + 1):
        if len(_factorize(q)) == 1:
            out.append(q)
    return out


def gcd_pair(a: int, b: int) -> int:
    return math.gcd(a, b)
