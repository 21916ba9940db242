"""Degree distributions with finite support after truncation.

Covers construction (fixed / table / Poisson / power law), probability
generating functions and their first two derivatives, support gcd,
size-biasing and seeded inverse-CDF sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, OutOfDomain

PROB_TOL = 1e-12


@dataclass(frozen=True)
class DegreeDist:
    """Finite distribution on non-negative integers.

    atoms: ((value, prob), ...) with strictly increasing values, probs in
    (0, 1] summing to 1 within 1e-12 after truncation renormalization.
    tail_mass_dropped records the (bound on the) probability mass removed by
    truncating an infinite support, before renormalization.
    """

    atoms: tuple[tuple[int, float], ...]
    tail_mass_dropped: float = 0.0
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.atoms:
            raise BadParameter("empty support")
        values = [v for v, _ in self.atoms]
        probs = [p for _, p in self.atoms]
        if any(v < 0 or not isinstance(v, int) for v in values):
            raise BadParameter(f"values must be non-negative integers: {values[:5]}")
        if any(values[i] >= values[i + 1] for i in range(len(values) - 1)):
            raise BadParameter("values must be strictly increasing")
        if any(p <= 0 or p > 1 for p in probs):
            raise BadParameter("probabilities must lie in (0, 1]")
        if abs(sum(probs) - 1.0) > PROB_TOL:
            raise BadParameter(f"probabilities sum to {sum(probs)!r}, not 1")
        object.__setattr__(self, "_cum", np.cumsum(probs))

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.atoms)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.atoms)

    @property
    def mean(self) -> float:
        return float(sum(v * p for v, p in self.atoms))

    @property
    def second_moment(self) -> float:
        return float(sum(v * v * p for v, p in self.atoms))

    @property
    def min_value(self) -> int:
        return self.atoms[0][0]


def dist_fixed(c: int) -> DegreeDist:
    """Point mass at the integer c."""
    if not isinstance(c, int) or c < 0:
        raise BadParameter(f"fixed degree must be a non-negative integer, got {c!r}")
    return DegreeDist(((c, 1.0),))


def dist_table(pairs) -> DegreeDist:
    """Explicit finite table of (value, prob) pairs."""
    atoms = tuple(sorted((int(v), float(p)) for v, p in pairs))
    total = sum(p for _, p in atoms)
    if abs(total - 1.0) > PROB_TOL:
        raise BadParameter(f"table probabilities sum to {total!r}, not 1")
    # renormalize exactly so downstream identities hold to machine precision
    atoms = tuple((v, p / total) for v, p in atoms)
    return DegreeDist(atoms)


def dist_poisson(mean: float, tol: float = 1e-12) -> DegreeDist:
    """Poisson(mean) truncated at the smallest cutoff with tail mass < tol,
    then renormalized."""
    _check_tol(tol)
    if not mean > 0:
        raise BadParameter(f"Poisson mean must be positive, got {mean!r}")
    pmf = math.exp(-mean)
    probs = [pmf]
    cum = pmf
    v = 0
    while 1.0 - cum >= tol:
        v += 1
        pmf *= mean / v
        probs.append(pmf)
        cum += pmf
        if v > 100_000:
            raise BadParameter("Poisson truncation did not converge")
    dropped = max(1.0 - cum, 0.0)
    atoms = tuple((i, p / cum) for i, p in enumerate(probs))
    return DegreeDist(atoms, tail_mass_dropped=dropped)


def dist_powerlaw(alpha: float, kmin: int = 1, tol: float = 1e-12) -> DegreeDist:
    """P(d = l) proportional to l^-alpha for l >= kmin, truncated once the
    integral tail bound drops below tol, normalized by the truncated sum."""
    _check_tol(tol)
    if not alpha > 3:
        raise BadParameter(f"power-law exponent must exceed 3, got {alpha!r}")
    if not isinstance(kmin, int) or kmin < 1:
        raise BadParameter(f"kmin must be a positive integer, got {kmin!r}")
    weights = []
    partial = 0.0
    v = kmin
    while True:
        w = v ** (-alpha)
        weights.append(w)
        partial += w
        # Sum_{l > v} l^-alpha <= v^(1-alpha)/(alpha-1)
        tail_bound = v ** (1.0 - alpha) / (alpha - 1.0)
        if tail_bound < tol * partial:
            break
        v += 1
        if v - kmin > 10_000_000:
            raise BadParameter("power-law truncation did not converge")
    dropped = tail_bound / (partial + tail_bound)
    atoms = tuple((kmin + i, w / partial) for i, w in enumerate(weights))
    return DegreeDist(atoms, tail_mass_dropped=dropped)


def _check_tol(tol: float) -> None:
    if not (0 < tol <= 1e-8):
        raise BadParameter(f"tol must lie in (0, 1e-8], got {tol!r}")


def _check_domain(x) -> None:
    arr = np.asarray(x)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise OutOfDomain(f"pgf argument outside [0, 1]: {x!r}")


def _horner(pairs: list[tuple[int, float]], x):
    """Evaluate sum coeff * x^exponent over sparse (exponent, coeff) pairs,
    exponents ascending, by Horner's scheme with gap powers."""
    if not pairs:
        return np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0
    acc = None
    prev = None
    for e, c in reversed(pairs):
        if acc is None:
            acc = c if not isinstance(x, np.ndarray) else np.full_like(x, c, dtype=float)
        else:
            acc = acc * x ** (prev - e) + c
        prev = e
    return acc * x**prev if prev else acc


def pgf(dist: DegreeDist, x):
    """D(x) = sum p_v x^v; accepts a scalar or ndarray in [0, 1]."""
    _check_domain(x)
    return _horner([(v, p) for v, p in dist.atoms], x)


def pgf_d1(dist: DegreeDist, x):
    """First derivative of the pgf; D'(1) is the mean."""
    _check_domain(x)
    return _horner([(v - 1, v * p) for v, p in dist.atoms if v >= 1], x)


def pgf_d2(dist: DegreeDist, x):
    """Second derivative of the pgf; D''(1) = E[d(d-1)]."""
    _check_domain(x)
    return _horner([(v - 2, v * (v - 1) * p) for v, p in dist.atoms if v >= 2], x)


def gcd_support(dist: DegreeDist) -> int:
    """gcd of the support values (gcd with 0 is the other argument)."""
    g = 0
    for v in dist.values:
        g = math.gcd(g, v)
    return g


def size_biased(dist: DegreeDist) -> DegreeDist:
    """The distribution of the degree at the endpoint of a random edge:
    P[l] = l * P[d = l] / E[d]."""
    mean = dist.mean
    if mean <= 0:
        raise BadParameter("size-biasing requires positive mean")
    atoms = tuple((v, v * p / mean) for v, p in dist.atoms if v >= 1)
    total = sum(p for _, p in atoms)
    atoms = tuple((v, p / total) for v, p in atoms)
    return DegreeDist(atoms, tail_mass_dropped=dist.tail_mass_dropped)


def sample(dist: DegreeDist, rng: np.random.Generator) -> int:
    """One inverse-CDF draw; identical seed means identical stream."""
    u = rng.random()
    idx = int(np.searchsorted(dist._cum, u, side="right"))
    return dist.values[min(idx, len(dist.atoms) - 1)]


def sample_many(dist: DegreeDist, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized inverse-CDF draws (same method as :func:`sample`)."""
    u = rng.random(size)
    idx = np.minimum(np.searchsorted(dist._cum, u, side="right"), len(dist.atoms) - 1)
    return np.asarray(dist.values, dtype=np.int64)[idx]
