"""The threshold functional and the full-row-rank condition.

Everything here is driven by the probability generating functions D, K of the
variable/check degree distributions:

    Phi(z) = D(1 - K'(z)/k) - (d/k) * (1 - K(z) - (1 - z) K'(z)),

with d = E[degree of a variable], k = E[degree of a check].  Phi does not
depend on the field order q or on the coefficient distribution chi; q enters
the full-rank condition only through coprimality with the gcd of the variable
degree support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import degdist as dd
from .degdist import DegreeDist
from .errors import BadParameter, OutOfDomain
from .gf import FieldCtx, field_new

STRICTNESS_MARGIN = 1e-9
Z_MIN = 1e-4


def chi_point(q: int, value: int = 1) -> tuple[tuple[int, float], ...]:
    """Coefficient distribution: point mass at a single unit."""
    if not (1 <= value < q):
        raise BadParameter(f"chi value {value} is not a unit of F_{q}")
    return ((value, 1.0),)


def chi_uniform(q: int) -> tuple[tuple[int, float], ...]:
    """Coefficient distribution: uniform over all units of F_q."""
    return tuple((v, 1.0 / (q - 1)) for v in range(1, q))


@dataclass(frozen=True)
class ModelSpec:
    """Bundle of the random matrix model parameters: variable degrees, check
    degrees, field order, and the distribution of the nonzero coefficients."""

    ddist: DegreeDist
    kdist: DegreeDist
    q: int
    chi: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if self.kdist.min_value < 3:
            raise BadParameter(
                f"check degrees must all be >= 3, got minimum {self.kdist.min_value}"
            )
        field_new(self.q)  # validates q
        probs = [p for _, p in self.chi]
        if abs(sum(probs) - 1.0) > 1e-12 or any(p <= 0 for p in probs):
            raise BadParameter("chi probabilities must be positive and sum to 1")
        if any(not (1 <= v < self.q) for v, _ in self.chi):
            raise BadParameter("chi must be supported on the units of F_q")

    @cached_property
    def field(self) -> FieldCtx:
        return field_new(self.q)

    @cached_property
    def d_mean(self) -> float:
        return float(dd.pgf_d1(self.ddist, 1.0))

    @cached_property
    def k_mean(self) -> float:
        return float(dd.pgf_d1(self.kdist, 1.0))

    @cached_property
    def f_d(self) -> int:
        return dd.gcd_support(self.ddist)

    @cached_property
    def f_k(self) -> int:
        return dd.gcd_support(self.kdist)


@dataclass(frozen=True)
class ConditionReport:
    holds: bool
    coprime: bool
    phi0: float
    max_phi_interior: float
    argmax: float
    margin: float
    boundary_case: bool

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "coprime": self.coprime,
            "phi0": self.phi0,
            "max_phi_interior": self.max_phi_interior,
            "argmax": self.argmax,
            "margin": self.margin,
            "boundary_case": self.boundary_case,
        }


class PhiMax(NamedTuple):
    argmax: float
    value: float


def _check_unit_interval(z) -> None:
    arr = np.asarray(z)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise OutOfDomain(f"z outside [0, 1]: {z!r}")


def phi(spec: ModelSpec, z):
    """Evaluate the threshold functional at z (scalar or ndarray in [0, 1])."""
    _check_unit_interval(z)
    dbar, kbar = spec.d_mean, spec.k_mean
    kd1 = dd.pgf_d1(spec.kdist, z)
    w = 1.0 - kd1 / kbar
    drift = np.asarray(w)
    if np.any(drift < -1e-12) or np.any(drift > 1.0 + 1e-12):
        raise OutOfDomain("pgf argument drifted outside [0, 1] beyond round-off")
    w = np.clip(w, 0.0, 1.0) if isinstance(w, np.ndarray) else min(max(w, 0.0), 1.0)
    k0 = dd.pgf(spec.kdist, z)
    return dd.pgf(spec.ddist, w) - (dbar / kbar) * (1.0 - k0 - (1.0 - z) * kd1)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section search for a maximum on [lo, hi]; deterministic."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def _scan_max(f, lo: float, hi: float, grid_points: int, refine_tol: float):
    """Uniform grid scan plus golden-section refinement around every
    grid-local maximum; returns the best (argmax, value)."""
    zs = np.linspace(lo, hi, grid_points)
    vals = np.asarray(f(zs))
    candidates: list[tuple[float, float]] = [
        (float(zs[0]), float(vals[0])),
        (float(zs[-1]), float(vals[-1])),
    ]
    interior = np.nonzero(
        (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
    )[0]
    for i in interior + 1:
        x, v = _golden_max(f, float(zs[i - 1]), float(zs[i + 1]), refine_tol)
        candidates.append((x, v))
        candidates.append((float(zs[i]), float(vals[i])))
    # endpoints can hide one-sided maxima
    if vals[0] >= vals[1]:
        x, v = _golden_max(f, float(zs[0]), float(zs[1]), refine_tol)
        candidates.append((x, v))
    if vals[-1] >= vals[-2]:
        x, v = _golden_max(f, float(zs[-2]), float(zs[-1]), refine_tol)
        candidates.append((x, v))
    best_v = max(v for _, v in candidates)
    # near-ties (within float noise of each other) resolve to the smallest z,
    # so a flat shoulder next to an endpoint reports the endpoint itself
    best_x = min(x for x, v in candidates if v >= best_v - 1e-12)
    return best_x, best_v


def phi_max(spec: ModelSpec, grid_points: int = 4001, refine_tol: float = 1e-9) -> PhiMax:
    """Global maximum of Phi over [0, 1] (deterministic grid + golden section)."""
    if grid_points < 1000:
        raise BadParameter(f"grid_points must be >= 1000, got {grid_points}")
    if not (0 < refine_tol <= 1e-6):
        raise BadParameter(f"refine_tol must lie in (0, 1e-6], got {refine_tol!r}")
    x, v = _scan_max(lambda z: phi(spec, z), 0.0, 1.0, grid_points, refine_tol)
    return PhiMax(argmax=x, value=v)


def condition_check(spec: ModelSpec, grid_points: int = 4001, refine_tol: float = 1e-9) -> ConditionReport:
    """Decide the strict-maximum-at-zero condition with a numeric margin.

    Competing maximizers are the golden-refined interior local maxima of Phi
    on (Z_MIN, 1) and the endpoint z = 1.  Since every valid spec has check
    degrees >= 3, Phi(0) - Phi(z) ~ c z^3 > 0 near zero, so the approach of
    Phi(z) to Phi(0) as z -> 0 is continuity, not a competing maximum; the
    region (0, Z_MIN] therefore only enters through a violation guard: its
    values (20 geometric probe points plus the z = Z_MIN grid endpoint) are
    counted iff they exceed Phi(0).  Within STRICTNESS_MARGIN of zero margin
    the boundary_case flag is raised and holds is refused.
    """
    coprime = math.gcd(spec.q, spec.f_d) == 1
    phi0 = float(phi(spec, 0.0))

    f = lambda z: phi(spec, z)
    zs = np.linspace(Z_MIN, 1.0, grid_points)
    vals = np.asarray(f(zs))
    candidates: list[tuple[float, float]] = [(1.0, float(vals[-1]))]
    # a competing interior maximum must rise by more than the margin above the
    # running minimum to its left; the continuity shoulder at z -> 0 (where
    # Phi hugs Phi(0) to within float noise) never does
    runmin = np.minimum.accumulate(vals)
    interior = np.nonzero((vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:]))[0]
    for i in interior + 1:
        if vals[i] - runmin[i - 1] <= STRICTNESS_MARGIN:
            continue
        x, v = _golden_max(f, float(zs[i - 1]), float(zs[i + 1]), refine_tol)
        candidates.append((x, v))
        candidates.append((float(zs[i]), float(vals[i])))
    if vals[-1] >= vals[-2]:
        x, v = _golden_max(f, float(zs[-2]), 1.0, refine_tol)
        candidates.append((x, v))
    # violation guard below Z_MIN (and at the left grid edge)
    probes = np.geomspace(Z_MIN * 1e-4, Z_MIN, 20)
    pv = np.asarray(f(probes))
    for z, v in zip(probes, pv):
        if v > phi0 + STRICTNESS_MARGIN:
            candidates.append((float(z), float(v)))
    if vals[0] > phi0 + STRICTNESS_MARGIN:
        candidates.append((float(zs[0]), float(vals[0])))

    x, v = candidates[0]
    for cx, cv in candidates[1:]:
        if cv > v:
            x, v = cx, cv
    margin = phi0 - v
    boundary = abs(margin) <= STRICTNESS_MARGIN
    holds = coprime and margin > STRICTNESS_MARGIN
    return ConditionReport(
        holds=holds,
        coprime=coprime,
        phi0=phi0,
        max_phi_interior=v,
        argmax=x,
        margin=margin,
        boundary_case=boundary,
    )


def normalized_rank(spec: ModelSpec) -> float:
    """Limit of rank(A)/n: 1 - max of Phi over [0, 1]."""
    return 1.0 - phi_max(spec).value


def xorsat_threshold(k: int, q: int = 2, tol: float = 1e-6) -> float:
    """Largest density d such that the Poisson(d)/fixed-k model satisfies the
    full-rank condition, located by bisection; boundary cases count as fails."""
    if not isinstance(k, int) or k < 3:
        raise BadParameter(f"k must be an integer >= 3, got {k!r}")
    if not (0 < tol <= 1e-4):
        raise BadParameter(f"tol must lie in (0, 1e-4], got {tol!r}")
    kdist = dd.dist_fixed(k)

    def holds(d: float) -> bool:
        spec = ModelSpec(dd.dist_poisson(d, 1e-12), kdist, q, chi_point(q, 1))
        rep = condition_check(spec)
        return rep.holds and not rep.boundary_case

    lo, hi = 1e-3, float(k)
    if not holds(lo):
        raise BadParameter(f"condition already fails at d={lo}")
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tilde_phi(spec: ModelSpec, delta: float, alpha, beta):
    """Two-variable functional governing the ternary-row augmentation:
    Phi(alpha) + (exp(-3 delta beta^2) - 1) D(1 - K'(alpha)/k)
    - delta + 3 delta beta^2 - 2 delta beta^3."""
    if not (0 < delta <= 0.1):
        raise BadParameter(f"delta must lie in (0, 0.1], got {delta!r}")
    _check_unit_interval(alpha)
    _check_unit_interval(beta)
    kbar = spec.k_mean
    w = 1.0 - dd.pgf_d1(spec.kdist, alpha) / kbar
    w = np.clip(w, 0.0, 1.0) if isinstance(w, np.ndarray) else min(max(w, 0.0), 1.0)
    d_term = dd.pgf(spec.ddist, w)
    b2 = np.asarray(beta) ** 2 if isinstance(beta, np.ndarray) else beta * beta
    b3 = b2 * beta
    return (
        phi(spec, alpha)
        + (np.exp(-3.0 * delta * b2) - 1.0) * d_term
        - delta
        + 3.0 * delta * b2
        - 2.0 * delta * b3
    )


def tilde_phi_max(spec: ModelSpec, delta: float, grid: int = 200, refine_tol: float = 1e-10):
    """Maximize tilde Phi over the unit square: grid scan plus coordinate-wise
    golden-section refinement.  Returns (alpha*, beta*, value)."""
    if not (0 < delta <= 0.1):
        raise BadParameter(f"delta must lie in (0, 0.1], got {delta!r}")
    alphas = np.linspace(0.0, 1.0, grid)
    betas = np.linspace(0.0, 1.0, grid)
    phi_a = np.asarray(phi(spec, alphas))
    kbar = spec.k_mean
    w = np.clip(1.0 - dd.pgf_d1(spec.kdist, alphas) / kbar, 0.0, 1.0)
    d_a = np.asarray(dd.pgf(spec.ddist, w))
    b2 = betas**2
    b3 = betas**3
    vals = (
        phi_a[None, :]
        + (np.exp(-3.0 * delta * b2)[:, None] - 1.0) * d_a[None, :]
        - delta
        + (3.0 * delta * b2 - 2.0 * delta * b3)[:, None]
    )
    bi, ai = np.unravel_index(int(np.argmax(vals)), vals.shape)
    a, b = float(alphas[ai]), float(betas[bi])
    best = float(vals[bi, ai])
    step = 1.0 / (grid - 1)
    for _ in range(3):
        lo, hi = max(0.0, a - step), min(1.0, a + step)
        a, _ = _golden_max(lambda x: float(tilde_phi(spec, delta, x, b)), lo, hi, refine_tol)
        lo, hi = max(0.0, b - step), min(1.0, b + step)
        b, _ = _golden_max(lambda y: float(tilde_phi(spec, delta, a, y)), lo, hi, refine_tol)
    v = float(tilde_phi(spec, delta, a, b))
    if v < best:
        a, b = float(alphas[ai]), float(betas[bi])
        v = best
    return a, b, v
