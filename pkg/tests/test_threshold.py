import math

import numpy as np
import pytest

from sparserank import degdist as dd
from sparserank import threshold as th
from sparserank.errors import BadParameter, OutOfDomain


def spec_fixed(d, k, q=2, chi=None):
    return th.ModelSpec(dd.dist_fixed(d), dd.dist_fixed(k), q, chi or th.chi_point(q, 1))


def spec_poisson(d, k, q=2):
    return th.ModelSpec(dd.dist_poisson(d), dd.dist_fixed(k), q, th.chi_point(q, 1))


def spec_identical():
    half = dd.dist_table([(3, 0.5), (4, 0.5)])
    return th.ModelSpec(half, half, 2, th.chi_point(2, 1))


# the degree-12 polynomial printed for the identical-distribution example,
# coefficients of z^3 .. z^12 over the common denominator 4802
_IDENTICAL_POLY = np.array(
    [256, 768, 864, -1808, -4959, -3780, 6111, 10584, -3234, -4802, 0, 0, 0],
    dtype=float,
)


def identical_poly_oracle(z):
    return np.polyval(_IDENTICAL_POLY, z) / 4802.0


def test_model_spec_validation():
    with pytest.raises(BadParameter):
        th.ModelSpec(dd.dist_fixed(3), dd.dist_fixed(2), 2, th.chi_point(2, 1))
    with pytest.raises(BadParameter):
        th.ModelSpec(dd.dist_fixed(3), dd.dist_fixed(3), 3, ((0, 1.0),))
    with pytest.raises(BadParameter):
        th.chi_point(2, 0)


def test_phi_at_zero_is_one_minus_ratio():
    for d, k in [(3, 8), (2, 3), (5, 5)]:
        s = spec_fixed(d, k)
        assert th.phi(s, 0.0) == pytest.approx(1.0 - d / k, abs=1e-12)
    s = spec_poisson(2.5, 3)
    assert th.phi(s, 0.0) == pytest.approx(1.0 - s.d_mean / 3.0, abs=1e-12)


def test_phi_at_one_zero_for_equal_means():
    s = spec_fixed(4, 4, q=3)
    assert th.phi(s, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert th.phi(spec_identical(), 1.0) == pytest.approx(0.0, abs=1e-15)


def test_phi_identical_example_matches_printed_polynomial():
    s = spec_identical()
    assert th.phi(s, 0.5) == pytest.approx(identical_poly_oracle(0.5), abs=1e-12)
    for z in np.linspace(0.0, 1.0, 17):
        assert th.phi(s, float(z)) == pytest.approx(identical_poly_oracle(z), abs=1e-12)


def test_phi_domain():
    s = spec_fixed(3, 8)
    with pytest.raises(OutOfDomain):
        th.phi(s, 1.1)
    with pytest.raises(OutOfDomain):
        th.phi(s, -0.2)


def test_phi_independent_of_q_and_chi():
    d = dd.dist_poisson(2.2)
    k = dd.dist_table([(3, 0.7), (5, 0.3)])
    s1 = th.ModelSpec(d, k, 2, th.chi_point(2, 1))
    s2 = th.ModelSpec(d, k, 9, th.chi_uniform(9))
    zs = np.linspace(0.0, 1.0, 101)
    assert np.array_equal(np.asarray(th.phi(s1, zs)), np.asarray(th.phi(s2, zs)))


def test_phi_max_fixed_3_8():
    s = spec_fixed(3, 8)
    res = th.phi_max(s)
    assert res.argmax == pytest.approx(0.0, abs=1e-6)
    assert res.value == pytest.approx(1.0 - 3.0 / 8.0, abs=1e-12)
    assert th.normalized_rank(s) == pytest.approx(3.0 / 8.0, abs=1e-12)


def test_phi_max_identical_is_zero():
    res = th.phi_max(spec_identical())
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert min(abs(res.argmax - 0.0), abs(res.argmax - 1.0)) < 1e-6


def test_phi_max_powerlaw_decreasing():
    s = th.ModelSpec(dd.dist_powerlaw(3.5, 1), dd.dist_fixed(3), 2, th.chi_point(2, 1))
    res = th.phi_max(s, grid_points=1001)
    assert res.argmax == pytest.approx(0.0, abs=1e-6)
    assert res.value == pytest.approx(th.phi(s, 0.0), abs=1e-12)


def test_phi_max_dominates_grid():
    s = spec_poisson(2.9, 3)
    res = th.phi_max(s)
    zs = np.linspace(0.0, 1.0, 2003)
    assert res.value >= float(np.max(np.asarray(th.phi(s, zs)))) - 1e-15
    assert res.value >= max(th.phi(s, 0.0), th.phi(s, 1.0)) - 1e-15


def test_normalized_rank_poisson29_grid_oracle():
    # independent oracle: plain grid maximization at 1e5+1 points
    s = spec_poisson(2.9, 3)
    zs = np.linspace(0.0, 1.0, 100_001)
    ref = 1.0 - float(np.max(np.asarray(th.phi(s, zs))))
    got = th.normalized_rank(s)
    assert got == pytest.approx(ref, abs=1e-7)
    assert got < 1.0 - th.STRICTNESS_MARGIN  # above threshold: not full rank


def test_condition_zerorowsums_not_coprime():
    s = spec_fixed(4, 8, q=2)
    rep = th.condition_check(s)
    assert not rep.coprime
    assert not rep.holds


def test_condition_poisson25_holds():
    rep = th.condition_check(spec_poisson(2.5, 3))
    assert rep.coprime
    assert rep.holds
    assert not rep.boundary_case
    assert rep.margin > th.STRICTNESS_MARGIN


def test_condition_poisson29_fails():
    rep = th.condition_check(spec_poisson(2.9, 3))
    assert rep.coprime
    assert not rep.holds
    assert rep.margin < 0


def test_condition_identical_boundary():
    rep = th.condition_check(spec_identical())
    assert not rep.holds
    assert rep.boundary_case
    assert abs(rep.max_phi_interior - rep.phi0) <= th.STRICTNESS_MARGIN


def test_condition_fixed_d_lt_k_holds_d_eq_k_boundary():
    assert th.condition_check(spec_fixed(3, 8, q=2)).holds
    rep = th.condition_check(spec_fixed(3, 3, q=2))
    assert not rep.holds
    assert rep.boundary_case


def test_holds_implies_rank_saturation():
    for s in (spec_fixed(3, 8), spec_poisson(2.5, 3)):
        rep = th.condition_check(s)
        assert rep.holds
        assert th.normalized_rank(s) == pytest.approx(s.d_mean / s.k_mean, abs=1e-12)


def test_xorsat_threshold_k3():
    dstar = th.xorsat_threshold(3, tol=1e-5)
    assert 2.74 <= dstar <= 2.76


def test_xorsat_threshold_bisection_contract():
    tol = 1e-4
    dstar = th.xorsat_threshold(3, tol=tol)

    def holds(d):
        s = spec_poisson(d, 3)
        rep = th.condition_check(s)
        return rep.holds and not rep.boundary_case

    assert holds(dstar - 10 * tol)
    assert not holds(dstar + 10 * tol)


def test_xorsat_threshold_nested_brackets():
    coarse = th.xorsat_threshold(3, tol=1e-4)
    fine = th.xorsat_threshold(3, tol=1e-5)
    assert abs(fine - coarse) <= 1e-4


def test_xorsat_threshold_k7_above_fig1_density():
    # grid oracle: the Poisson(6.5)/K(z)=z^7 instance satisfies the condition.
    # Phi(0) - Phi(z) ~ 5.6 z^7 near zero, so the shoulder only clears 1e-6
    # beyond z ~ 0.11; competing maxima live far right, scan [0.2, 1].
    s = spec_poisson(6.5, 7)
    zs = np.linspace(0.2, 1.0, 100_001)
    assert th.phi(s, 0.0) > float(np.max(np.asarray(th.phi(s, zs)))) + 1e-6
    assert th.xorsat_threshold(7, tol=1e-4) > 6.5


def test_xorsat_threshold_rejects():
    with pytest.raises(BadParameter):
        th.xorsat_threshold(2)
    with pytest.raises(BadParameter):
        th.xorsat_threshold(3, tol=1e-3)


def test_tilde_phi_corner_values():
    s = spec_poisson(2.5, 3)
    delta = 1e-3
    want = 1.0 - s.d_mean / s.k_mean - delta
    assert th.tilde_phi(s, delta, 0.0, 0.0) == pytest.approx(want, abs=1e-12)
    for alpha in (0.0, 0.25, 0.8, 1.0):
        assert th.tilde_phi(s, delta, alpha, 0.0) == pytest.approx(
            th.phi(s, alpha) - delta, abs=1e-12
        )


def test_tilde_phi_max_at_origin_for_holding_spec():
    s = spec_poisson(2.5, 3)
    delta = 1e-3
    a, b, v = th.tilde_phi_max(s, delta)
    assert v == pytest.approx(1.0 - s.d_mean / s.k_mean - delta, abs=1e-6)
    assert a == pytest.approx(0.0, abs=1e-2)
    assert b == pytest.approx(0.0, abs=1e-2)


def test_tilde_phi_domain():
    s = spec_poisson(2.5, 3)
    with pytest.raises(BadParameter):
        th.tilde_phi(s, 0.0, 0.5, 0.5)
    with pytest.raises(OutOfDomain):
        th.tilde_phi(s, 1e-3, 1.5, 0.5)


def test_phi0_randomized_specs():
    rng = np.random.default_rng(7)
    for _ in range(20):
        kmin = int(rng.integers(3, 7))
        kvals = sorted(set(int(v) for v in rng.integers(kmin, kmin + 5, size=3)))
        kprobs = rng.dirichlet(np.ones(len(kvals)))
        kdist = dd.dist_table(list(zip(kvals, kprobs.tolist())))
        if rng.random() < 0.5:
            ddist = dd.dist_poisson(float(rng.uniform(0.5, 5.0)))
        else:
            dvals = sorted(set(int(v) for v in rng.integers(1, 9, size=3)))
            dprobs = rng.dirichlet(np.ones(len(dvals)))
            ddist = dd.dist_table(list(zip(dvals, dprobs.tolist())))
        s = th.ModelSpec(ddist, kdist, 2, th.chi_point(2, 1))
        assert th.phi(s, 0.0) == pytest.approx(1.0 - s.d_mean / s.k_mean, abs=1e-12)
