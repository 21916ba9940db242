import itertools

import numpy as np
import pytest

from sparserank import lattice
from sparserank.errors import BadInput, BadParameter, NotCoprime, TooLarge
from sparserank.gf import field_new, prime_powers_upto

A7_PRINTED = np.array(
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 1],
        [0, 0, 1, 0, 1, 0],
        [0, 0, 1, 2, 0, 0],
        [0, 1, 0, 0, 1, 0],
        [1, 0, 0, 1, 1, 2],
    ],
    dtype=np.int64,
)


def coeff_classes_up_to_scaling(ctx, k0):
    """All unit-coefficient multisets of size k0, one representative per
    global-scaling orbit."""
    seen = set()
    reps = []
    for tup in itertools.combinations_with_replacement(ctx.units(), k0):
        canon = min(
            tuple(sorted(ctx.mul(c, x) for x in tup)) for c in ctx.units()
        )
        if canon not in seen:
            seen.add(canon)
            reps.append(canon)
    return reps


def test_solutions_q2_parity():
    ctx = field_new(2)
    ss = lattice.solutions(ctx, (1, 1, 1))
    assert ss.sols.shape == (4, 3)
    assert all(int(s.sum()) % 2 == 0 for s in ss.sols)


def test_solutions_counts_and_zero():
    for q, k0 in [(3, 3), (4, 4), (5, 3)]:
        ctx = field_new(q)
        ss = lattice.solutions(ctx, tuple([1] * k0))
        assert ss.sols.shape == (q ** (k0 - 1), k0)
        assert not ss.sols[0].any()  # contains the zero tuple


def test_solutions_q3_all_ones_tuple():
    ctx = field_new(3)
    ss = lattice.solutions(ctx, (1, 1, 1))
    assert any((s == 1).all() for s in ss.sols)


def test_solutions_satisfy_equation():
    ctx = field_new(9)
    coeffs = (1, 3, 7)
    ss = lattice.solutions(ctx, coeffs)
    for s in ss.sols[:50]:
        acc = 0
        for c, x in zip(coeffs, s):
            acc = ctx.add(acc, ctx.mul(c, int(x)))
        assert acc == 0


def test_solutions_cap():
    with pytest.raises(TooLarge):
        lattice.solutions(field_new(128), (1, 1, 1, 1))


def test_freq_vector():
    ctx = field_new(3)
    assert np.array_equal(lattice.freq_vector(ctx, (0, 0, 0)), np.zeros(2, dtype=np.int64))
    # f is the identity on prime fields: position 0 is value 1, position 1 is 2
    assert np.array_equal(lattice.freq_vector(ctx, (1, 2, 0)), np.array([1, 1]))


def test_freq_vector_weighted_sum_vanishes_for_solutions():
    ctx = field_new(4)
    ss = lattice.solutions(ctx, (1, 1, 1))
    for s in ss.sols:
        v = lattice.freq_vector(ctx, s)
        acc = 0
        for j, count in enumerate(v):
            for _ in range(int(count)):
                acc = ctx.add(acc, ctx.f_order[j])
        assert acc == 0


def test_hnf_identity():
    h, det = lattice.hnf(np.eye(4, dtype=int))
    assert np.array_equal(h, np.eye(4, dtype=int))
    assert det == 1


def test_hnf_paper_2x2_example():
    # module spanned by columns (1,1) and (0,3)
    cols = np.array([[1, 0], [1, 3]])
    h, det = lattice.hnf(cols)
    assert det == 3
    # invariance under permutation and duplication of generators
    h2, det2 = lattice.hnf(np.array([[0, 1, 1], [3, 1, 4]]))
    assert np.array_equal(h, h2) and det2 == 3


def test_hnf_member():
    cols = np.array([[1, 0], [1, 3]])
    h, _ = lattice.hnf(cols)
    assert lattice.hnf_member(h, (1, 1))
    assert lattice.hnf_member(h, (0, 3))
    assert lattice.hnf_member(h, (2, -1))
    assert not lattice.hnf_member(h, (0, 1))
    assert not lattice.hnf_member(h, (1, 0))


def test_module_bruteforce_examples():
    _, det = lattice.module_bruteforce(field_new(3), (1, 1, 1))
    assert det == 3
    _, det = lattice.module_bruteforce(field_new(5), (1, 2, 3))
    assert det == 1
    h, det = lattice.module_bruteforce(field_new(2), (1, 1, 1))
    assert det == 2
    assert np.array_equal(h, np.array([[2]]))


def test_module_bruteforce_k0_independence():
    for q in (2, 3, 4, 5):
        ctx = field_new(q)
        base = None
        for k0 in (3, 4, 5):
            h, det = lattice.module_bruteforce(ctx, tuple([1] * k0))
            assert det == q
            if base is None:
                base = h
            else:
                assert np.array_equal(base, h)


def test_basis_identical_dets_all_prime_powers_up_to_64():
    for q in prime_powers_upto(64):
        bases = lattice.basis_identical(field_new(q))
        assert bases.B1.det_abs == q, f"det(M_{q}) != {q}"
        assert bases.B2.det_abs == q, f"det(A_{q}) != {q}"


def test_basis_identical_a2_m2():
    bases = lattice.basis_identical(field_new(2))
    assert np.array_equal(bases.B1.matrix, np.array([[2]]))
    assert np.array_equal(bases.B2.matrix, np.array([[2]]))


def test_basis_identical_a7_matches_printed_matrix():
    bases = lattice.basis_identical(field_new(7))
    assert np.array_equal(bases.B2.matrix, A7_PRINTED)


def test_basis_identical_b2_vectors_are_short_solutions():
    for q in (2, 3, 4, 5, 7, 8, 9, 16, 25, 27):
        ctx = field_new(q)
        bases = lattice.basis_identical(ctx)
        for v in bases.B2.vectors:
            assert np.all(v >= 0)
            assert v.sum() <= 3
            acc = 0
            for j, count in enumerate(v):
                for _ in range(int(count)):
                    acc = ctx.add(acc, ctx.f_order[j])
            assert acc == 0  # weighted field sum vanishes (valid solution)


def test_basis_identical_b1_weighted_sums_vanish():
    for q in (4, 9, 8, 27):
        ctx = field_new(q)
        for v in lattice.basis_identical(ctx).B1.vectors:
            acc = 0
            for j, count in enumerate(v):
                for _ in range(int(count)):
                    acc = ctx.add(acc, ctx.f_order[j])
            assert acc == 0


def test_basis_general_rejects_identical():
    with pytest.raises(BadInput):
        lattice.basis_general(field_new(5), (2, 2, 2))


def test_basis_general_q3_example():
    ctx = field_new(3)
    basis = lattice.basis_general(ctx, (1, 1, 2))
    assert basis.matrix.shape == (2, 2)
    assert basis.det_abs == 1
    h, _ = lattice.hnf(basis.matrix)
    assert np.array_equal(h, np.eye(2, dtype=np.int64))
    hb, detb = lattice.module_bruteforce(ctx, (1, 1, 2))
    assert np.array_equal(h, hb) and detb == 1


def test_basis_general_vectors_short_nonneg():
    ctx = field_new(8)
    basis = lattice.basis_general(ctx, (1, 3, 5))
    assert basis.matrix.shape == (7, 7)
    for v in basis.vectors:
        assert np.all(v >= 0)
        assert 2 <= v.sum() <= 3


def test_verify_basis_identical_all_small_q():
    for q in (2, 3, 4, 5, 7, 8, 9):
        ctx = field_new(q)
        bases = lattice.basis_identical(ctx)
        for b in (bases.B1, bases.B2):
            rep = lattice.verify_basis(ctx, (1, 1, 1), b)
            assert rep.all_ok, (q, rep)


def test_verify_basis_general_exhaustive_small():
    for q in (3, 4, 5, 7):
        ctx = field_new(q)
        for coeffs in coeff_classes_up_to_scaling(ctx, 3):
            if len(set(coeffs)) == 1:
                continue
            basis = lattice.basis_general(ctx, coeffs)
            rep = lattice.verify_basis(ctx, coeffs, basis)
            assert rep.all_ok, (q, coeffs, rep)


def test_verify_basis_scaled_fails_det():
    ctx = field_new(5)
    bases = lattice.basis_identical(ctx)
    doubled = bases.B2.matrix.copy()
    doubled[:, 0] *= 2
    bad = lattice.LatticeBasis(doubled, abs(lattice.det_bareiss(doubled)))
    rep = lattice.verify_basis(ctx, (1, 1, 1), bad)
    assert not rep.det_ok
    assert not rep.all_ok


def test_intersect_divisible_trivial_fd1():
    ctx = field_new(3)
    basis = lattice.basis_identical(ctx).B2
    rep = lattice.intersect_divisible(ctx, basis, 1)
    assert rep.ok


def test_intersect_divisible_q3_fd2():
    ctx = field_new(3)
    basis = lattice.basis_identical(ctx).B2
    rep = lattice.intersect_divisible(ctx, basis, 2)
    assert rep.ok
    assert rep.divisible_points >= 1  # at least the origin


def test_intersect_divisible_not_coprime():
    ctx = field_new(3)
    basis = lattice.basis_identical(ctx).B2
    with pytest.raises(NotCoprime):
        lattice.intersect_divisible(ctx, basis, 3)
    with pytest.raises(BadParameter):
        lattice.intersect_divisible(ctx, basis, 0)
