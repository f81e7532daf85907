import math

import numpy as np
import pytest

import latticeamp as la
from conftest import assert_unimodular_outcome, inverse_gaussian_basis


def test_size_reduce_identity():
    out = la.size_reduce(np.eye(4))
    assert np.array_equal(out.unimodular, np.eye(4, dtype=np.int64))
    assert np.allclose(out.reduced.mat, np.eye(4))


def test_size_reduce_single_step():
    b = np.array([[1.0, 0.7], [0.0, 1.0]])
    out = la.size_reduce(b)
    assert np.array_equal(out.unimodular, [[1, -1], [0, 1]])
    assert np.allclose(out.reduced.mat, [[1.0, -0.3], [0.0, 1.0]])
    assert la.verify_size_reduced(out.reduced)
    assert la.gram_determinant(out.reduced) == pytest.approx(la.gram_determinant(la.LatticeBasis(b)), rel=1e-12)


def test_lll_identity():
    out = la.lll_reduce(np.eye(5))
    assert np.array_equal(out.unimodular, np.eye(5, dtype=np.int64))
    assert out.swap_count == 0


def test_lll_2d_example():
    # columns (1,1) and (1,0)
    b = np.array([[1.0, 1.0], [1.0, 0.0]])
    method = la.ReductionMethod.lll()
    out = la.lll_reduce(b, method)
    norms = np.sort(out.reduced.col_norms)
    # exhaustive search over small unimodular transforms: the shortest vector
    # in this lattice has length 1
    assert norms[0] == pytest.approx(1.0, abs=1e-12)
    assert out.od_after <= method.beta
    assert la.verify_lll(out.reduced, method.delta)
    assert_unimodular_outcome(b, out)


def test_lll_property_monte_carlo(rng):
    method = la.ReductionMethod.lll()
    for _ in range(30):
        b = inverse_gaussian_basis(rng, 8)
        out = la.lll_reduce(b, method)
        assert out.od_after <= out.od_before + 1e-9
        assert la.verify_lll(out.reduced, method.delta)
        assert out.od_after <= la.od_bound(method, 8) * (1 + 1e-9)
        assert_unimodular_outcome(b, out)


def test_blll_identity():
    out = la.blll_reduce(np.eye(4))
    assert np.array_equal(out.unimodular, np.eye(4, dtype=np.int64))


def test_blll_2d_example():
    # columns (1,1) and (2,0): the second column must end no longer than sqrt(2)
    b = np.array([[1.0, 2.0], [1.0, 0.0]])
    out = la.blll_reduce(b)
    assert out.reduced.col_norms[1] <= math.sqrt(2.0) + 1e-9
    assert la.verify_diagonal_reduced(out.reduced)
    assert_unimodular_outcome(b, out)


def test_blll_never_longer_than_lll(rng):
    method_b = la.ReductionMethod.blll()
    method_l = la.ReductionMethod.lll()
    for _ in range(30):
        b = inverse_gaussian_basis(rng, 8)
        out_b = la.blll_reduce(b, method_b)
        out_l = la.lll_reduce(b, method_l)
        assert np.all(out_b.reduced.col_norms <= out_l.reduced.col_norms + 1e-9)
        assert la.verify_diagonal_reduced(out_b.reduced, method_b.delta)
        assert_unimodular_outcome(b, out_b)


def test_blll_list_size(rng):
    method = la.ReductionMethod.blll(list_size=4)
    for _ in range(5):
        b = inverse_gaussian_basis(rng, 6)
        out = la.blll_reduce(b, method)
        base = la.lll_reduce(b).reduced.col_norms
        assert np.all(out.reduced.col_norms <= base + 1e-9)
        assert_unimodular_outcome(b, out)


def test_kz_identity():
    out = la.kz_reduce(np.eye(4))
    assert np.array_equal(out.unimodular, np.eye(4, dtype=np.int64))


def test_kz_2d_example():
    # columns (1,1) and (1,0): first output column attains the shortest length 1
    b = np.array([[1.0, 1.0], [1.0, 0.0]])
    out = la.kz_reduce(b)
    assert out.reduced.col_norms[0] == pytest.approx(1.0, abs=1e-9)
    assert la.verify_kz(out.reduced)
    assert_unimodular_outcome(b, out)


def test_kz_od_bound(rng):
    method = la.ReductionMethod.kz()
    for n in (2, 4, 6):
        for _ in range(10):
            b = inverse_gaussian_basis(rng, n)
            out = la.kz_reduce(b)
            assert la.verify_kz(out.reduced)
            assert out.od_after <= la.od_bound(method, n) * (1 + 1e-9)
            assert_unimodular_outcome(b, out)
    with pytest.raises(la.DimensionTooLargeError):
        la.kz_reduce(np.eye(25))


def test_bkz_boosted(rng):
    method = la.ReductionMethod.bkz_boosted()
    for _ in range(15):
        b = inverse_gaussian_basis(rng, 6)
        out_b = la.bkz_boosted_reduce(b)
        out_k = la.kz_reduce(b)
        assert np.all(out_b.reduced.col_norms <= out_k.reduced.col_norms + 1e-9)
        assert la.verify_bkz_boosted(out_b.reduced)
        assert out_b.od_after <= la.od_bound(method, 6) * (1 + 1e-9)
        assert_unimodular_outcome(b, out_b)


def test_verify_lll():
    assert la.verify_lll(np.eye(3), 0.75)
    b = np.array([[1.0, 0.9], [0.0, 0.1]])
    assert not la.verify_lll(b, 0.75)
    out = la.lll_reduce(np.array([[1.0, 1.0], [1.0, 0.0]]))
    assert la.verify_lll(out.reduced, 0.75)


def test_od_bound_values():
    lll = la.ReductionMethod.lll(0.75)
    assert lll.beta == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert la.od_bound(lll, 2) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert la.od_bound(lll, 1) == 1.0
    assert la.od_bound(la.ReductionMethod.kz(), 1) == 1.0
    # KZ bound at n=2: (sqrt(4)/2 * sqrt(5)/2) * (4/3)
    assert la.od_bound(la.ReductionMethod.kz(), 2) == pytest.approx(
        (math.sqrt(4) / 2) * (math.sqrt(5) / 2) * (4.0 / 3.0), rel=1e-12
    )
    assert la.od_bound(la.ReductionMethod.kz(), 2) == pytest.approx(1.4907, abs=5e-5)
    # boosted-KZ bound at n=3: sqrt(3)/2 * prod_{i<3} sqrt(i+3)/2 * 2^{3/2}
    expect = (math.sqrt(3) / 2) * (math.sqrt(4) / 2 * math.sqrt(5) / 2) * (2.0) ** 1.5
    assert la.od_bound(la.ReductionMethod.bkz_boosted(), 3) == pytest.approx(expect, rel=1e-12)


def test_reduction_method_validation():
    with pytest.raises(la.InvalidDimensionError):
        la.ReductionMethod(tag="lll", delta=0.2)
    with pytest.raises(la.InvalidDimensionError):
        la.ReductionMethod(tag="wat")


def test_unimodular_completion(rng):
    for _ in range(50):
        k = int(rng.integers(2, 7))
        z = rng.integers(-9, 10, k)
        g = np.gcd.reduce(np.abs(z))
        if g == 0:
            continue
        z = z // g  # make primitive
        t = la.unimodular_completion(z)
        assert np.array_equal(t[:, 0], z)
        assert abs(la.int_det(t)) == 1


def test_int_det():
    assert la.int_det(np.eye(3, dtype=np.int64)) == 1
    assert la.int_det([[2, 0], [0, 3]]) == 6
    assert la.int_det([[1, 2], [2, 4]]) == 0
    assert la.int_det([[0, 1], [1, 0]]) == -1
