import itertools
import math

import numpy as np
import pytest

import latticeamp as la
from conftest import gaussian_matrix, inverse_gaussian_basis


def box_search_cvp(h, y, center, half_width=3):
    """Exhaustive search over the integer box center +- half_width, ties
    resolved to the lexicographically smallest candidate."""
    grids = np.meshgrid(*[np.arange(c - half_width, c + half_width + 1) for c in center],
                        indexing="ij")
    cand = np.stack([g.ravel() for g in grids], axis=1).astype(np.float64)
    d = np.linalg.norm(y[None, :] - cand @ h.T, axis=1)
    ties = np.where(d <= d.min() + 1e-12)[0]
    order = ties[np.lexsort(tuple(cand[ties, i] for i in range(cand.shape[1] - 1, -1, -1)))]
    return cand[order[0]].astype(np.int64), float(d.min())


def test_identity_rounding():
    inst = la.CvpInstance(basis=la.LatticeBasis(np.eye(2)), target=np.array([0.2, 0.7]))
    x, _ = la.sphere_cvp(inst)
    assert np.array_equal(x, [0, 1])


def test_tie_is_lexicographic():
    inst = la.CvpInstance(basis=la.LatticeBasis(np.eye(2)), target=np.array([0.5, 0.0]))
    x, _ = la.sphere_cvp(inst)
    assert np.array_equal(x, [0, 0])


def test_matches_box_oracle(rng):
    # reduced coordinates keep the optimum inside the Babai +-3 box
    for _ in range(200):
        h = gaussian_matrix(rng, 4, 4)
        y = 3.0 * rng.standard_normal(4)
        red = la.lll_reduce(la.LatticeBasis(h)).reduced
        inst = la.CvpInstance(basis=red, target=y)
        x, _ = la.sphere_cvp(inst)
        center = la.babai_nearest_plane(inst)
        x_ref, d_ref = box_search_cvp(red.mat, y, center)
        assert inst.residual(x) <= d_ref + 1e-9
        assert np.array_equal(x, x_ref)


def test_radius_behaviour(rng):
    h = gaussian_matrix(rng, 3, 3)
    y = rng.standard_normal(3)
    inst = la.CvpInstance(basis=la.LatticeBasis(h), target=y)
    x, _ = la.sphere_cvp(inst)
    d = inst.residual(x)
    x2, _ = la.sphere_cvp(inst, radius=d * 1.5 + 0.1)
    assert np.array_equal(x, x2)
    with pytest.raises(la.RadiusTooSmallError):
        la.sphere_cvp(inst, radius=d * 0.5)


def test_tall_instance_orthogonal_offset(rng):
    h = gaussian_matrix(rng, 6, 3)
    y = rng.standard_normal(6)
    inst = la.CvpInstance(basis=la.LatticeBasis(h), target=y)
    x, _ = la.sphere_cvp(inst)
    center = la.babai_nearest_plane(inst)
    x_ref, _ = box_search_cvp(h, y, center)
    assert np.array_equal(x, x_ref)


def test_node_counts_identity():
    n = 5
    inst = la.CvpInstance(basis=la.LatticeBasis(np.eye(n)), target=np.full(n, 0.3))
    _, stats = la.sphere_cvp(inst)
    assert np.array_equal(stats.nodes_per_layer, np.ones(n, dtype=np.int64))
    assert stats.flops == sum(2 * k + 7 for k in range(1, n + 1))


def test_flops_formula(rng):
    h = inverse_gaussian_basis(rng, 5)
    inst = la.CvpInstance(basis=la.LatticeBasis(h), target=rng.standard_normal(5))
    _, stats = la.sphere_cvp(inst)
    manual = sum((2 * k + 7) * int(c) for k, c in enumerate(stats.nodes_per_layer, start=1))
    assert stats.flops == manual


def test_dominates_suboptimal(rng):
    for _ in range(50):
        h = inverse_gaussian_basis(rng, 5)
        y = rng.standard_normal(5)
        inst = la.CvpInstance(basis=la.LatticeBasis(h), target=y)
        x, _ = la.sphere_cvp(inst)
        d = inst.residual(x)
        assert d <= inst.residual(la.zf_decode(inst)) + 1e-9
        assert d <= inst.residual(la.sic_decode(inst)) + 1e-9


def test_reduced_basis_speedup(rng):
    wins = 0
    trials = 100
    for _ in range(trials):
        h = inverse_gaussian_basis(rng, 8)
        y = rng.standard_normal(8)
        basis = la.LatticeBasis(h)
        inst = la.CvpInstance(basis=basis, target=y)
        _, stats_raw = la.sphere_cvp(inst)
        red = la.lll_reduce(basis).reduced
        _, stats_red = la.sphere_cvp(la.CvpInstance(basis=red, target=y))
        if stats_red.total_nodes <= stats_raw.total_nodes:
            wins += 1
    assert wins >= 0.9 * trials


def test_shortest_vector():
    v, ln = la.shortest_vector(np.eye(4))
    assert ln == pytest.approx(1.0, abs=1e-12)
    assert np.count_nonzero(v) == 1
    b = np.array([[2.0, 1.0], [0.0, 1.0]])
    v, ln = la.shortest_vector(b)
    assert ln == pytest.approx(math.sqrt(2.0), rel=1e-12)
    _, ln3 = la.shortest_vector(3.0 * b)
    assert ln3 == pytest.approx(3.0 * ln, rel=1e-12)


def test_shortest_vector_brute_force(rng):
    for _ in range(20):
        h = inverse_gaussian_basis(rng, 3)
        v, ln = la.shortest_vector(h)
        best = min(
            np.linalg.norm(h @ np.array(c, dtype=np.float64))
            for c in itertools.product(range(-5, 6), repeat=3)
            if any(c)
        )
        assert ln == pytest.approx(best, rel=1e-9)
        assert np.linalg.norm(h @ v.astype(np.float64)) == pytest.approx(best, rel=1e-9)


def test_successive_minima():
    assert la.successive_minima(np.eye(6), 3) == pytest.approx(1.0, abs=1e-12)
    assert la.successive_minima(np.diag([1.0, 3.0]), 2) == pytest.approx(3.0, rel=1e-12)
    b = np.array([[2.0, 1.0], [0.0, 1.0]])
    _, l1 = la.shortest_vector(b)
    assert la.successive_minima(b, 1) == pytest.approx(l1, rel=1e-12)


def test_successive_minima_guard():
    with pytest.raises(la.DimensionTooLargeError):
        la.successive_minima(np.eye(13), 1)
