import numpy as np
import pytest

import latticeamp as la


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def gaussian_matrix(rng, m, n):
    return rng.standard_normal((m, n))


def inverse_gaussian_basis(rng, n):
    """The precoding-style ensemble: inverse of a square Gaussian matrix."""
    while True:
        a = rng.standard_normal((n, n))
        if abs(np.linalg.det(a)) > 1e-6:
            return np.linalg.inv(a)


def random_unimodular(rng, n, steps=40):
    """Product of elementary integer column operations, det = +-1 exactly."""
    u = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.integers(0, n, 2)
        if i == j:
            continue
        u[:, j] += int(rng.integers(-2, 3)) * u[:, i]
    if rng.integers(0, 2):
        u[:, 0] = -u[:, 0]
    return u


def bayes_oracle(u, v, points, weights):
    """Direct log-domain posterior mean/variance for a discrete prior under
    additive N(0, v) noise; independent of the closed-form thresholds."""
    logw = np.log(weights) - (points - u) ** 2 / (2.0 * v)
    logw -= logw.max()
    w = np.exp(logw)
    s = w.sum()
    mean = float((w * points).sum() / s)
    var = float((w * (points - mean) ** 2).sum() / s)
    return mean, var


def paired_not_worse(errs_a, errs_b, z=1.96):
    """One-sided paired check that algorithm A is not worse than B: the mean
    per-trial error-count difference must not exceed z standard errors."""
    diff = np.asarray(errs_a, dtype=np.float64) - np.asarray(errs_b, dtype=np.float64)
    se = diff.std(ddof=1) / np.sqrt(diff.shape[0])
    if se == 0.0:
        return diff.mean() <= 0.0
    return diff.mean() <= z * se


def assert_unimodular_outcome(basis_mat, outcome, rel=1e-8):
    u = outcome.unimodular
    assert abs(la.int_det(u)) == 1
    recon = basis_mat @ u.astype(np.float64)
    scale = max(1.0, np.abs(outcome.reduced.mat).max())
    assert np.abs(recon - outcome.reduced.mat).max() <= rel * scale
    g_in = la.gram_determinant(la.LatticeBasis(basis_mat))
    g_out = la.gram_determinant(outcome.reduced)
    assert abs(g_in - g_out) <= 1e-8 * g_in
