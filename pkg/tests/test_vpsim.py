import numpy as np
import pytest

import latticeamp as la
from conftest import paired_not_worse


def test_generate_channel_deterministic():
    a = la.generate_channel(6, 4, np.random.default_rng(42))
    b = la.generate_channel(6, 4, np.random.default_rng(42))
    assert a.shape == (4, 6)
    assert np.array_equal(a, b)


def test_generate_channel_moments():
    rng = np.random.default_rng(7)
    draws = la.generate_channel(1000, 1000, rng)
    n = draws.size
    assert abs(draws.mean()) <= 4.0 / np.sqrt(n)
    assert 0.99 <= draws.var() <= 1.01


def test_build_cvp_identity_cases():
    inst = la.build_cvp(np.eye(3), np.zeros(3, dtype=int), big_m=4)
    assert np.allclose(inst.target, 0.0)
    inst2 = la.build_cvp(np.eye(2), np.array([1, 0]), big_m=2)
    assert np.allclose(inst2.basis.mat, 2.0 * np.eye(2))
    assert np.allclose(inst2.target, [1.0, 0.0])
    x, _ = la.sphere_cvp(inst2)
    assert np.array_equal(x, [0, 0])  # tie against (1,0) resolved lexicographically
    assert inst2.residual(x) <= np.linalg.norm(inst2.target) + 1e-12


def test_transmit_and_recover_noiseless():
    s = np.array([3, 0, 7])
    shat = la.transmit_and_recover(2.5, s, big_m=8, noise_var=0.0,
                                   rng=np.random.default_rng(0))
    assert np.array_equal(shat, s)


def test_transmit_and_recover_scalar_threshold():
    class FixedNoise:
        def __init__(self, w):
            self.w = np.atleast_1d(np.asarray(w, dtype=np.float64))

        def normal(self, loc, scale, size):
            return self.w * scale

    # sub-half noise keeps the symbol, super-half flips it to the neighbour
    shat = la.transmit_and_recover(1.0, np.array([3]), 32, 0.16, FixedNoise(1.0))
    assert shat[0] == 3  # noise 0.4
    shat = la.transmit_and_recover(1.0, np.array([3]), 32, 0.36, FixedNoise(1.0))
    assert shat[0] == 4  # noise 0.6


def _scenario(**kw):
    defaults = dict(m=6, n=6, big_m=16, snr_grid_db=(40.0,), trials=50,
                    algorithms=(la.vp_algorithm("zf", la.ReductionMethod.blll()),),
                    seed=5)
    defaults.update(kw)
    return la.VpScenario(**defaults)


def test_hybrid_precode_no_amp_returns_phase1(rng):
    b = rng.standard_normal((5, 5))
    inst = la.build_cvp(b, rng.integers(0, 8, 5), 8)
    alg = la.vp_algorithm("sic", la.ReductionMethod.blll())
    res = la.hybrid_precode(inst, alg)
    assert np.array_equal(res.x, res.phase1_x)
    assert res.residual == res.phase1_residual


def test_hybrid_precode_lattice_target_zero_correction(rng):
    b = rng.standard_normal((4, 4))
    basis = la.LatticeBasis(la.pseudo_inverse(b) * 8)
    x_true = rng.integers(-3, 4, 4)
    inst = la.CvpInstance(basis=basis, target=basis.mat @ x_true)
    alg = la.vp_algorithm("zf", la.ReductionMethod.blll(), la.PriorModel.ternary())
    res = la.hybrid_precode(inst, alg)
    assert res.residual <= 1e-9
    assert np.array_equal(res.x, res.phase1_x)  # phase 2 adds nothing


def test_hybrid_precode_coordinates_consistent(rng):
    b = rng.standard_normal((6, 6))
    inst = la.build_cvp(b, rng.integers(0, 32, 6), 32)
    alg = la.vp_algorithm("zf", la.ReductionMethod.blll(), la.PriorModel.ternary())
    res = la.hybrid_precode(inst, alg)
    # mapped-back solution reproduces the reduced-coordinate residual
    assert inst.residual(res.x) == pytest.approx(res.residual, rel=1e-9, abs=1e-12)


def test_hybrid_fitness_dominance(rng):
    # the AMP stage may never worsen the phase-1 residual
    alg = la.vp_algorithm("zf", la.ReductionMethod.blll(), la.PriorModel.ternary())
    for trial in range(500):
        b = rng.standard_normal((8, 8))
        if abs(np.linalg.det(b)) < 1e-6:
            continue
        inst = la.build_cvp(b, rng.integers(0, 32, 8), 32)
        res = la.hybrid_precode(inst, alg)
        assert res.residual <= res.phase1_residual + 1e-9


def test_ser_vanishes_without_noise():
    curves = la.run_ser_sweep(_scenario(snr_grid_db=(200.0,)))
    assert curves["LR-ZF"].points[200.0].ser == 0.0


def test_sphere_not_worse_than_zf_paired():
    algs = (la.vp_algorithm("sphere", la.ReductionMethod.blll()),
            la.vp_algorithm("zf", la.ReductionMethod.blll()))
    scen = _scenario(m=8, n=8, big_m=32, snr_grid_db=(36.0, 40.0), trials=400,
                     algorithms=algs, seed=9)
    curves, details = la.run_ser_sweep(scen, return_details=True)
    for snr in scen.snr_grid_db:
        d = details[snr]
        assert paired_not_worse(d[:, 0], d[:, 1])
        assert curves["LR-SPHERE"].points[snr].errors <= curves["LR-ZF"].points[snr].errors


def test_sweep_deterministic_across_threads():
    scen1 = _scenario(trials=60, threads=1, snr_grid_db=(38.0, 42.0))
    scen2 = _scenario(trials=60, threads=2, snr_grid_db=(38.0, 42.0))
    c1 = la.run_ser_sweep(scen1)
    c2 = la.run_ser_sweep(scen2)
    for snr in scen1.snr_grid_db:
        assert c1["LR-ZF"].points[snr].errors == c2["LR-ZF"].points[snr].errors
        assert c1["LR-ZF"].points[snr].mean_flops == c2["LR-ZF"].points[snr].mean_flops


def test_error_histogram_normalised_and_symmetric():
    scen = _scenario(m=8, n=8, big_m=32, trials=400, seed=4, snr_grid_db=())
    hist = la.error_distance_study(scen)
    for est in ("zf", "sic"):
        probs = hist.probabilities(est)
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-9)
        for d, p in probs.items():
            assert abs(p - probs.get(-d, 0.0)) <= 0.02
        assert probs[0] > 0.5


def test_simulate_trial_records():
    algs = (la.vp_algorithm("sphere", la.ReductionMethod.blll()),
            la.vp_algorithm("zf", la.ReductionMethod.blll(), la.PriorModel.ternary()))
    scen = _scenario(m=6, n=6, big_m=16, snr_grid_db=(40.0,), trials=1,
                     algorithms=algs, seed=3)
    records = la.simulate_trial(scen, 0, 0, solve_cvp=True)
    sphere_rec = records["LR-SPHERE"]
    hybrid_rec = records["LR-ZF+AMPT"]
    assert np.array_equal(sphere_rec.x_hat, sphere_rec.x_cvp)
    # exact search dominates the hybrid, which dominates nothing below it
    assert sphere_rec.e_t <= hybrid_rec.e_t + 1e-9
    assert 0 <= hybrid_rec.symbol_errors <= 6


def test_sphere_dominates_amp_output(rng):
    alg = la.vp_algorithm("zf", la.ReductionMethod.blll(), la.PriorModel.ternary())
    for _ in range(40):
        b = rng.standard_normal((6, 6))
        if abs(np.linalg.det(b)) < 1e-6:
            continue
        inst = la.build_cvp(b, rng.integers(0, 16, 6), 16)
        res = la.hybrid_precode(inst, alg)
        x_cvp, _ = la.sphere_cvp(inst)
        assert inst.residual(x_cvp) <= res.residual + 1e-9


def test_flop_models_and_report():
    assert la.zf_flops(8, 8) == 2 * 8 * 64
    assert la.amp_flops(8, 8, 20) == 20 * (4 * 64 + 8 * 8 + 4 * 8)
    algs = (la.vp_algorithm("zf", la.ReductionMethod.blll()),
            la.vp_algorithm("zf", la.ReductionMethod.blll(), la.PriorModel.ternary(),
                            name="LR-ZF+AMPT"),
            la.vp_algorithm("sphere", la.ReductionMethod.blll()))
    scen = _scenario(algorithms=algs, trials=20, snr_grid_db=())
    report = la.flop_report(scen)
    assert report["LR-ZF"] == la.zf_flops(6, 6)
    assert report["LR-ZF+AMPT"] == la.zf_flops(6, 6) + la.amp_flops(6, 6, 20)
    assert report["LR-SPHERE"] > 0


def test_scenario_validation():
    with pytest.raises(la.InvalidDimensionError):
        _scenario(m=3, n=5)
    with pytest.raises(la.InvalidDimensionError):
        _scenario(big_m=1)
    with pytest.raises(la.InvalidDimensionError):
        la.AlgorithmSpec(name="x", estimator="wat")
