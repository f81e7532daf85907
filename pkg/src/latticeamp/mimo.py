"""Massive-MIMO uplink detection experiments.

The uplink model is y = H x + w with an m x n standard normal channel,
symbols uniform on {-M..M} and white noise. Tall channels are naturally
short and orthogonal lattice bases, so the hybrid refinement runs without
lattice reduction: a linear first pass (LMMSE by default), then AMP on the
shifted residual exactly as in the precoding phase 2.

SNR convention: SNR_dB = 10 log10(sigma_s^2 / noise_var) per receive
antenna, where sigma_s^2 = M(M+1)/3 is the uniform-constellation power.
Doubling the noise variance shifts curves by exactly 3.01 dB on this axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .amp import AmpConfig, PriorModel, amp_solve
from .enumeration import CvpInstance, sphere_cvp, successive_minima_list
from .errors import DimensionTooLargeError, InvalidDimensionError
from .estimators import lmmse_decode, zf_decode
from .linalg import LatticeBasis, coherence, orthogonality_defect
from .reduction import ReductionMethod, reduce_basis
from .vpsim import SerCurve, SerPoint, _run_parallel

_FIRST_PASS = ("zf", "lmmse", "none")


def constellation_power(big_m: int) -> float:
    """Average power of symbols uniform on {-M..M}: M(M+1)/3."""
    return big_m * (big_m + 1) / 3.0


def noise_var_for_snr(snr_db: float, big_m: int) -> float:
    return constellation_power(big_m) * 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class DetectorSpec:
    """A detection chain: linear first pass plus optional AMP refinement."""

    name: str
    first_pass: str  # 'zf' | 'lmmse' | 'none'
    prior: PriorModel | None = None
    amp_iterations: int = 20
    amp_tau1_sq: float = 1e4
    amp_noise_var: float | None = None

    def __post_init__(self):
        if self.first_pass not in _FIRST_PASS:
            raise InvalidDimensionError(f"first_pass must be one of {_FIRST_PASS}")
        if self.first_pass == "none" and self.prior is None:
            raise InvalidDimensionError("a chain needs a first pass or an AMP stage")


def detector(first_pass: str, prior: PriorModel | None = None,
             name: str | None = None, **kwargs) -> DetectorSpec:
    """DetectorSpec factory with conventional naming (LMMSE+AMPT, AMPG, ...)."""
    if name is None:
        suffix = None
        if prior is not None:
            suffix = {"ternary": "AMPT", "gaussian": "AMPG", "dgaussian": "AMPD"}[prior.kind]
        if first_pass == "none":
            name = suffix
        else:
            name = first_pass.upper() + (f"+{suffix}" if suffix else "")
    return DetectorSpec(name=name, first_pass=first_pass, prior=prior, **kwargs)


@dataclass(frozen=True)
class DetectScenario:
    """Full experiment description for the uplink detection harness."""

    m: int
    n: int
    big_m: int
    snr_grid_db: tuple
    trials: int
    detectors: tuple
    seed: int
    threads: int = 1

    def __post_init__(self):
        if not self.m >= self.n >= 1:
            raise InvalidDimensionError("need m >= n >= 1")
        if self.big_m < 1:
            raise InvalidDimensionError("symbol bound must be >= 1")
        if self.trials < 1:
            raise InvalidDimensionError("trials must be >= 1")
        names = [d.name for d in self.detectors]
        if len(set(names)) != len(names):
            raise InvalidDimensionError("detector names must be unique")
        object.__setattr__(self, "snr_grid_db", tuple(float(v) for v in self.snr_grid_db))
        object.__setattr__(self, "detectors", tuple(self.detectors))


def _amp_refine(basis: LatticeBasis, y: np.ndarray, x1: np.ndarray, det: DetectorSpec):
    shifted = y - basis.mat @ x1.astype(np.float64)
    resid_sq = float(shifted @ shifted)
    if resid_sq < 1e-30:
        return x1
    noise_var = det.amp_noise_var if det.amp_noise_var is not None else resid_sq / basis.rows**1.5
    cfg = AmpConfig(noise_var=noise_var, iterations=det.amp_iterations,
                    tau1_sq=det.amp_tau1_sq)
    trace = amp_solve(CvpInstance(basis=basis, target=shifted), det.prior, cfg)
    return x1 + trace.x_amp


def run_detector(det: DetectorSpec, basis: LatticeBasis, y: np.ndarray,
                 noise_var: float, big_m: int) -> np.ndarray:
    """One chain on one instance; the decision is clamped to the constellation."""
    n = basis.cols
    if det.first_pass == "zf":
        x1 = zf_decode(CvpInstance(basis=basis, target=y))
    elif det.first_pass == "lmmse":
        x1 = lmmse_decode(basis, y, noise_var, constellation_power(big_m))
    else:
        x1 = np.zeros(n, dtype=np.int64)
    if det.prior is not None:
        x1 = _amp_refine(basis, y, x1, det)
    return np.clip(x1, -big_m, big_m)


def _detect_chunk(scenario: DetectScenario, snr_idx: int, start: int, stop: int):
    n_det = len(scenario.detectors)
    errors = np.zeros(n_det, dtype=np.int64)
    detail = np.zeros((stop - start, n_det), dtype=np.int16)
    noise_var = noise_var_for_snr(scenario.snr_grid_db[snr_idx], scenario.big_m)
    for trial in range(start, stop):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=scenario.seed, spawn_key=(snr_idx, trial))
        )
        h = rng.standard_normal((scenario.m, scenario.n))
        x = rng.integers(-scenario.big_m, scenario.big_m + 1, scenario.n)
        w = rng.normal(0.0, math.sqrt(noise_var), scenario.m)
        basis = LatticeBasis(h)
        y = h @ x + w
        for d_idx, det in enumerate(scenario.detectors):
            xhat = run_detector(det, basis, y, noise_var, scenario.big_m)
            errs = int(np.count_nonzero(xhat != x))
            errors[d_idx] += errs
            detail[trial - start, d_idx] = errs
    return errors, detail


def run_detection_sweep(scenario: DetectScenario, return_details: bool = False):
    """Monte Carlo SER for every detector chain over the SNR grid; all
    chains see the same (channel, symbols, noise) stream per trial."""
    curves = {d.name: SerCurve(algorithm=d.name) for d in scenario.detectors}
    details = {}
    denom = scenario.n * scenario.trials
    for snr_idx, snr_db in enumerate(scenario.snr_grid_db):
        parts = _run_parallel(_detect_chunk, (scenario, snr_idx), scenario.trials, scenario.threads)
        errors = sum((p[0] for p in parts), np.zeros(len(scenario.detectors), dtype=np.int64))
        if return_details:
            details[snr_db] = np.vstack([p[1] for p in parts])
        for d_idx, det in enumerate(scenario.detectors):
            curves[det.name].points[snr_db] = SerPoint(
                snr_db=snr_db,
                trials=scenario.trials,
                errors=int(errors[d_idx]),
                ser=errors[d_idx] / denom,
                mean_flops=0.0,
            )
    if return_details:
        return curves, details
    return curves


def _detect_error_chunk(scenario: DetectScenario, snr_idx: int, start: int, stop: int):
    counts = [dict(), dict()]  # zf, lr-zf
    noise_var = noise_var_for_snr(scenario.snr_grid_db[snr_idx], scenario.big_m)
    for trial in range(start, stop):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=scenario.seed, spawn_key=(snr_idx, trial))
        )
        h = rng.standard_normal((scenario.m, scenario.n))
        x = rng.integers(-scenario.big_m, scenario.big_m + 1, scenario.n)
        w = rng.normal(0.0, math.sqrt(noise_var), scenario.m)
        basis = LatticeBasis(h)
        y = h @ x + w
        inst = CvpInstance(basis=basis, target=y)
        x_cvp, _ = sphere_cvp(inst)
        x_zf = zf_decode(inst)
        outcome = reduce_basis(basis, ReductionMethod.bkz_boosted())
        x_lr = outcome.unimodular @ zf_decode(CvpInstance(basis=outcome.reduced, target=y))
        for c, xhat in zip(counts, (x_zf, x_lr)):
            for d in (xhat - x_cvp).tolist():
                c[d] = c.get(d, 0) + 1
    return counts


def detection_error_study(scenario: DetectScenario, snr_db: float):
    """Histogram of detector errors against the exact solution for plain ZF
    and boosted-KZ aided ZF, both in original symbol coordinates."""
    from .vpsim import ErrorHistogram

    if scenario.n > 12:
        raise DimensionTooLargeError("detection_error_study is guarded at n <= 12")
    scen = replace(scenario, snr_grid_db=(float(snr_db),))
    parts = _run_parallel(_detect_error_chunk, (scen, 0), scen.trials, scen.threads)
    merged = {"zf": {}, "lr-zf": {}}
    for part in parts:
        for est, counts in zip(("zf", "lr-zf"), part):
            for d, c in counts.items():
                merged[est][d] = merged[est].get(d, 0) + c
    return ErrorHistogram(counts=merged, samples=scenario.n * scenario.trials)


@dataclass
class NaturalReductionReport:
    """How close raw tall Gaussian channels come to reduced bases.

    minima_match_rate counts trials whose sorted column norms all fall
    within match_rtol of the successive minima; exact_match_rate uses a
    1e-9 tolerance. The gap vanishes as m/n grows, but at moderate aspect
    ratios a loose tolerance is the meaningful sense of "already reduced".
    """

    trials: int
    match_rtol: float
    minima_match_rate: float
    exact_match_rate: float
    median_max_gap: float
    od_before_median: float
    od_after_median: float
    coherence_before_median: float
    coherence_after_median: float


def natural_reduction_check(m: int, n: int, trials: int, seed: int,
                            match_rtol: float = 0.2) -> NaturalReductionReport:
    """Check how nearly tall Gaussian bases attain their successive minima,
    and compare quality metrics against boosted-KZ reduction."""
    if n > 12:
        raise DimensionTooLargeError("natural_reduction_check is guarded at n <= 12")
    if m < n:
        raise InvalidDimensionError("need m >= n")
    matches = 0
    exact = 0
    gaps = []
    od_before, od_after, coh_before, coh_after = [], [], [], []
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
        basis = LatticeBasis(rng.standard_normal((m, n)))
        minima = successive_minima_list(basis, n)
        gap = float(np.max(np.sort(basis.col_norms) / minima) - 1.0)
        gaps.append(gap)
        matches += int(gap <= match_rtol)
        exact += int(gap <= 1e-9)
        outcome = reduce_basis(basis, ReductionMethod.bkz_boosted())
        od_before.append(orthogonality_defect(basis))
        od_after.append(outcome.od_after)
        if n >= 2:
            coh_before.append(coherence(basis))
            coh_after.append(coherence(outcome.reduced))
    return NaturalReductionReport(
        trials=trials,
        match_rtol=match_rtol,
        minima_match_rate=matches / trials,
        exact_match_rate=exact / trials,
        median_max_gap=float(np.median(gaps)),
        od_before_median=float(np.median(od_before)),
        od_after_median=float(np.median(od_after)),
        coherence_before_median=float(np.median(coh_before)) if coh_before else 0.0,
        coherence_after_median=float(np.median(coh_after)) if coh_after else 0.0,
    )
