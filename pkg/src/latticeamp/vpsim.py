"""Vector-perturbation Monte Carlo: SER sweeps, error histograms, flops.

A trial draws a channel B (n x m, standard normal entries) and a symbol
vector s in {0..M-1}^n, forms the decoding problem with target y = pinv(B) s
and basis H = M pinv(B), and precodes by choosing an integer perturbation x.
The transmit normalisation is E_t = ||y - H x||, and the receiver recovers
s from round(s + E_t w) mod M, so smaller residuals mean fewer symbol
errors. SNR here is defined as SNR_dB = -10 log10(noise_var) against the
unit-power transmit normalisation.

All randomness is derived per (snr index, trial index) from the scenario
seed, so results are byte-identical regardless of worker count; per-trial
channels, symbols and noise are shared by every algorithm under comparison.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .amp import AmpConfig, PriorModel, amp_solve
from .enumeration import CvpInstance, sphere_cvp
from .errors import DimensionTooLargeError, InvalidDimensionError
from .estimators import sic_decode, zf_decode
from .linalg import LatticeBasis, pseudo_inverse, round_half_away_int
from .reduction import ReductionMethod, reduce_basis

SPHERE = "sphere"
_ESTIMATORS = ("zf", "sic", SPHERE)

# Model flop charges (decoding only; reduction is shared preprocessing and
# not billed). ZF/SIC: one m x n solve, 2mn^2. AMP: two matrix-vector
# products per iteration (2mn each) plus elementwise threshold/residual
# work. Sphere precoding is billed from the nodes the classic fixed-radius
# search visits (2k+7 per node in layer k); the shrinking decoder would
# understate the baseline's cost by orders of magnitude at large n.
def zf_flops(m: int, n: int) -> int:
    return 2 * m * n * n


def sic_flops(m: int, n: int) -> int:
    return 2 * m * n * n


def amp_flops(m: int, n: int, iterations: int) -> int:
    return iterations * (4 * m * n + 8 * n + 4 * m)


@dataclass(frozen=True)
class AlgorithmSpec:
    """One precoding algorithm in a sweep: an estimator, an optional
    reduction preprocessing step, and an optional AMP refinement stage."""

    name: str
    estimator: str
    reduction: ReductionMethod | None = None
    prior: PriorModel | None = None
    amp_iterations: int = 20
    amp_tau1_sq: float = 1e4
    amp_noise_var: float | None = None  # default: residual^2 / m^1.5

    def __post_init__(self):
        if self.estimator not in _ESTIMATORS:
            raise InvalidDimensionError(f"estimator must be one of {_ESTIMATORS}")
        if self.amp_iterations < 1:
            raise InvalidDimensionError("amp_iterations must be >= 1")


def vp_algorithm(estimator: str, reduction: ReductionMethod | None = None,
                 prior: PriorModel | None = None, name: str | None = None,
                 **kwargs) -> AlgorithmSpec:
    """AlgorithmSpec factory with conventional naming (LR-ZF, LR-SIC+AMPT, ...)."""
    if name is None:
        name = estimator.upper()
        if reduction is not None:
            name = "LR-" + name
        if prior is not None:
            suffix = {"ternary": "AMPT", "gaussian": "AMPG", "dgaussian": "AMPD"}[prior.kind]
            name = f"{name}+{suffix}"
    return AlgorithmSpec(name=name, estimator=estimator, reduction=reduction,
                         prior=prior, **kwargs)


@dataclass(frozen=True)
class VpScenario:
    """Full experiment description for the vector-perturbation harness."""

    m: int
    n: int
    big_m: int
    snr_grid_db: tuple
    trials: int
    algorithms: tuple
    seed: int
    threads: int = 1

    def __post_init__(self):
        if not self.m >= self.n >= 1:
            raise InvalidDimensionError("need m >= n >= 1")
        if self.big_m < 2:
            raise InvalidDimensionError("constellation size must be >= 2")
        if self.trials < 1:
            raise InvalidDimensionError("trials must be >= 1")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise InvalidDimensionError("algorithm names must be unique")
        object.__setattr__(self, "snr_grid_db", tuple(float(v) for v in self.snr_grid_db))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))


@dataclass
class TrialRecord:
    """One algorithm's outcome on one trial: the transmit normalisation,
    the chosen perturbation, the exact reference (when solved), and the
    symbol errors after recovery."""

    e_t: float
    x_hat: np.ndarray
    x_cvp: np.ndarray | None
    symbol_errors: int


@dataclass
class SerPoint:
    snr_db: float
    trials: int
    errors: int
    ser: float
    mean_flops: float


@dataclass
class SerCurve:
    """Per-SNR error statistics of one algorithm."""

    algorithm: str
    points: dict = field(default_factory=dict)  # snr_db -> SerPoint


def generate_channel(m: int, n: int, rng) -> np.ndarray:
    """n x m channel matrix with independent standard normal entries."""
    return rng.standard_normal((n, m))


def build_cvp(b, s, big_m: int) -> CvpInstance:
    """Lift a channel/symbol pair to the decoding problem: target pinv(B) s,
    basis M pinv(B)."""
    s = np.asarray(s, dtype=np.float64).ravel()
    binv = pseudo_inverse(b)
    return CvpInstance(basis=LatticeBasis(big_m * binv), target=binv @ s)


def transmit_and_recover(e_t: float, s, big_m: int, noise_var: float, rng) -> np.ndarray:
    """Simulate the receive chain for a perturbation with normalisation e_t.

    The scaled receive signal is s - Mx + E_t w elementwise; rounding and
    reducing mod M removes the perturbation, so recovery only depends on s,
    E_t and the noise.
    """
    s = np.asarray(s, dtype=np.int64).ravel()
    w = rng.normal(0.0, math.sqrt(noise_var), s.shape[0])
    return round_half_away_int(s + e_t * w) % big_m


def _phase1(inst: CvpInstance, estimator: str):
    m, n = inst.basis.rows, inst.basis.cols
    if estimator == "zf":
        return zf_decode(inst), zf_flops(m, n)
    if estimator == "sic":
        return sic_decode(inst), sic_flops(m, n)
    # classic fixed-radius search: same optimum, and its visited nodes are
    # what sphere precoding gets billed in the complexity comparison
    x, stats = sphere_cvp(inst, shrink=False)
    return x, stats.flops


def _phase2(inst: CvpInstance, x1, alg: AlgorithmSpec):
    """AMP refinement on the shifted target; the zero-correction baseline in
    the fitness trace guarantees the result never worsens the residual."""
    m, n = inst.basis.rows, inst.basis.cols
    shifted = inst.target - inst.basis.mat @ x1.astype(np.float64)
    resid_sq = float(shifted @ shifted)
    if resid_sq < 1e-30:
        return x1, 0
    noise_var = alg.amp_noise_var if alg.amp_noise_var is not None else resid_sq / m**1.5
    cfg = AmpConfig(noise_var=noise_var, iterations=alg.amp_iterations,
                    tau1_sq=alg.amp_tau1_sq)
    trace = amp_solve(CvpInstance(basis=inst.basis, target=shifted), alg.prior, cfg)
    return x1 + trace.x_amp, amp_flops(m, n, alg.amp_iterations)


@dataclass
class PrecodeResult:
    """Hybrid precoder output in original coordinates, with residuals and
    the model flop charge (reduction excluded)."""

    x: np.ndarray
    phase1_x: np.ndarray
    flops: int
    residual: float
    phase1_residual: float


def _precode_reduced(inst_red: CvpInstance, alg: AlgorithmSpec):
    """Solve in reduced coordinates; returns (x_red, phase1_x_red, flops)."""
    x1, flops = _phase1(inst_red, alg.estimator)
    if alg.prior is None:
        return x1, x1, flops
    x2, extra = _phase2(inst_red, x1, alg)
    return x2, x1, flops + extra


def hybrid_precode(inst: CvpInstance, alg: AlgorithmSpec) -> PrecodeResult:
    """Reduce, run the phase-1 estimator in reduced coordinates, optionally
    refine with AMP, and map the perturbation back through the unimodular
    transform."""
    if alg.reduction is not None:
        outcome = reduce_basis(inst.basis, alg.reduction)
        inst_red = CvpInstance(basis=outcome.reduced, target=inst.target)
        u = outcome.unimodular
    else:
        inst_red = inst
        u = np.eye(inst.basis.cols, dtype=np.int64)
    x_red, x1_red, flops = _precode_reduced(inst_red, alg)
    return PrecodeResult(
        x=u @ x_red,
        phase1_x=u @ x1_red,
        flops=int(flops),
        residual=inst_red.residual(x_red),
        phase1_residual=inst_red.residual(x1_red),
    )


def _reduction_key(method: ReductionMethod):
    return (method.tag, method.delta, method.list_size)


def _trial_instances(scenario: VpScenario, rng):
    """Draw one trial's channel and symbols, build the decoding problem and
    the reduced variants each algorithm needs."""
    b = generate_channel(scenario.m, scenario.n, rng)
    s = rng.integers(0, scenario.big_m, scenario.n)
    inst = build_cvp(b, s, scenario.big_m)
    reduced = {}
    for alg in scenario.algorithms:
        if alg.reduction is None:
            continue
        key = _reduction_key(alg.reduction)
        if key not in reduced:
            outcome = reduce_basis(inst.basis, alg.reduction)
            reduced[key] = CvpInstance(basis=outcome.reduced, target=inst.target)
    return s, inst, reduced


def _ser_chunk(scenario: VpScenario, snr_idx: int, start: int, stop: int):
    """Trials [start, stop) at one SNR point; returns per-algorithm error
    and flop totals plus per-trial error counts for paired statistics."""
    n_alg = len(scenario.algorithms)
    errors = np.zeros(n_alg, dtype=np.int64)
    flops = np.zeros(n_alg, dtype=np.int64)
    detail = np.zeros((stop - start, n_alg), dtype=np.int16)
    snr_db = scenario.snr_grid_db[snr_idx]
    sigma_w = 10.0 ** (-snr_db / 20.0)
    for trial in range(start, stop):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=scenario.seed, spawn_key=(snr_idx, trial))
        )
        s, inst, reduced = _trial_instances(scenario, rng)
        noise = rng.standard_normal(scenario.n)
        for a_idx, alg in enumerate(scenario.algorithms):
            inst_a = reduced[_reduction_key(alg.reduction)] if alg.reduction else inst
            x_red, _, fl = _precode_reduced(inst_a, alg)
            e_t = inst_a.residual(x_red)
            shat = round_half_away_int(s + e_t * sigma_w * noise) % scenario.big_m
            errs = int(np.count_nonzero(shat != s))
            errors[a_idx] += errs
            flops[a_idx] += fl
            detail[trial - start, a_idx] = errs
    return errors, flops, detail


def _run_parallel(fn, args_common, total: int, threads: int):
    """Split [0, total) into chunks, run fn(*args_common, start, stop) and
    return partial results in chunk order (order-insensitive reductions stay
    deterministic regardless of scheduling)."""
    if threads <= 1:
        return [fn(*args_common, 0, total)]
    n_chunks = min(total, threads * 4)
    bounds = np.linspace(0, total, n_chunks + 1, dtype=int)
    ranges = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
    _kernels.warmup()
    with ProcessPoolExecutor(max_workers=threads) as ex:
        futures = [ex.submit(fn, *args_common, a, b) for a, b in ranges]
        return [f.result() for f in futures]


def simulate_trial(scenario: VpScenario, snr_idx: int, trial: int,
                   solve_cvp: bool = False):
    """Replay a single trial of a sweep and return {algorithm: TrialRecord};
    handy for inspecting individual channels. With solve_cvp the exact
    reference solution (in the algorithm's reduced coordinates) is attached.
    """
    snr_db = scenario.snr_grid_db[snr_idx]
    sigma_w = 10.0 ** (-snr_db / 20.0)
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=scenario.seed, spawn_key=(snr_idx, trial))
    )
    s, inst, reduced = _trial_instances(scenario, rng)
    noise = rng.standard_normal(scenario.n)
    records = {}
    for alg in scenario.algorithms:
        inst_a = reduced[_reduction_key(alg.reduction)] if alg.reduction else inst
        x_red, _, _ = _precode_reduced(inst_a, alg)
        e_t = inst_a.residual(x_red)
        shat = round_half_away_int(s + e_t * sigma_w * noise) % scenario.big_m
        x_cvp = sphere_cvp(inst_a)[0] if solve_cvp else None
        records[alg.name] = TrialRecord(
            e_t=e_t, x_hat=x_red, x_cvp=x_cvp,
            symbol_errors=int(np.count_nonzero(shat != s)),
        )
    return records


def run_ser_sweep(scenario: VpScenario, return_details: bool = False):
    """Monte Carlo SER for every algorithm over the SNR grid.

    Returns {algorithm name: SerCurve}; with return_details also returns
    {snr_db: per-trial error count matrix} for paired comparisons.
    """
    curves = {alg.name: SerCurve(algorithm=alg.name) for alg in scenario.algorithms}
    details = {}
    denom = scenario.n * scenario.trials
    for snr_idx, snr_db in enumerate(scenario.snr_grid_db):
        parts = _run_parallel(_ser_chunk, (scenario, snr_idx), scenario.trials, scenario.threads)
        errors = sum((p[0] for p in parts), np.zeros(len(scenario.algorithms), dtype=np.int64))
        flops = sum((p[1] for p in parts), np.zeros(len(scenario.algorithms), dtype=np.int64))
        if return_details:
            details[snr_db] = np.vstack([p[2] for p in parts])
        for a_idx, alg in enumerate(scenario.algorithms):
            curves[alg.name].points[snr_db] = SerPoint(
                snr_db=snr_db,
                trials=scenario.trials,
                errors=int(errors[a_idx]),
                ser=errors[a_idx] / denom,
                mean_flops=flops[a_idx] / scenario.trials,
            )
    if return_details:
        return curves, details
    return curves


@dataclass
class ErrorHistogram:
    """Distribution of phase-1 error distances against the exact solution,
    per estimator, in the reduced coordinates the refinement stage sees."""

    counts: dict  # estimator -> {distance: count}
    samples: int  # coordinates observed per estimator

    def probabilities(self, estimator: str) -> dict:
        c = self.counts[estimator]
        return {d: c[d] / self.samples for d in sorted(c)}


def _error_chunk(scenario: VpScenario, estimators: tuple, start: int, stop: int):
    counts = [dict() for _ in estimators]
    reduction = scenario.algorithms[0].reduction
    for trial in range(start, stop):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=scenario.seed, spawn_key=(0, trial))
        )
        _, inst, reduced = _trial_instances(scenario, rng)
        inst_red = reduced[_reduction_key(reduction)] if reduction else inst
        x_cvp, _ = sphere_cvp(inst_red)
        for e_idx, est in enumerate(estimators):
            xhat = zf_decode(inst_red) if est == "zf" else sic_decode(inst_red)
            for d in (xhat - x_cvp).tolist():
                counts[e_idx][d] = counts[e_idx].get(d, 0) + 1
    return counts


def error_distance_study(scenario: VpScenario, estimators=("zf", "sic")) -> ErrorHistogram:
    """Histogram of phase-1 coordinate errors relative to the sphere
    decoder, drawn from noise-free (channel, symbol) pairs.

    The reduction comes from the scenario's first algorithm (boosted LLL
    when the scenario carries none).
    """
    if scenario.n > 20:
        raise DimensionTooLargeError("error_distance_study is guarded at n <= 20")
    reduction = scenario.algorithms[0].reduction if scenario.algorithms else ReductionMethod.blll()
    scen = replace(scenario, algorithms=(vp_algorithm("zf", reduction),))
    parts = _run_parallel(_error_chunk, (scen, tuple(estimators)),
                          scenario.trials, scenario.threads)
    merged = {est: {} for est in estimators}
    for part in parts:
        for est, counts in zip(estimators, part):
            for d, c in counts.items():
                merged[est][d] = merged[est].get(d, 0) + c
    return ErrorHistogram(counts=merged, samples=scenario.n * scenario.trials)


def flop_report(scenario: VpScenario) -> dict:
    """Mean decoding flops per algorithm over noise-free trials.

    ZF/SIC and AMP use the model charges defined at the top of this module;
    sphere decoding uses actual visited-node counts.
    """
    scen = scenario if scenario.snr_grid_db else replace(scenario, snr_grid_db=(0.0,))
    parts = _run_parallel(_ser_chunk, (scen, 0), scen.trials, scen.threads)
    flops = sum((p[1] for p in parts), np.zeros(len(scen.algorithms), dtype=np.int64))
    return {alg.name: flops[i] / scen.trials for i, alg in enumerate(scen.algorithms)}


def single_algorithm_scenario(scenario: VpScenario, alg: AlgorithmSpec) -> VpScenario:
    return replace(scenario, algorithms=(alg,))
