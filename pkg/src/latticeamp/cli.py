"""Command-line interface: every experiment as a subcommand emitting CSV.

Output always starts with `#`-prefixed metadata lines carrying the tool
version and the fully resolved configuration; stripping the leading `# `
from those lines yields a config file that reproduces the run exactly.
Exit codes: 0 success, 1 usage error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import configparser
import io
import os
import sys

import numpy as np

from . import __version__
from .amp import PriorModel, find_highest_fixed_point, psi, state_evolution
from .enumeration import CvpInstance, sphere_cvp
from .errors import LatticeAmpError
from .estimators import EfficiencyBoundQuery, efficiency_bound, sic_decode, zf_decode
from .linalg import (
    LatticeBasis,
    coherence,
    gram_determinant,
    load_matrix,
    orthogonality_defect,
    save_matrix,
    small_factor,
)
from .mimo import (
    DetectScenario,
    DetectorSpec,
    constellation_power,
    detection_error_study,
    natural_reduction_check,
    run_detection_sweep,
)
from .reduction import ReductionMethod, reduce_basis
from .vpsim import (
    AlgorithmSpec,
    VpScenario,
    error_distance_study,
    flop_report,
    run_ser_sweep,
)

THREADS_ENV = "LATTICEAMP_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from exc
    return 1


# ----------------------------------------------------------------- config

_SCENARIO_KEYS = {"m", "n", "constellation", "snr_db", "trials", "seed"}
_ALGO_KEYS = {"estimator", "reduction", "delta", "list_size", "prior", "epsilon",
              "sigma_g_sq", "trunc_k", "amp_iterations", "amp_tau1_sq", "amp_noise_var"}
_DETECTOR_KEYS = {"first_pass", "prior", "epsilon", "sigma_g_sq", "trunc_k",
                  "amp_iterations", "amp_tau1_sq", "amp_noise_var"}


def _read_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return cp


def _check_keys(section, keys, allowed):
    unknown = set(keys) - allowed
    if unknown:
        raise UsageError(f"unknown key(s) {sorted(unknown)} in [{section}]")


def _parse_reduction(tag: str, delta: float, list_size: int) -> ReductionMethod | None:
    if tag in ("none", ""):
        return None
    if tag in ("lll", "blll"):
        return ReductionMethod(tag=tag, delta=delta, list_size=list_size)
    if tag in ("kz", "bkz"):
        return ReductionMethod(tag=tag)
    raise UsageError(f"unknown reduction {tag!r}")


def _parse_prior(kind: str, epsilon: float, sigma_g_sq: float, trunc_k) -> PriorModel | None:
    if kind in ("none", ""):
        return None
    if kind == "ternary":
        return PriorModel.ternary(epsilon)
    if kind == "gaussian":
        return PriorModel.gaussian(sigma_g_sq)
    if kind == "dgaussian":
        return PriorModel.discrete_gaussian(sigma_g_sq, trunc_k)
    raise UsageError(f"unknown prior {kind!r}")


def _algorithm_from_section(name: str, sec) -> AlgorithmSpec:
    _check_keys(f"algorithm {name}", sec.keys(), _ALGO_KEYS)
    if "estimator" not in sec:
        raise UsageError(f"[algorithm {name}] needs an estimator")
    reduction = _parse_reduction(sec.get("reduction", "none"), sec.getfloat("delta", 0.75),
                                 sec.getint("list_size", 1))
    prior = _parse_prior(sec.get("prior", "none"), sec.getfloat("epsilon", 0.5),
                         sec.getfloat("sigma_g_sq", 2.0),
                         sec.getint("trunc_k", 0) or None)
    noise = sec.get("amp_noise_var", "")
    return AlgorithmSpec(
        name=name,
        estimator=sec["estimator"],
        reduction=reduction,
        prior=prior,
        amp_iterations=sec.getint("amp_iterations", 20),
        amp_tau1_sq=sec.getfloat("amp_tau1_sq", 1e4),
        amp_noise_var=float(noise) if noise else None,
    )


def _detector_from_section(name: str, sec) -> DetectorSpec:
    _check_keys(f"detector {name}", sec.keys(), _DETECTOR_KEYS)
    if "first_pass" not in sec:
        raise UsageError(f"[detector {name}] needs a first_pass")
    prior = _parse_prior(sec.get("prior", "none"), sec.getfloat("epsilon", 0.5),
                         sec.getfloat("sigma_g_sq", 2.0),
                         sec.getint("trunc_k", 0) or None)
    noise = sec.get("amp_noise_var", "")
    return DetectorSpec(
        name=name,
        first_pass=sec["first_pass"],
        prior=prior,
        amp_iterations=sec.getint("amp_iterations", 20),
        amp_tau1_sq=sec.getfloat("amp_tau1_sq", 1e4),
        amp_noise_var=float(noise) if noise else None,
    )


def _algorithm_token(token: str, args) -> AlgorithmSpec:
    """Compact algorithm notation: zf, sic, sphere, optionally +ampt/+ampg/+ampd."""
    token = token.strip().lower()
    est, _, suffix = token.partition("+")
    if est not in ("zf", "sic", "sphere"):
        raise UsageError(f"unknown algorithm token {token!r}")
    reduction = _parse_reduction(args.reduction, args.delta, args.list_size)
    prior = None
    if suffix:
        kind = {"ampt": "ternary", "ampg": "gaussian", "ampd": "dgaussian"}.get(suffix)
        if kind is None:
            raise UsageError(f"unknown AMP suffix {suffix!r}")
        prior = _parse_prior(kind, args.epsilon, args.sigma_g_sq, args.trunc_k)
    name = est.upper()
    if reduction is not None:
        name = "LR-" + name
    if suffix:
        name += "+" + suffix.upper()
    return AlgorithmSpec(name=name, estimator=est, reduction=reduction, prior=prior,
                         amp_iterations=args.amp_iterations)


def _detector_token(token: str, args) -> DetectorSpec:
    token = token.strip().lower()
    first, _, suffix = token.partition("+")
    prior = None
    if first in ("ampg", "ampt", "ampd") and not suffix:
        # refinement-only chain: the prior models the symbols themselves
        kind = {"ampt": "ternary", "ampg": "gaussian", "ampd": "dgaussian"}[first]
        sigma = constellation_power(args.constellation) if first == "ampg" else args.sigma_g_sq
        prior = _parse_prior(kind, args.epsilon, sigma, args.trunc_k)
        return DetectorSpec(name=first.upper(), first_pass="none", prior=prior)
    if first not in ("zf", "lmmse"):
        raise UsageError(f"unknown detector token {token!r}")
    if suffix:
        kind = {"ampt": "ternary", "ampg": "gaussian", "ampd": "dgaussian"}.get(suffix)
        if kind is None:
            raise UsageError(f"unknown AMP suffix {suffix!r}")
        prior = _parse_prior(kind, args.epsilon, args.sigma_g_sq, args.trunc_k)
    name = first.upper() + (f"+{suffix.upper()}" if suffix else "")
    return DetectorSpec(name=name, first_pass=first, prior=prior,
                        amp_iterations=args.amp_iterations)


def _vp_scenario_from_args(args) -> VpScenario:
    threads = _resolve_threads(args)
    if args.config:
        cp = _read_config(args.config)
        if not cp.has_section("scenario"):
            raise UsageError("config needs a [scenario] section")
        sec = cp["scenario"]
        _check_keys("scenario", sec.keys(), _SCENARIO_KEYS)
        m = args.m if args.m is not None else sec.getint("m")
        n = args.n if args.n is not None else sec.getint("n")
        big_m = args.constellation if args.constellation is not None else sec.getint("constellation")
        snr = args.snr if args.snr is not None else sec.get("snr_db", "")
        trials = args.trials if args.trials is not None else sec.getint("trials")
        seed = args.seed if args.seed is not None else sec.getint("seed", 0)
        algorithms = []
        for section in cp.sections():
            if section.startswith("algorithm "):
                algorithms.append(_algorithm_from_section(section[len("algorithm "):], cp[section]))
            elif section != "scenario":
                raise UsageError(f"unknown config section [{section}]")
        if not algorithms:
            algorithms = [_algorithm_token(t, args) for t in args.algorithms.split(",")]
    else:
        for field in ("m", "n", "constellation", "trials"):
            if getattr(args, field) is None:
                raise UsageError(f"--{field} is required without --config")
        m, n, big_m = args.m, args.n, args.constellation
        snr, trials, seed = args.snr, args.trials, args.seed if args.seed is not None else 0
        algorithms = [_algorithm_token(t, args) for t in args.algorithms.split(",")]
    grid = tuple(float(v) for v in str(snr).replace(",", " ").split()) if snr else ()
    return VpScenario(m=m, n=n, big_m=big_m, snr_grid_db=grid, trials=trials,
                      algorithms=tuple(algorithms), seed=seed, threads=threads)


def _detect_scenario_from_args(args) -> DetectScenario:
    threads = _resolve_threads(args)
    if args.config:
        cp = _read_config(args.config)
        if not cp.has_section("scenario"):
            raise UsageError("config needs a [scenario] section")
        sec = cp["scenario"]
        _check_keys("scenario", sec.keys(), _SCENARIO_KEYS)
        m = args.m if args.m is not None else sec.getint("m")
        n = args.n if args.n is not None else sec.getint("n")
        big_m = args.constellation if args.constellation is not None else sec.getint("constellation")
        snr = args.snr if args.snr is not None else sec.get("snr_db", "")
        trials = args.trials if args.trials is not None else sec.getint("trials")
        seed = args.seed if args.seed is not None else sec.getint("seed", 0)
        detectors = []
        for section in cp.sections():
            if section.startswith("detector "):
                detectors.append(_detector_from_section(section[len("detector "):], cp[section]))
            elif section != "scenario":
                raise UsageError(f"unknown config section [{section}]")
        if not detectors:
            detectors = [_detector_token(t, args) for t in args.detectors.split(",")]
    else:
        for field in ("m", "n", "constellation", "trials"):
            if getattr(args, field) is None:
                raise UsageError(f"--{field} is required without --config")
        m, n, big_m = args.m, args.n, args.constellation
        snr, trials, seed = args.snr, args.trials, args.seed if args.seed is not None else 0
        detectors = [_detector_token(t, args) for t in args.detectors.split(",")]
    grid = tuple(float(v) for v in str(snr).replace(",", " ").split()) if snr else ()
    return DetectScenario(m=m, n=n, big_m=big_m, snr_grid_db=grid, trials=trials,
                          detectors=tuple(detectors), seed=seed, threads=threads)


# ------------------------------------------------------------------- echo

def _echo_reduction(method: ReductionMethod | None):
    if method is None:
        return [("reduction", "none")]
    lines = [("reduction", method.tag)]
    if method.tag in ("lll", "blll"):
        lines.append(("delta", _fmt(method.delta)))
        lines.append(("list_size", method.list_size))
    return lines


def _echo_prior(prior: PriorModel | None):
    if prior is None:
        return [("prior", "none")]
    lines = [("prior", prior.kind)]
    if prior.kind == "ternary":
        lines.append(("epsilon", _fmt(prior.epsilon)))
    else:
        lines.append(("sigma_g_sq", _fmt(prior.sigma_g_sq)))
    if prior.kind == "dgaussian":
        lines.append(("trunc_k", prior.trunc_k))
    return lines


def _echo_vp(scenario: VpScenario):
    lines = ["[scenario]",
             f"m = {scenario.m}", f"n = {scenario.n}",
             f"constellation = {scenario.big_m}",
             "snr_db = " + " ".join(_fmt(v) for v in scenario.snr_grid_db),
             f"trials = {scenario.trials}", f"seed = {scenario.seed}"]
    for alg in scenario.algorithms:
        lines.append(f"[algorithm {alg.name}]")
        lines.append(f"estimator = {alg.estimator}")
        for k, v in _echo_reduction(alg.reduction) + _echo_prior(alg.prior):
            lines.append(f"{k} = {v}")
        if alg.prior is not None:
            lines.append(f"amp_iterations = {alg.amp_iterations}")
            lines.append(f"amp_tau1_sq = {_fmt(alg.amp_tau1_sq)}")
            if alg.amp_noise_var is not None:
                lines.append(f"amp_noise_var = {_fmt(alg.amp_noise_var)}")
    return lines


def _echo_detect(scenario: DetectScenario):
    lines = ["[scenario]",
             f"m = {scenario.m}", f"n = {scenario.n}",
             f"constellation = {scenario.big_m}",
             "snr_db = " + " ".join(_fmt(v) for v in scenario.snr_grid_db),
             f"trials = {scenario.trials}", f"seed = {scenario.seed}"]
    for det in scenario.detectors:
        lines.append(f"[detector {det.name}]")
        lines.append(f"first_pass = {det.first_pass}")
        for k, v in _echo_prior(det.prior):
            lines.append(f"{k} = {v}")
        if det.prior is not None:
            lines.append(f"amp_iterations = {det.amp_iterations}")
            lines.append(f"amp_tau1_sq = {_fmt(det.amp_tau1_sq)}")
            if det.amp_noise_var is not None:
                lines.append(f"amp_noise_var = {_fmt(det.amp_noise_var)}")
    return lines


class _Output:
    def __init__(self, path=None):
        self.path = path
        self.buf = io.StringIO()

    def comment(self, text=""):
        self.buf.write(f"# {text}\n" if text else "#\n")

    def header(self, echo_lines):
        self.comment(f"latticeamp {__version__}")
        for line in echo_lines:
            self.comment(line)

    def row(self, *fields):
        self.buf.write(",".join(_fmt(f) for f in fields) + "\n")

    def finish(self) -> int:
        text = self.buf.getvalue()
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0


# ------------------------------------------------------------- subcommands

def _cmd_reduce(args):
    basis = LatticeBasis(load_matrix(args.basis))
    method = _parse_reduction(args.method, args.delta, args.list_size)
    if method is None:
        raise UsageError("reduce needs a reduction method")
    outcome = reduce_basis(basis, method)
    if args.out_basis:
        save_matrix(args.out_basis, outcome.reduced.mat)
    if args.out_unimodular:
        save_matrix(args.out_unimodular, outcome.unimodular.astype(np.float64))
    out = _Output(args.out)
    out.header([f"basis = {args.basis}"] + [f"{k} = {v}" for k, v in _echo_reduction(method)])
    out.row("method", "n", "od_before", "od_after", "coherence_after",
            "small_factor_after", "swaps")
    out.row(method.tag, basis.cols, outcome.od_before, outcome.od_after,
            coherence(outcome.reduced) if basis.cols >= 2 else 0.0,
            small_factor(outcome.reduced), outcome.swap_count)
    return out.finish()


def _cmd_solve(args):
    basis = LatticeBasis(load_matrix(args.basis))
    target = load_matrix(args.target).ravel()
    inst = CvpInstance(basis=basis, target=target)
    if args.method == "sphere":
        x, _ = sphere_cvp(inst, radius=args.radius)
    elif args.method == "zf":
        x = zf_decode(inst)
    elif args.method == "sic":
        x = sic_decode(inst)
    elif args.method == "amp":
        from .amp import AmpConfig, amp_solve

        prior = _parse_prior(args.prior, args.epsilon, args.sigma_g_sq, args.trunc_k)
        if prior is None:
            raise UsageError("solve --method amp needs --prior")
        noise_var = args.noise_var
        if noise_var is None:
            noise_var = float(np.linalg.norm(target) ** 2) / basis.rows**1.5
        cfg = AmpConfig(noise_var=noise_var, iterations=args.amp_iterations)
        x = amp_solve(inst, prior, cfg).x_amp
    else:
        raise UsageError(f"unknown method {args.method!r}")
    out = _Output(args.out)
    out.header([f"basis = {args.basis}", f"target = {args.target}", f"method = {args.method}"])
    out.row("method", "objective", "solution")
    out.row(args.method, inst.residual(x), " ".join(str(int(v)) for v in x))
    return out.finish()


def _cmd_bounds(args):
    estimators = [args.estimator] if args.estimator else ["sic", "zf"]
    reductions = [args.reduction] if args.reduction else ["blll", "bkz"]
    out = _Output(args.out)
    out.header([f"delta = {_fmt(args.delta)}", f"n = {args.n}"])
    out.row("estimator", "reduction", "delta", "n", "eta")
    for est in estimators:
        for red in reductions:
            for n in range(1, args.n + 1):
                q = EfficiencyBoundQuery(estimator=est, reduction=red, n=n, delta=args.delta)
                out.row(est, red, args.delta, n, efficiency_bound(q))
    return out.finish()


def _se_args_common(args):
    prior = _parse_prior(args.prior, args.epsilon, args.sigma_g_sq, args.trunc_k)
    if prior is None:
        raise UsageError("--prior is required")
    if args.column_vars:
        col = load_matrix(args.column_vars).ravel()
    else:
        col = np.full(args.n, args.column_var)
    m = args.m if args.m is not None else col.shape[0]
    return prior, col, m


def _cmd_se(args):
    prior, col, m = _se_args_common(args)
    trace = state_evolution(prior, col, args.noise_var, args.iterations, m=m,
                            tau0_sq=args.tau0_sq)
    out = _Output(args.out)
    out.header([f"prior = {prior.kind}", f"noise_var = {_fmt(args.noise_var)}",
                f"n = {col.shape[0]}", f"m = {m}", f"iterations = {args.iterations}"])
    out.row("t", "tau_tilde_sq")
    for t, v in enumerate(trace.tau_tilde_sq):
        out.row(t, float(v))
    return out.finish()


def _cmd_fixedpoint(args):
    prior, col, m = _se_args_common(args)
    out = _Output(args.out)
    highest = find_highest_fixed_point(prior, col, args.noise_var, m=m)
    out.header([f"prior = {prior.kind}", f"noise_var = {_fmt(args.noise_var)}",
                f"n = {col.shape[0]}", f"m = {m}",
                f"highest_fixed_point = {_fmt(highest)}"])
    out.row("tau_tilde_sq", "psi")
    for tau in np.geomspace(args.grid_min, args.grid_max, args.grid_points):
        out.row(float(tau), psi(float(tau), prior, col, args.noise_var, m=m))
    return out.finish()


def _cmd_metrics(args):
    basis = LatticeBasis(load_matrix(args.basis))
    out = _Output(args.out)
    out.header([f"basis = {args.basis}"])
    out.row("rows", "cols", "orthogonality_defect", "coherence", "small_factor",
            "gram_determinant")
    out.row(basis.rows, basis.cols, orthogonality_defect(basis),
            coherence(basis) if basis.cols >= 2 else 0.0,
            small_factor(basis), gram_determinant(basis))
    return out.finish()


def _cmd_vp_ser(args):
    scenario = _vp_scenario_from_args(args)
    curves = run_ser_sweep(scenario)
    out = _Output(args.out)
    out.header(_echo_vp(scenario))
    out.row("algorithm", "snr_db", "trials", "errors", "ser", "mean_flops")
    for alg in scenario.algorithms:
        for snr in scenario.snr_grid_db:
            p = curves[alg.name].points[snr]
            out.row(alg.name, p.snr_db, p.trials, p.errors, float(p.ser), float(p.mean_flops))
    return out.finish()


def _cmd_vp_errors(args):
    scenario = _vp_scenario_from_args(args)
    hist = error_distance_study(scenario)
    out = _Output(args.out)
    out.header(_echo_vp(scenario))
    out.row("estimator", "distance", "probability")
    for est in ("zf", "sic"):
        for d, p in hist.probabilities(est).items():
            out.row(est, d, float(p))
    return out.finish()


def _cmd_vp_flops(args):
    scenario = _vp_scenario_from_args(args)
    report = flop_report(scenario)
    out = _Output(args.out)
    out.header(_echo_vp(scenario) +
               ["flop models: zf/sic 2*m*n^2, amp T*(4mn+8n+4m), sphere sum (2k+7)*nodes_k"])
    out.row("algorithm", "mean_flops")
    for alg in scenario.algorithms:
        out.row(alg.name, float(report[alg.name]))
    return out.finish()


def _cmd_mimo_ser(args):
    scenario = _detect_scenario_from_args(args)
    curves = run_detection_sweep(scenario)
    out = _Output(args.out)
    out.header(_echo_detect(scenario))
    out.row("algorithm", "snr_db", "trials", "errors", "ser", "mean_flops")
    for det in scenario.detectors:
        for snr in scenario.snr_grid_db:
            p = curves[det.name].points[snr]
            out.row(det.name, p.snr_db, p.trials, p.errors, float(p.ser), float(p.mean_flops))
    return out.finish()


def _cmd_mimo_errors(args):
    scenario = _detect_scenario_from_args(args)
    if len(scenario.snr_grid_db) != 1:
        raise UsageError("mimo-errors needs exactly one SNR point")
    hist = detection_error_study(scenario, scenario.snr_grid_db[0])
    out = _Output(args.out)
    out.header(_echo_detect(scenario))
    out.row("estimator", "distance", "probability")
    for est in ("zf", "lr-zf"):
        for d, p in hist.probabilities(est).items():
            out.row(est, d, float(p))
    return out.finish()


def _cmd_mimo_basis_check(args):
    report = natural_reduction_check(args.m, args.n, args.trials, args.seed or 0,
                                     match_rtol=args.match_rtol)
    out = _Output(args.out)
    out.header([f"m = {args.m}", f"n = {args.n}", f"trials = {args.trials}",
                f"seed = {args.seed or 0}"])
    out.row("trials", "match_rtol", "minima_match_rate", "exact_match_rate",
            "median_max_gap", "od_before_median", "od_after_median",
            "coherence_before_median", "coherence_after_median")
    out.row(report.trials, report.match_rtol, report.minima_match_rate,
            report.exact_match_rate, report.median_max_gap,
            report.od_before_median, report.od_after_median,
            report.coherence_before_median, report.coherence_after_median)
    return out.finish()


# ------------------------------------------------------------------ parser

def _add_common(p):
    p.add_argument("--out", help="write CSV here instead of stdout")


def _add_prior_flags(p):
    p.add_argument("--prior", default="none", help="ternary | gaussian | dgaussian")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--sigma-g-sq", type=float, default=2.0, dest="sigma_g_sq")
    p.add_argument("--trunc-k", type=int, default=None, dest="trunc_k")


def _add_scenario_flags(p, algorithms_default):
    p.add_argument("--config", help="scenario config file")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--M", type=int, default=None, dest="constellation")
    p.add_argument("--snr", default=None, help="SNR grid in dB, comma or space separated")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (default: ${THREADS_ENV} or 1)")
    p.add_argument("--reduction", default="blll", help="lll | blll | kz | bkz | none")
    p.add_argument("--delta", type=float, default=0.75)
    p.add_argument("--list-size", type=int, default=1, dest="list_size")
    p.add_argument("--amp-iterations", type=int, default=20, dest="amp_iterations")
    _add_prior_flags(p)
    p.add_argument("--algorithms", default=algorithms_default)
    p.add_argument("--detectors", default="zf,lmmse,lmmse+ampt,lmmse+ampg,ampg")


def build_parser() -> _Parser:
    parser = _Parser(prog="latticeamp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a basis file and report quality metrics")
    p.add_argument("--basis", required=True)
    p.add_argument("--method", required=True, help="lll | blll | kz | bkz")
    p.add_argument("--delta", type=float, default=0.75)
    p.add_argument("--list-size", type=int, default=1, dest="list_size")
    p.add_argument("--out-basis", dest="out_basis")
    p.add_argument("--out-unimodular", dest="out_unimodular")
    _add_common(p)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("solve", help="decode a target against a basis")
    p.add_argument("--basis", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--method", required=True, help="sphere | zf | sic | amp")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--noise-var", type=float, default=None, dest="noise_var")
    p.add_argument("--amp-iterations", type=int, default=20, dest="amp_iterations")
    _add_prior_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bounds", help="closed-form energy-efficiency bounds")
    p.add_argument("--estimator", default=None, help="zf | sic (default both)")
    p.add_argument("--reduction", default=None, help="blll | bkz (default both)")
    p.add_argument("--delta", type=float, default=0.75)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_bounds)

    for name, fn in (("se", _cmd_se), ("fixedpoint", _cmd_fixedpoint)):
        p = sub.add_parser(name, help="state evolution" if name == "se" else "fixed-point map")
        _add_prior_flags(p)
        p.add_argument("--noise-var", type=float, required=True, dest="noise_var")
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--column-var", type=float, default=1.0, dest="column_var",
                       help="uniform column variance used with --n")
        p.add_argument("--column-vars", default=None, dest="column_vars",
                       help="matrix file with per-column variances")
        if name == "se":
            p.add_argument("--iterations", type=int, default=20)
            p.add_argument("--tau0-sq", type=float, default=None, dest="tau0_sq")
        else:
            p.add_argument("--grid-min", type=float, default=1e-4, dest="grid_min")
            p.add_argument("--grid-max", type=float, default=1e6, dest="grid_max")
            p.add_argument("--grid-points", type=int, default=60, dest="grid_points")
        _add_common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("metrics", help="lattice quality metrics of a basis file")
    p.add_argument("--basis", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("vp-ser", help="vector-perturbation SER sweep")
    _add_scenario_flags(p, "sphere,zf,sic,zf+ampt,sic+ampt")
    _add_common(p)
    p.set_defaults(func=_cmd_vp_ser)

    p = sub.add_parser("vp-errors", help="phase-1 error-distance histogram")
    _add_scenario_flags(p, "zf")
    _add_common(p)
    p.set_defaults(func=_cmd_vp_errors)

    p = sub.add_parser("vp-flops", help="mean decoding flops per algorithm")
    _add_scenario_flags(p, "sphere,zf,sic,zf+ampt,sic+ampt")
    _add_common(p)
    p.set_defaults(func=_cmd_vp_flops)

    p = sub.add_parser("mimo-ser", help="uplink detection SER sweep")
    _add_scenario_flags(p, "zf")
    _add_common(p)
    p.set_defaults(func=_cmd_mimo_ser)

    p = sub.add_parser("mimo-errors", help="detection error-distance histogram")
    _add_scenario_flags(p, "zf")
    _add_common(p)
    p.set_defaults(func=_cmd_mimo_errors)

    p = sub.add_parser("mimo-basis-check", help="natural-reduction quality of tall channels")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--match-rtol", type=float, default=0.2, dest="match_rtol")
    _add_common(p)
    p.set_defaults(func=_cmd_mimo_basis_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return 1
    except LatticeAmpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
