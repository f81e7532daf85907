"""Approximate message passing with column-variance scaling.

The iteration alternates a matched-filter step with an Onsager-corrected
residual and an element-wise Bayesian denoiser (threshold function pair
eta/kappa = posterior mean/variance of the signal prior under additive
Gaussian noise). A scalar state evolution recursion predicts the effective
noise variance per iteration; its stable fixed points characterise the
limiting error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError, NoConvergenceError
from .enumeration import CvpInstance
from .linalg import LatticeBasis, round_half_away_int

V_CLAMP = 1e-8  # discrete-prior thresholds lose Lipschitz continuity as v -> 0
_EXP_MAX = 350.0  # exp argument cap; squared denominators stay finite floats

TERNARY = "ternary"
GAUSSIAN = "gaussian"
DISCRETE_GAUSSIAN = "dgaussian"


def eta_ternary(u, v, epsilon: float):
    """Posterior mean of X in {-1, 0, 1} (P(0) = 1-eps) observed under
    N(0, v) noise.

    Evaluated from exp(-|u|/v)-scaled terms so it saturates instead of
    overflowing for any |u|/v; odd in u, range (-1, 1).
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.maximum(np.asarray(v, dtype=np.float64), V_CLAMP)
    t = u / v
    at = np.abs(t)
    a = np.exp(-2.0 * at)
    if epsilon >= 1.0:
        g2 = np.zeros_like(a)
    else:
        log_g2 = math.log(2.0 * (1.0 - epsilon) / epsilon) + 1.0 / (2.0 * v) - at
        g2 = np.exp(np.minimum(log_g2, _EXP_MAX))
    out = np.sign(t) * (1.0 - a) / (g2 + 1.0 + a)
    return out if out.ndim else float(out)


def kappa_ternary(u, v, epsilon: float):
    """Posterior variance companion of eta_ternary; even in u, in [0, 1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.maximum(np.asarray(v, dtype=np.float64), V_CLAMP)
    t = u / v
    at = np.abs(t)
    a = np.exp(-2.0 * at)
    if epsilon >= 1.0:
        g = np.zeros_like(a)
    else:
        log_g = math.log((1.0 - epsilon) / epsilon) + 1.0 / (2.0 * v) - at
        g = np.exp(np.minimum(log_g, _EXP_MAX))
    half = 0.5 * (1.0 + a)
    out = (g * half + a) / (g + half) ** 2
    return out if out.ndim else float(out)


def eta_gaussian(u, v, sigma_g_sq: float):
    """Posterior mean under a N(0, sigma_g_sq) prior: linear shrinkage."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    out = u * sigma_g_sq / (sigma_g_sq + v)
    return out if out.ndim else float(out)


def kappa_gaussian(u, v, sigma_g_sq: float):
    """Posterior variance under a N(0, sigma_g_sq) prior; independent of u."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    out = np.broadcast_to(v * sigma_g_sq / (sigma_g_sq + v), np.broadcast_shapes(u.shape, v.shape)).copy()
    return out if out.ndim else float(out)


def _dgauss_weights(u, v, sigma_g_sq, trunc_k):
    ell = np.arange(-trunc_k, trunc_k + 1, dtype=np.float64)
    log_w = -(ell**2) / (2.0 * sigma_g_sq) - (ell - u[..., None]) ** 2 / (2.0 * v[..., None])
    log_w -= log_w.max(axis=-1, keepdims=True)
    w = np.exp(log_w)
    return ell, w, w.sum(axis=-1)


def eta_discrete_gaussian(u, v, sigma_g_sq: float, trunc_k: int):
    """Posterior mean under a discrete Gaussian over the integers,
    truncated to |l| <= trunc_k and evaluated in the log domain."""
    u = np.asarray(u, dtype=np.float64)
    v = np.maximum(np.asarray(v, dtype=np.float64), V_CLAMP)
    ell, w, s = _dgauss_weights(u, v, sigma_g_sq, trunc_k)
    out = (w @ ell) / s
    return out if out.ndim else float(out)


def kappa_discrete_gaussian(u, v, sigma_g_sq: float, trunc_k: int):
    """Posterior variance companion of eta_discrete_gaussian."""
    u = np.asarray(u, dtype=np.float64)
    v = np.maximum(np.asarray(v, dtype=np.float64), V_CLAMP)
    ell, w, s = _dgauss_weights(u, v, sigma_g_sq, trunc_k)
    mean = (w @ ell) / s
    out = np.sum(w * (ell - mean[..., None]) ** 2, axis=-1) / s
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PriorModel:
    """Signal prior driving the threshold functions.

    ternary: {-1, 0, 1} with P(+-1) = epsilon/2. gaussian: N(0, sigma_g_sq).
    dgaussian: discrete Gaussian over the integers with width sqrt(sigma_g_sq),
    summed over |l| <= trunc_k (default ceil(10 * sigma_g)).
    """

    kind: str
    epsilon: float = 0.5
    sigma_g_sq: float = 2.0
    trunc_k: int | None = None

    def __post_init__(self):
        if self.kind not in (TERNARY, GAUSSIAN, DISCRETE_GAUSSIAN):
            raise InvalidDimensionError(f"unknown prior kind {self.kind!r}")
        if self.kind == TERNARY and not 0.0 < self.epsilon <= 1.0:
            raise InvalidDimensionError("epsilon must lie in (0, 1]")
        if self.kind != TERNARY and self.sigma_g_sq <= 0.0:
            raise InvalidDimensionError("sigma_g_sq must be positive")
        if self.kind == DISCRETE_GAUSSIAN:
            k = self.trunc_k
            if k is None:
                k = math.ceil(10.0 * math.sqrt(self.sigma_g_sq))
            if k < 1:
                raise InvalidDimensionError("trunc_k must be >= 1")
            object.__setattr__(self, "trunc_k", int(k))

    @classmethod
    def ternary(cls, epsilon: float = 0.5):
        return cls(kind=TERNARY, epsilon=epsilon)

    @classmethod
    def gaussian(cls, sigma_g_sq: float = 2.0):
        return cls(kind=GAUSSIAN, sigma_g_sq=sigma_g_sq)

    @classmethod
    def discrete_gaussian(cls, sigma_g_sq: float = 2.0, trunc_k: int | None = None):
        return cls(kind=DISCRETE_GAUSSIAN, sigma_g_sq=sigma_g_sq, trunc_k=trunc_k)

    def eta(self, u, v):
        if self.kind == TERNARY:
            return eta_ternary(u, v, self.epsilon)
        if self.kind == GAUSSIAN:
            return eta_gaussian(u, v, self.sigma_g_sq)
        return eta_discrete_gaussian(u, v, self.sigma_g_sq, self.trunc_k)

    def kappa(self, u, v):
        if self.kind == TERNARY:
            return kappa_ternary(u, v, self.epsilon)
        if self.kind == GAUSSIAN:
            return kappa_gaussian(u, v, self.sigma_g_sq)
        return kappa_discrete_gaussian(u, v, self.sigma_g_sq, self.trunc_k)

    def support(self):
        """Atoms and probabilities for the discrete priors, None for gaussian."""
        if self.kind == TERNARY:
            pts = np.array([-1.0, 0.0, 1.0])
            probs = np.array([self.epsilon / 2.0, 1.0 - self.epsilon, self.epsilon / 2.0])
            return pts, probs
        if self.kind == DISCRETE_GAUSSIAN:
            pts = np.arange(-self.trunc_k, self.trunc_k + 1, dtype=np.float64)
            w = np.exp(-(pts**2) / (2.0 * self.sigma_g_sq))
            return pts, w / w.sum()
        return None

    def second_moment(self) -> float:
        if self.kind == GAUSSIAN:
            return self.sigma_g_sq
        pts, probs = self.support()
        return float(np.sum(probs * pts**2))

    def sample(self, rng, size):
        if self.kind == GAUSSIAN:
            return rng.normal(0.0, math.sqrt(self.sigma_g_sq), size)
        pts, probs = self.support()
        return rng.choice(pts, size=size, p=probs)


@dataclass(frozen=True)
class AmpConfig:
    """Iteration count, noise variance, optional per-column variances, and
    the large starting value for the effective variance."""

    noise_var: float
    iterations: int = 20
    column_vars: np.ndarray | None = None
    tau1_sq: float = 1e4

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidDimensionError("iterations must be >= 1")
        if self.noise_var <= 0.0:
            raise InvalidDimensionError("noise_var must be positive")
        if self.tau1_sq <= 0.0:
            raise InvalidDimensionError("tau1_sq must be positive")
        if self.column_vars is not None:
            cv = np.asarray(self.column_vars, dtype=np.float64)
            if np.any(cv <= 0.0):
                raise InvalidDimensionError("column_vars must be positive")
            object.__setattr__(self, "column_vars", cv)


@dataclass
class AmpTrace:
    """Per-iteration state of one AMP run plus the selected output.

    fitness[0] is the all-zero baseline ||y||^2; chosen_index indexes into
    fitness, so chosen_index = 0 means the zero correction won.
    """

    x_iters: list = field(default_factory=list)
    r_iters: list = field(default_factory=list)
    tau_sq: list = field(default_factory=list)
    tau_bar_sq: list = field(default_factory=list)
    fitness: list = field(default_factory=list)
    chosen_index: int = 0
    x_amp: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    diverged: bool = False


def estimate_column_variances(basis) -> np.ndarray:
    """Maximum-likelihood per-column variance: the squared column norm."""
    if isinstance(basis, LatticeBasis):
        return basis.col_norms**2
    a = np.asarray(basis, dtype=np.float64)
    return np.sum(a * a, axis=0)


def amp_solve(inst: CvpInstance, prior: PriorModel, cfg: AmpConfig) -> AmpTrace:
    """Run the AMP iteration and return the best rounded iterate.

    Starts from x = 0 with residual r = y and a large effective variance;
    each iteration denoises the matched-filter statistic, then rebuilds the
    residual with the Onsager memory term. The rounded iterate with the
    smallest fitness ||y - H round(x)||^2 wins, the zero baseline included.
    A non-finite state truncates the trace and keeps the best-so-far.
    """
    h = inst.basis.mat
    y = inst.target
    m, n = h.shape
    col_vars = cfg.column_vars if cfg.column_vars is not None else estimate_column_variances(inst.basis)
    if col_vars.shape[0] != n:
        raise InvalidDimensionError("column_vars length must match the basis columns")
    theta = 1.0 / col_vars
    ratio = n / m

    trace = AmpTrace()
    with np.errstate(over="ignore"):
        trace.fitness.append(float(y @ y))
    x = np.zeros(n)
    r = y.copy()
    tau2 = cfg.tau1_sq

    for _ in range(cfg.iterations):
        u = theta * (h.T @ r) + x
        v = theta * tau2
        x_new = prior.eta(u, v)
        kap = prior.kappa(u, v)
        tau_bar2 = float(np.mean(col_vars * kap))
        finite = np.all(np.isfinite(x_new)) and math.isfinite(tau_bar2)
        if not finite or np.abs(x_new).max() >= 1e15:  # int64-safe magnitude guard
            trace.diverged = True
            break
        r = y - h @ x_new + ratio * (tau_bar2 / tau2) * r
        tau2 = cfg.noise_var + ratio * tau_bar2
        x = x_new
        if not np.all(np.isfinite(r)):
            trace.diverged = True
            break
        trace.x_iters.append(x.copy())
        trace.r_iters.append(r.copy())
        trace.tau_sq.append(tau2)
        trace.tau_bar_sq.append(tau_bar2)
        xr = round_half_away_int(x)
        with np.errstate(over="ignore"):
            resid = y - h @ xr.astype(np.float64)
            trace.fitness.append(float(resid @ resid))

    trace.chosen_index = int(np.argmin(trace.fitness))
    if trace.chosen_index == 0:
        trace.x_amp = np.zeros(n, dtype=np.int64)
    else:
        trace.x_amp = round_half_away_int(trace.x_iters[trace.chosen_index - 1])
    return trace


@dataclass
class SeTrace:
    """State-evolution effective variances, starting value included."""

    tau_tilde_sq: np.ndarray


_HERM_CACHE: dict = {}


def _gauss_hermite(n_quad: int):
    if n_quad not in _HERM_CACHE:
        x, w = np.polynomial.hermite.hermgauss(n_quad)
        _HERM_CACHE[n_quad] = (x * math.sqrt(2.0), w / math.sqrt(math.pi))
    return _HERM_CACHE[n_quad]


def _prior_mse(prior: PriorModel, tau_tilde_sq: float, sigma_j_sq: float, n_quad: int) -> float:
    """E |eta(X + (tau/sigma_j) Z, tau^2/sigma_j^2) - X|^2 for X ~ prior,
    Z standard normal."""
    v = tau_tilde_sq / sigma_j_sq
    if prior.kind == GAUSSIAN:
        return v * prior.sigma_g_sq / (prior.sigma_g_sq + v)
    pts, probs = prior.support()
    z, w = _gauss_hermite(n_quad)
    u = pts[:, None] + math.sqrt(v) * z[None, :]
    err = (prior.eta(u, np.full_like(u, v)) - pts[:, None]) ** 2
    return float(probs @ err @ w)


def psi(tau_tilde_sq: float, prior: PriorModel, column_vars, noise_var: float,
        m: int | None = None, n_quad: int = 64) -> float:
    """One state-evolution map evaluation:
    (1/m) sum_j sigma_j^2 E|eta(X + tau/sigma_j Z, tau^2/sigma_j^2) - X|^2 + noise_var.

    The expectation is exact over the discrete prior atoms and uses 64-node
    Gauss-Hermite quadrature over Z; the Gaussian prior has a closed form.
    """
    col = np.asarray(column_vars, dtype=np.float64).ravel()
    m = m if m is not None else col.shape[0]
    vals, counts = np.unique(col, return_counts=True)
    acc = 0.0
    for sig_sq, cnt in zip(vals, counts):
        acc += cnt * sig_sq * _prior_mse(prior, tau_tilde_sq, sig_sq, n_quad)
    return acc / m + noise_var


def moment_matched_start(prior: PriorModel, column_vars, noise_var: float,
                         m: int | None = None) -> float:
    """Starting variance mirroring x^0 = 0: (1/m) sum_j sigma_j^2 E[X^2] + noise_var."""
    col = np.asarray(column_vars, dtype=np.float64).ravel()
    m = m if m is not None else col.shape[0]
    return float(col.sum()) * prior.second_moment() / m + noise_var


def state_evolution(prior: PriorModel, column_vars, noise_var: float, iterations: int,
                    m: int | None = None, tau0_sq: float | None = None,
                    n_quad: int = 64) -> SeTrace:
    """Iterate the state-evolution map from a moment-matched start (or an
    explicit tau0_sq such as the algorithm's large start)."""
    col = np.asarray(column_vars, dtype=np.float64).ravel()
    start = tau0_sq if tau0_sq is not None else moment_matched_start(prior, col, noise_var, m)
    vals = [float(start)]
    for _ in range(iterations):
        vals.append(psi(vals[-1], prior, col, noise_var, m=m, n_quad=n_quad))
    return SeTrace(tau_tilde_sq=np.array(vals))


def gaussian_fixed_point_bounds(column_vars, noise_var: float, sigma_g_sq: float,
                                m: int, n: int | None = None):
    """Closed-form bracket for the unique Gaussian-prior fixed point,
    evaluated at the smallest and largest column variances."""
    col = np.asarray(column_vars, dtype=np.float64).ravel()
    n = n if n is not None else col.shape[0]

    def _fp(sig_sq: float) -> float:
        b = noise_var + (n / m - 1.0) * sig_sq * sigma_g_sq
        return 0.5 * b + 0.5 * math.sqrt(b * b + 4.0 * noise_var * sig_sq * sigma_g_sq)

    return _fp(float(col.min())), _fp(float(col.max()))


def find_highest_fixed_point(prior: PriorModel, column_vars, noise_var: float,
                             m: int | None = None, start: float = 1e6,
                             tol: float = 1e-8, max_steps: int = 1000,
                             n_quad: int = 64) -> float:
    """Fixed-point iteration of the state-evolution map from a large start.

    The map is monotone, so iterating from above converges to the highest
    stable fixed point.
    """
    x = float(start)
    for _ in range(max_steps):
        x_new = psi(x, prior, column_vars, noise_var, m=m, n_quad=n_quad)
        if abs(x_new - x) < tol:
            return x_new
        x = x_new
    raise NoConvergenceError(f"no fixed point within {max_steps} steps (last {x:.6g})")


def empirical_state_evolution(prior: PriorModel, m: int, n: int, noise_var: float,
                              iterations: int, trials: int, seed: int,
                              column_vars=None, fresh_matrix: bool = True):
    """Measure AMP's per-iteration weighted error against the SE prediction.

    Draws x from the prior and observes y = H x + w with H entries
    N(0, sigma_j^2/m), running the iteration aligned with the SE start.
    fresh_matrix regenerates the whole observation (H and w) every
    iteration and drops the Onsager term, the independence regime of the
    exactness claim; the fixed-matrix variant is the practical
    single-channel algorithm with its Onsager correction. Returns
    (mean weighted MSE per iteration, SeTrace); entry t of the MSE
    corresponds to the iterate x^(t+1).
    """
    col = np.ones(n) if column_vars is None else np.asarray(column_vars, dtype=np.float64)
    theta = 1.0 / col
    scale = np.sqrt(col / m)
    tau0 = moment_matched_start(prior, col, noise_var, m)
    mse = np.zeros((trials, iterations))
    ratio = n / m

    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
        xbar = prior.sample(rng, n)
        h = rng.normal(size=(m, n)) * scale[None, :]
        y = h @ xbar + rng.normal(0.0, math.sqrt(noise_var), m)
        x = np.zeros(n)
        r = y.copy()
        tau2 = tau0
        for t in range(iterations):
            if fresh_matrix and t > 0:
                h = rng.normal(size=(m, n)) * scale[None, :]
                y = h @ xbar + rng.normal(0.0, math.sqrt(noise_var), m)
                r = y - h @ x
            u = theta * (h.T @ r) + x
            v = theta * tau2
            x_new = prior.eta(u, v)
            kap = prior.kappa(u, v)
            tau_bar2 = float(np.mean(col * kap))
            if fresh_matrix:
                r = y - h @ x_new
            else:
                r = y - h @ x_new + ratio * (tau_bar2 / tau2) * r
            tau2 = noise_var + ratio * tau_bar2
            x = x_new
            mse[trial, t] = float(np.mean(col * (x - xbar) ** 2))

    se = state_evolution(prior, col, noise_var, iterations, m=m, tau0_sq=tau0)
    return mse.mean(axis=0), se
