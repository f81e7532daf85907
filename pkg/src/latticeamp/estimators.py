"""Suboptimal lattice decoders and their worst-case energy efficiency.

Energy efficiency of a decoder is the ratio of its residual to the optimal
sphere-decoder residual; the closed-form bounds cover the four pairings of
{ZF, SIC} with {boosted LLL, boosted KZ}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidDimensionError
from .enumeration import CvpInstance, sphere_cvp
from .linalg import LatticeBasis, pseudo_inverse, round_half_away_int

ZF = "zf"
SIC = "sic"
_ESTIMATORS = (ZF, SIC)
_REDUCTIONS = ("blll", "bkz")

BOTH_EXACT_TOL = 1e-12  # residuals below this count as exact hits


@dataclass(frozen=True)
class EfficiencyBoundQuery:
    """Which closed-form efficiency bound to evaluate."""

    estimator: str  # 'zf' | 'sic'
    reduction: str  # 'blll' | 'bkz'
    n: int
    delta: float = 0.75

    def __post_init__(self):
        if self.estimator not in _ESTIMATORS:
            raise InvalidDimensionError(f"estimator must be one of {_ESTIMATORS}")
        if self.reduction not in _REDUCTIONS:
            raise InvalidDimensionError(f"reduction must be one of {_REDUCTIONS}")
        if self.n < 1:
            raise InvalidDimensionError("n must be >= 1")
        if not 0.25 < self.delta < 1.0:
            raise InvalidDimensionError("delta must lie in (1/4, 1)")


def zf_decode(inst: CvpInstance) -> np.ndarray:
    """Round the pseudo-inverse image of the target (Babai rounding)."""
    return round_half_away_int(pseudo_inverse(inst.basis.mat) @ inst.target)


def sic_decode(inst: CvpInstance) -> np.ndarray:
    """Successive interference cancellation: nearest-plane back-substitution
    on the QR factors, last coordinate first."""
    qf = inst.basis.qr
    return _kernels._babai(qf.r, qf.q.T @ inst.target)


def lmmse_decode(h, y, noise_var: float, signal_var: float) -> np.ndarray:
    """Regularised linear estimate rounded to integers.

    Solves (H^T H + (noise_var/signal_var) I) x = H^T y and rounds; equals
    zf_decode in the noise_var -> 0 limit.
    """
    if noise_var < 0 or signal_var <= 0:
        raise InvalidDimensionError("noise_var must be >= 0 and signal_var > 0")
    a = h.mat if isinstance(h, LatticeBasis) else np.asarray(h, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != a.shape[0]:
        raise InvalidDimensionError("y length must match the matrix rows")
    gram = a.T @ a + (noise_var / signal_var) * np.eye(a.shape[1])
    return round_half_away_int(np.linalg.solve(gram, a.T @ y))


def efficiency_bound(q: EfficiencyBoundQuery) -> float:
    """Closed-form worst-case residual ratio for the queried pairing.

    SIC bounds collapse to 1 at n = 1 (the first layer is always exact).
    """
    n = q.n
    if q.estimator == SIC:
        if n == 1:
            return 1.0
        if q.reduction == "blll":
            beta = 1.0 / math.sqrt(q.delta - 0.25)
            return beta**n / math.sqrt(beta**2 - 1.0)
        return 1.0 + (8.0 * n / 9.0) * (n - 1.0) ** (1.0 + math.log(n - 1.0) / 2.0)
    if q.reduction == "blll":
        beta = 1.0 / math.sqrt(q.delta - 0.25)
        return 2.0 * n * beta ** (n * (n - 1) / 2.0) + 1.0
    prod = math.prod(j ** (2.0 + math.log(j) / 2.0) for j in range(1, n + 1))
    return 2.0 * n * prod + 1.0


def measure_efficiency(inst: CvpInstance, xhat) -> float:
    """Residual of xhat divided by the exact sphere-decoder residual.

    Defined as 1 when both residuals are below BOTH_EXACT_TOL (both hit the
    lattice point exactly).
    """
    x_cvp, _ = sphere_cvp(inst)
    opt = inst.residual(x_cvp)
    got = inst.residual(np.asarray(xhat, dtype=np.float64))
    if got < BOTH_EXACT_TOL and opt < BOTH_EXACT_TOL:
        return 1.0
    return got / opt
