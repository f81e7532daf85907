"""Exact CVP/SVP solvers via Schnorr-Euchner depth-first enumeration.

These are the oracles the whole package leans on: the sphere decoder doubles
as the optimal precoding baseline, the shortest-vector routine backs the
strong reduction algorithms, and the per-layer node counts feed the flop
accounting (2k+7 flops per node expanded in layer k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionTooLargeError, InvalidDimensionError, RadiusTooSmallError
from .linalg import LatticeBasis

SVP_MAX_DIM = 24
MINIMA_MAX_DIM = 12


@dataclass(frozen=True)
class CvpInstance:
    """A lattice basis and the target vector to decode against it."""

    basis: LatticeBasis
    target: np.ndarray

    def __post_init__(self):
        y = np.ascontiguousarray(np.asarray(self.target, dtype=np.float64).ravel())
        if y.shape[0] != self.basis.rows:
            raise InvalidDimensionError(
                f"target length {y.shape[0]} != basis rows {self.basis.rows}"
            )
        if not np.all(np.isfinite(y)):
            raise InvalidDimensionError("target has non-finite entries")
        object.__setattr__(self, "target", y)

    def residual(self, x) -> float:
        """Euclidean distance ||target - basis @ x||."""
        return float(np.linalg.norm(self.target - self.basis.mat @ np.asarray(x, dtype=np.float64)))


@dataclass
class EnumStats:
    """Per-layer visited-node counts of one enumeration run."""

    nodes_per_layer: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def total_nodes(self) -> int:
        return int(self.nodes_per_layer.sum())

    @property
    def flops(self) -> int:
        """Sum over layers k of (2k+7) * nodes_k."""
        k = np.arange(1, self.nodes_per_layer.shape[0] + 1, dtype=np.int64)
        return int(np.sum((2 * k + 7) * self.nodes_per_layer))


def babai_nearest_plane(inst: CvpInstance) -> np.ndarray:
    """Nearest-plane (successive rounding) approximate CVP, int64 coefficients."""
    qf = inst.basis.qr
    ytil = qf.q.T @ inst.target
    return _kernels._babai(qf.r, ytil)


def sphere_cvp(inst: CvpInstance, radius=None, shrink: bool = True):
    """Exact closest lattice point to the target.

    Returns (x, stats) where x attains the global minimum of
    ||target - basis @ x|| over integer vectors, ties broken by the
    lexicographically smallest x. When radius is given it bounds the
    full-space distance; if it excludes every lattice point a
    RadiusTooSmallError is raised. Without a radius the search starts from
    the nearest-plane residual (the first leaf of the zig-zag descent).

    shrink=True tightens the pruning radius at every leaf (the fast
    decoder). shrink=False expands the whole tree inside the initial
    radius, reproducing the classic sphere-precoding search whose visited
    nodes the complexity accounting charges.
    """
    qf = inst.basis.qr
    ytil = qf.q.T @ inst.target
    offset_sq = float(inst.target @ inst.target - ytil @ ytil)
    if offset_sq < 0.0:
        offset_sq = 0.0
    if radius is None:
        if shrink:
            bound_sq = np.inf
        else:
            bound_sq = _kernels._babai_dist_sq(qf.r, ytil)
    else:
        bound_sq = float(radius) ** 2 - offset_sq
        if bound_sq < 0.0:
            raise RadiusTooSmallError(
                f"radius {radius} is below the distance to the basis column span"
            )
    found, x, _, nodes = _kernels._sphere(qf.r, ytil, bound_sq, False, shrink)
    if not found:
        raise RadiusTooSmallError(f"no lattice point within radius {radius}")
    return x.copy(), EnumStats(nodes_per_layer=nodes)


def shortest_vector(basis):
    """Coefficients and length of a shortest nonzero lattice vector.

    The returned coefficient vector is sign-normalised so its first nonzero
    entry is positive.
    """
    basis = basis if isinstance(basis, LatticeBasis) else LatticeBasis(basis)
    n = basis.cols
    if n > SVP_MAX_DIM:
        raise DimensionTooLargeError(f"shortest_vector is guarded at n <= {SVP_MAX_DIM}")
    qf = basis.qr
    zero = np.zeros(n)
    bound_sq = float(basis.col_norms.min()) ** 2 * (1.0 + 1e-12) + _kernels.TIE_TOL
    found, v, best_sq, _ = _kernels._sphere(qf.r, zero, bound_sq, True, True)
    if not found:  # pragma: no cover - a basis column always qualifies
        raise RadiusTooSmallError("no nonzero vector found; basis is degenerate")
    for entry in v:
        if entry != 0:
            if entry < 0:
                v = -v
            break
    return v.copy(), float(np.sqrt(best_sq))


def successive_minima_list(basis, k: int) -> np.ndarray:
    """The first k successive minima: entry i-1 is the smallest r such that
    the lattice holds i linearly independent vectors of length at most r.

    Enumerates all lattice points inside a ball guaranteed to contain k
    independent vectors and greedily collects independent ones in order of
    increasing length.
    """
    from .reduction import lll_reduce, ReductionMethod  # local import, avoids a cycle

    basis = basis if isinstance(basis, LatticeBasis) else LatticeBasis(basis)
    n = basis.cols
    if not 1 <= k <= n:
        raise InvalidDimensionError(f"need 1 <= k <= {n}, got {k}")
    if n > MINIMA_MAX_DIM:
        raise DimensionTooLargeError(f"successive minima are guarded at n <= {MINIMA_MAX_DIM}")

    # Reduce first: same lattice, far fewer points inside the search ball.
    red = lll_reduce(basis, ReductionMethod.lll()).reduced
    radius = float(np.sort(red.col_norms)[k - 1]) * (1.0 + 1e-9)
    qf = red.qr
    zero = np.zeros(n)

    cap = 4096
    while True:
        out_x = np.zeros((cap, n), dtype=np.int64)
        out_d = np.zeros(cap)
        count = _kernels._enum_all(qf.r, zero, radius * radius, out_x, out_d)
        if count >= 0:
            break
        cap *= 4
        if cap > 2_000_000:
            raise DimensionTooLargeError("too many lattice points inside the search ball")

    order = np.argsort(out_d[:count], kind="stable")
    minima = np.zeros(k)
    collected = np.zeros((basis.rows, 0))
    for idx in order:
        if out_d[idx] <= _kernels.TIE_TOL:
            continue  # the zero point
        vec = red.mat @ out_x[idx].astype(np.float64)
        if collected.shape[1] > 0:
            resid = vec - collected @ np.linalg.lstsq(collected, vec, rcond=None)[0]
            if np.linalg.norm(resid) <= 1e-9 * np.linalg.norm(vec):
                continue
        collected = np.column_stack([collected, vec])
        minima[collected.shape[1] - 1] = np.sqrt(out_d[idx])
        if collected.shape[1] == k:
            return minima
    raise RadiusTooSmallError("search ball missed an independent vector")  # pragma: no cover


def successive_minima(basis, k: int) -> float:
    """The k-th successive minimum (see successive_minima_list)."""
    return float(successive_minima_list(basis, k)[k - 1])
