"""Lattice reduction: LLL, boosted LLL, KZ and boosted KZ.

Boosted variants add a length-reduction step on top of the classic
conditions: each column is offered a shorter representative found by
quantising its projection onto the prefix lattice (nearest-plane for
boosted LLL, the exact sphere decoder for boosted KZ) and replaced only on
strict improvement. Subtracting prefix-lattice vectors never touches the R
diagonal, so the classic conditions survive the extra step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionTooLargeError,
    InvalidDimensionError,
    IterationLimitError,
)
from .linalg import LatticeBasis, _qr_positive, orthogonality_defect, round_half_away

MAX_SWAPS = 1_000_000
KZ_MAX_DIM = 24
PRED_TOL = 1e-9  # slack on reduction-predicate inequalities

LLL = "lll"
BLLL = "blll"
KZ = "kz"
BKZ_BOOSTED = "bkz"
_TAGS = (LLL, BLLL, KZ, BKZ_BOOSTED)


@dataclass(frozen=True)
class ReductionMethod:
    """Choice of reduction algorithm plus its parameters.

    delta is the Lovasz constant in (1/4, 1); list_size is the candidate
    list length of the approximate CVP oracle used by boosted LLL.
    """

    tag: str
    delta: float = 0.75
    list_size: int = 1

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise InvalidDimensionError(f"unknown reduction tag {self.tag!r}")
        if not 0.25 < self.delta < 1.0:
            raise InvalidDimensionError(f"delta must lie in (1/4, 1), got {self.delta}")
        if self.list_size < 1:
            raise InvalidDimensionError("list_size must be >= 1")

    @property
    def beta(self) -> float:
        return 1.0 / math.sqrt(self.delta - 0.25)

    @classmethod
    def lll(cls, delta: float = 0.75):
        return cls(tag=LLL, delta=delta)

    @classmethod
    def blll(cls, delta: float = 0.75, list_size: int = 1):
        return cls(tag=BLLL, delta=delta, list_size=list_size)

    @classmethod
    def kz(cls):
        return cls(tag=KZ)

    @classmethod
    def bkz_boosted(cls):
        return cls(tag=BKZ_BOOSTED)


@dataclass
class ReductionOutcome:
    """Reduced basis, the unimodular transform that produced it, and metrics.

    reduced.mat equals the original basis times `unimodular`; swap_count is
    the number of column swaps (LLL family) or nontrivial stage transforms
    (KZ family).
    """

    reduced: LatticeBasis
    unimodular: np.ndarray
    swap_count: int
    od_before: float
    od_after: float


def int_det(a) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    mat = [[int(v) for v in row] for row in np.asarray(a)]
    n = len(mat)
    if n == 0 or any(len(row) != n for row in mat):
        raise InvalidDimensionError("int_det needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if mat[k][k] == 0:
            for i in range(k + 1, n):
                if mat[i][k] != 0:
                    mat[k], mat[i] = mat[i], mat[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return sign * mat[n - 1][n - 1]


def unimodular_completion(z) -> np.ndarray:
    """Extend a primitive integer vector z to a unimodular matrix whose
    first column is z.

    Works by reducing z to a signed unit vector with elementary integer
    operations while accumulating their inverses.
    """
    zz = [int(v) for v in np.asarray(z).ravel()]
    k = len(zz)
    if k == 0:
        raise InvalidDimensionError("empty vector")
    minv = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    def _col_addmul(dst, src, q):
        for r in range(k):
            minv[r][dst] += q * minv[r][src]

    while True:
        nonzero = [i for i in range(k) if zz[i] != 0]
        if not nonzero:
            raise InvalidDimensionError("zero vector has no unimodular completion")
        if len(nonzero) == 1 and abs(zz[nonzero[0]]) == 1:
            break
        p = min(nonzero, key=lambda i: abs(zz[i]))
        for j in nonzero:
            if j == p:
                continue
            q = zz[j] // zz[p]
            if q != 0:
                zz[j] -= q * zz[p]
                _col_addmul(p, j, q)

    s = next(i for i in range(k) if zz[i] != 0)
    if s != 0:
        zz[0], zz[s] = zz[s], zz[0]
        for r in range(k):
            minv[r][0], minv[r][s] = minv[r][s], minv[r][0]
    if zz[0] == -1:
        for r in range(k):
            minv[r][0] = -minv[r][0]
    out = np.array(minv, dtype=np.int64)
    if not np.array_equal(out[:, 0], np.asarray(z, dtype=np.int64).ravel()):
        raise InvalidDimensionError("input vector is not primitive")
    return out


def _as_basis(basis) -> LatticeBasis:
    return basis if isinstance(basis, LatticeBasis) else LatticeBasis(basis)


def _outcome(original: LatticeBasis, b, u, swaps) -> ReductionOutcome:
    reduced = LatticeBasis(b)
    return ReductionOutcome(
        reduced=reduced,
        unimodular=u,
        swap_count=int(swaps),
        od_before=orthogonality_defect(original),
        od_after=orthogonality_defect(reduced),
    )


def size_reduce(basis) -> ReductionOutcome:
    """One full size-reduction pass: |R_ij/R_ii| <= 1/2 for all j > i."""
    basis = _as_basis(basis)
    b = basis.mat.copy()
    u = np.eye(basis.cols, dtype=np.int64)
    _kernels._size_reduce(b, u)
    return _outcome(basis, b, u, 0)


def lll_reduce(basis, method: ReductionMethod | None = None) -> ReductionOutcome:
    """LLL reduction with unimodular tracking."""
    basis = _as_basis(basis)
    method = method or ReductionMethod.lll()
    b = basis.mat.copy()
    u = np.eye(basis.cols, dtype=np.int64)
    swaps = _kernels._lll(b, u, method.delta, MAX_SWAPS)
    if swaps < 0:
        raise IterationLimitError(f"LLL exceeded {MAX_SWAPS} swaps; input looks pathological")
    return _outcome(basis, b, u, swaps)


def _list_nearest_plane(rmat, ytil, list_size: int) -> np.ndarray:
    """Approximate CVP on an upper-triangular system keeping `list_size`
    partial candidates per layer; returns the best leaf's coefficients."""
    if list_size == 1:
        return _kernels._babai(rmat, ytil)
    k = rmat.shape[0]
    beams = [(0.0, [])]  # (partial squared distance, fixed coeffs bottom-up)
    for i in range(k - 1, -1, -1):
        nxt = []
        for dist, coeffs in beams:
            s = ytil[i] - sum(rmat[i, i + 1 + j] * c for j, c in enumerate(reversed(coeffs)))
            center = s / rmat[i, i]
            base = int(round_half_away(center))
            cands = [base]
            for off in range(1, list_size):
                cands.append(base + off)
                cands.append(base - off)
            for c in cands[: 2 * list_size - 1]:
                diff = (center - c) * rmat[i, i]
                nxt.append((dist + diff * diff, coeffs + [c]))
        nxt.sort(key=lambda t: t[0])
        beams = nxt[:list_size]
    best = min(beams, key=lambda t: t[0])
    return np.array(list(reversed(best[1])), dtype=np.int64)


def _length_sweep(b, u, exact: bool, list_size: int) -> bool:
    """Offer every column i >= 2 a shorter representative modulo the prefix
    lattice; replace on strict improvement only. Returns True if anything
    changed."""
    n = b.shape[1]
    rmat = _qr_positive(b).r.copy()
    changed = False
    for i in range(1, n):
        target = rmat[:i, i].copy()
        prefix = np.ascontiguousarray(rmat[:i, :i])
        if exact:
            _, c, _, _ = _kernels._sphere(prefix, np.ascontiguousarray(target), np.inf, False, True)
        else:
            c = _list_nearest_plane(prefix, target, list_size)
        resid = target - prefix @ c.astype(np.float64)
        old_sq = float(target @ target)
        new_sq = float(resid @ resid)
        if new_sq < old_sq - 1e-12 * max(1.0, old_sq):
            b[:, i] -= b[:, :i] @ c.astype(np.float64)
            u[:, i] -= u[:, :i] @ c
            rmat[:i, i] = resid
            changed = True
    return changed


def blll_reduce(basis, method: ReductionMethod | None = None) -> ReductionOutcome:
    """Boosted LLL: LLL followed by nearest-plane length reduction sweeps.

    Running full LLL first guarantees the diagonal reduction conditions and
    makes every output column no longer than plain LLL's; the sweeps then
    iterate to a joint fixed point (each replacement strictly shortens a
    column, so this terminates).
    """
    basis = _as_basis(basis)
    method = method or ReductionMethod.blll()
    b = basis.mat.copy()
    u = np.eye(basis.cols, dtype=np.int64)
    swaps = _kernels._lll(b, u, method.delta, MAX_SWAPS)
    if swaps < 0:
        raise IterationLimitError(f"LLL exceeded {MAX_SWAPS} swaps; input looks pathological")
    for _ in range(1000):
        if not _length_sweep(b, u, exact=False, list_size=method.list_size):
            break
    else:  # pragma: no cover - norms strictly decrease, cannot cycle
        raise IterationLimitError("length reduction failed to reach a fixed point")
    return _outcome(basis, b, u, swaps)


def kz_reduce(basis) -> ReductionOutcome:
    """Korkine-Zolotarev reduction via shortest-vector insertion per stage."""
    basis = _as_basis(basis)
    n = basis.cols
    if n > KZ_MAX_DIM:
        raise DimensionTooLargeError(f"kz_reduce is guarded at n <= {KZ_MAX_DIM}")
    b = basis.mat.copy()
    u = np.eye(n, dtype=np.int64)
    stages = 0
    for i in range(n):
        rmat = _qr_positive(b).r
        block = np.ascontiguousarray(rmat[i:, i:])
        k = n - i
        if k == 1:
            break
        zero = np.zeros(k)
        bound_sq = float(min(np.linalg.norm(block[: j + 1, j]) for j in range(k))) ** 2
        found, z, _, _ = _kernels._sphere(
            block, zero, bound_sq * (1.0 + 1e-12) + _kernels.TIE_TOL, True, True
        )
        if not found:  # pragma: no cover
            raise InvalidDimensionError("SVP stage found no vector")
        first = np.zeros(k, dtype=np.int64)
        first[0] = 1
        if not (np.array_equal(z, first) or np.array_equal(z, -first)):
            t = unimodular_completion(z)
            b[:, i:] = b[:, i:] @ t.astype(np.float64)
            u[:, i:] = u[:, i:] @ t
            stages += 1
    _kernels._size_reduce(b, u)
    return _outcome(basis, b, u, stages)


def bkz_boosted_reduce(basis) -> ReductionOutcome:
    """Boosted KZ: KZ projection conditions plus exact-CVP length reduction.

    One sweep reaches the fixed point: after replacing a column, the zero
    correction is already optimal for the new column, and prefix lattices
    are unchanged by the replacements.
    """
    basis = _as_basis(basis)
    out = kz_reduce(basis)
    b = out.reduced.mat.copy()
    u = out.unimodular.copy()
    _length_sweep(b, u, exact=True, list_size=1)
    return _outcome(basis, b, u, out.swap_count)


def _r_of(basis) -> np.ndarray:
    basis = _as_basis(basis)
    return basis.qr.r


def verify_size_reduced(basis) -> bool:
    rmat = _r_of(basis)
    n = rmat.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if abs(rmat[i, j] / rmat[i, i]) > 0.5 + PRED_TOL:
                return False
    return True


def verify_lll(basis, delta: float = 0.75) -> bool:
    """Size-reduction plus Lovasz conditions, with PRED_TOL slack."""
    if not verify_size_reduced(basis):
        return False
    rmat = _r_of(basis)
    n = rmat.shape[0]
    for i in range(n - 1):
        lhs = delta * rmat[i, i] ** 2
        rhs = rmat[i, i + 1] ** 2 + rmat[i + 1, i + 1] ** 2
        if lhs > rhs + PRED_TOL * max(1.0, rmat[i, i] ** 2):
            return False
    return True


def verify_diagonal_reduced(basis, delta: float = 0.75) -> bool:
    """Lovasz test with the superdiagonal entry re-rounded first."""
    rmat = _r_of(basis)
    n = rmat.shape[0]
    for i in range(n - 1):
        q = float(round_half_away(rmat[i, i + 1] / rmat[i, i]))
        resid = rmat[i, i + 1] - q * rmat[i, i]
        lhs = delta * rmat[i, i] ** 2
        rhs = resid**2 + rmat[i + 1, i + 1] ** 2
        if lhs > rhs + PRED_TOL * max(1.0, rmat[i, i] ** 2):
            return False
    return True


def _projection_conditions_hold(basis) -> bool:
    rmat = _r_of(basis)
    n = rmat.shape[0]
    for i in range(n - 1):
        block = np.ascontiguousarray(rmat[i:, i:])
        k = n - i
        bound_sq = float(min(np.linalg.norm(block[: j + 1, j]) for j in range(k))) ** 2
        found, _, best_sq, _ = _kernels._sphere(
            block, np.zeros(k), bound_sq * (1.0 + 1e-12) + _kernels.TIE_TOL, True, True
        )
        if not found:
            return False
        if rmat[i, i] ** 2 > best_sq * (1.0 + PRED_TOL) + PRED_TOL:
            return False
    return True


def verify_kz(basis) -> bool:
    """Size-reduction plus per-stage shortest-projected-vector conditions."""
    basis = _as_basis(basis)
    if basis.cols > KZ_MAX_DIM:
        raise DimensionTooLargeError(f"verify_kz is guarded at n <= {KZ_MAX_DIM}")
    return verify_size_reduced(basis) and _projection_conditions_hold(basis)


def verify_bkz_boosted(basis) -> bool:
    """Projection conditions plus exact-CVP length-reduction conditions."""
    basis = _as_basis(basis)
    if basis.cols > KZ_MAX_DIM:
        raise DimensionTooLargeError(f"verify_bkz_boosted is guarded at n <= {KZ_MAX_DIM}")
    if not _projection_conditions_hold(basis):
        return False
    rmat = basis.qr.r
    n = basis.cols
    for i in range(1, n):
        target = np.ascontiguousarray(rmat[:i, i])
        prefix = np.ascontiguousarray(rmat[:i, :i])
        _, c, best_sq, _ = _kernels._sphere(prefix, target, np.inf, False, True)
        old_sq = float(target @ target)
        if old_sq > best_sq + PRED_TOL * max(1.0, old_sq):
            return False
    return True


def od_bound(method: ReductionMethod, n: int) -> float:
    """Closed-form orthogonality-defect bound for a reduced basis.

    LLL and boosted LLL share the beta^(n(n-1)/2) bound; KZ and boosted KZ
    use their product-form bounds. A single vector is always orthogonal.

    Caveat: the boosted-KZ formula evaluates to 0.943 at n = 2, below the
    Hadamard floor of 1, and the hexagonal lattice (defect 2/sqrt(3))
    exceeds it; that formula only carries meaning from n = 3 upward. The
    KZ bound stays valid for boosted-KZ outputs at any n since boosting
    only shortens columns.
    """
    if n < 1:
        raise InvalidDimensionError("n must be >= 1")
    if n == 1:
        return 1.0
    if method.tag in (LLL, BLLL):
        return method.beta ** (n * (n - 1) / 2.0)
    kz_prod = math.prod(math.sqrt(i + 3) / 2.0 for i in range(1, n + 1))
    tail = (2.0 * n / 3.0) ** (n / 2.0)
    if method.tag == KZ:
        return kz_prod * tail
    prod_nm1 = math.prod(math.sqrt(i + 3) / 2.0 for i in range(1, n))
    return (math.sqrt(n) / 2.0) * prod_nm1 * tail


def reduce_basis(basis, method: ReductionMethod) -> ReductionOutcome:
    """Dispatch to the reducer selected by method.tag."""
    if method.tag == LLL:
        return lll_reduce(basis, method)
    if method.tag == BLLL:
        return blll_reduce(basis, method)
    if method.tag == KZ:
        return kz_reduce(basis)
    return bkz_boosted_reduce(basis)
