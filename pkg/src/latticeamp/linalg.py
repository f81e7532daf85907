"""Dense matrix/vector primitives and lattice quality metrics.

All matrices are dense float64 numpy arrays. A lattice basis is a tall or
square m x n matrix of full column rank whose columns generate the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidDimensionError, RankDeficientError

RANK_TOL = 1e-10  # smallest |R_ii| must exceed RANK_TOL * largest |R_ii|


def round_half_away(x):
    """Element-wise rounding with halves away from zero (global convention).

    numpy's default rounds halves to even, which would make decoders and
    reduction disagree on ties.
    """
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def round_half_away_int(x):
    """round_half_away cast to an int64 vector."""
    return round_half_away(x).astype(np.int64)


@dataclass(frozen=True)
class QrFactors:
    """Thin QR factors with orthonormal q columns and positive r diagonal."""

    q: np.ndarray  # m x n, orthonormal columns
    r: np.ndarray  # n x n, upper triangular, positive diagonal


def _as_array(mat) -> np.ndarray:
    if isinstance(mat, LatticeBasis):
        return mat.mat
    a = np.asarray(mat, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidDimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DegenerateInputError("matrix has non-finite entries")
    return a


def _qr_positive(a: np.ndarray) -> QrFactors:
    """Householder QR with the diagonal of R forced positive."""
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r).copy()
    flip = diag < 0
    if np.any(flip):
        sign = np.where(flip, -1.0, 1.0)
        q = q * sign[np.newaxis, :]
        r = r * sign[:, np.newaxis]
    return QrFactors(q=np.ascontiguousarray(q), r=np.ascontiguousarray(r))


class LatticeBasis:
    """A full-column-rank basis matrix with cached column norms and QR factors.

    Raises RankDeficientError when the smallest R diagonal falls below
    RANK_TOL relative to the largest.
    """

    __slots__ = ("mat", "col_norms", "_qr")

    def __init__(self, mat):
        a = _as_array(mat)
        m, n = a.shape
        if m < n:
            raise InvalidDimensionError(f"basis must be tall or square, got {m}x{n}")
        self.mat = np.ascontiguousarray(a)
        self.col_norms = np.linalg.norm(self.mat, axis=0)
        self._qr = _qr_positive(self.mat)
        diag = np.diagonal(self._qr.r)
        if diag.min() <= RANK_TOL * diag.max():
            raise RankDeficientError(
                f"basis is rank deficient (R diagonal ratio {diag.min():.3e}/{diag.max():.3e})"
            )

    @property
    def rows(self) -> int:
        return self.mat.shape[0]

    @property
    def cols(self) -> int:
        return self.mat.shape[1]

    @property
    def qr(self) -> QrFactors:
        return self._qr

    def __repr__(self):
        return f"LatticeBasis({self.rows}x{self.cols})"


def qr_decompose(basis) -> QrFactors:
    """QR factors of a full-column-rank basis, positive diagonal convention."""
    if isinstance(basis, LatticeBasis):
        return basis.qr
    return LatticeBasis(basis).qr


def pseudo_inverse(b) -> np.ndarray:
    """Moore-Penrose pseudo-inverse via the normal equations.

    Wide b (full row rank): b^T (b b^T)^-1. Tall b (full column rank):
    (b^T b)^-1 b^T. Raises RankDeficientError when the Gram matrix is
    numerically singular.
    """
    a = _as_array(b)
    m, n = a.shape
    try:
        if m <= n:
            gram = a @ a.T
            _check_gram(gram)
            return np.linalg.solve(gram, a).T.copy()
        gram = a.T @ a
        _check_gram(gram)
        return np.linalg.solve(gram, a.T)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(str(exc)) from exc


def _check_gram(gram: np.ndarray):
    d = np.linalg.eigvalsh(gram)
    if d.min() <= (RANK_TOL**2) * max(d.max(), 1e-300):
        raise RankDeficientError("Gram matrix is numerically singular")


def orthogonality_defect(basis) -> float:
    """Product of column norms over the lattice volume; 1 iff orthogonal columns.

    Evaluated in the log domain so badly skewed bases do not overflow.
    """
    basis = basis if isinstance(basis, LatticeBasis) else LatticeBasis(basis)
    diag = np.diagonal(basis.qr.r)
    return float(np.exp(np.sum(np.log(basis.col_norms)) - np.sum(np.log(diag))))


def coherence(basis) -> float:
    """Largest absolute cosine between distinct columns, in [0, 1]."""
    a = basis.mat if isinstance(basis, LatticeBasis) else _as_array(basis)
    n = a.shape[1]
    if n < 2:
        raise InvalidDimensionError("coherence needs at least two columns")
    norms = np.linalg.norm(a, axis=0)
    g = np.abs(a.T @ a) / np.outer(norms, norms)
    np.fill_diagonal(g, 0.0)
    return float(min(g.max(), 1.0))


def small_factor(basis) -> float:
    """Largest share a single entry takes of its row or column absolute sum.

    Small values indicate no entry dominates the mixing, which is the regime
    where message-passing approximations hold.
    """
    a = np.abs(basis.mat if isinstance(basis, LatticeBasis) else _as_array(basis))
    col_sums = a.sum(axis=0)
    row_sums = a.sum(axis=1)
    if np.any(col_sums == 0.0) or np.any(row_sums == 0.0):
        raise DegenerateInputError("matrix has an all-zero row or column")
    frac_col = a / col_sums[np.newaxis, :]
    frac_row = a / row_sums[:, np.newaxis]
    return float(np.maximum(frac_col, frac_row).max())


def gram_determinant(basis) -> float:
    """det(H^T H) computed as the squared product of the R diagonal."""
    basis = basis if isinstance(basis, LatticeBasis) else LatticeBasis(basis)
    diag = np.diagonal(basis.qr.r)
    return float(np.exp(2.0 * np.sum(np.log(diag))))


def save_matrix(path, mat):
    """Write a matrix as text: a `rows cols` header then one row per line."""
    a = _as_array(mat)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{a.shape[0]} {a.shape[1]}\n")
        for row in a:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_matrix(path) -> np.ndarray:
    """Read a matrix written by save_matrix."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DegenerateInputError(f"{path}: expected 'rows cols' header")
        rows, cols = int(header[0]), int(header[1])
        data = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    if data.shape != (rows, cols):
        raise DegenerateInputError(
            f"{path}: header says {rows}x{cols}, body is {data.shape[0]}x{data.shape[1]}"
        )
    return data
