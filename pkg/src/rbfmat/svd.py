"""Truncated low-rank baselines via singular value and eigen decompositions.

The general path keeps the ``rank`` largest singular triplets of a dense
matrix; the symmetric path keeps the eigenpairs of largest magnitude, so
the factors stay exactly symmetric (and eigenvalues may be negative).
Either way the approximation stores ``left (n x rank)``, ``values
(rank,)`` and ``right (m x rank)`` with reconstruction
``left @ diag(values) @ right.T``.

Signs are normalized so results are reproducible across runs: within each
left vector the first entry of largest magnitude is made nonnegative, and
the paired right vector is flipped along with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import as_matrix


@dataclass(frozen=True)
class SvdApprox:
    """A rank-``r`` factorization ``left @ diag(values) @ right.T``.

    ``symmetric`` marks the eigendecomposition variant, where ``right`` is
    the same array as ``left`` and ``values`` are signed eigenvalues; the
    general variant has nonnegative ``values`` in descending order.
    """

    left: np.ndarray
    values: np.ndarray
    right: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        left = np.asarray(self.left, dtype=np.float64)
        right = np.asarray(self.right, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if left.ndim != 2 or right.ndim != 2 or values.ndim != 1:
            raise ValueError("left/right must be 2-D, values 1-D")
        r = values.size
        if left.shape[1] != r or right.shape[1] != r:
            raise ValueError("left/right must have one column per value")
        if self.symmetric and left.shape[0] != right.shape[0]:
            raise ValueError("symmetric approximation must be square")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "right", right)

    @property
    def rank(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.left.shape[0]

    @property
    def m(self) -> int:
        return self.right.shape[0]


def _fix_signs(left: np.ndarray, right: np.ndarray) -> None:
    """Flip paired columns so each left column's largest entry is >= 0."""
    for k in range(left.shape[1]):
        col = left[:, k]
        if col.size and col[np.argmax(np.abs(col))] < 0:
            left[:, k] = -col
            right[:, k] = -right[:, k]


def truncated_svd(matrix, rank: int) -> SvdApprox:
    """Best rank-``rank`` approximation by truncating the SVD."""
    matrix = as_matrix(matrix, "matrix")
    n, m = matrix.shape
    if not 0 <= rank <= min(n, m):
        raise ValueError(f"rank must be in [0, {min(n, m)}], got {rank}")
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    left = u[:, :rank].copy()
    right = vh[:rank].T.copy()
    _fix_signs(left, right)
    return SvdApprox(left, s[:rank].copy(), right, symmetric=False)


def symmetric_lowrank(matrix, rank: int) -> SvdApprox:
    """Keep the ``rank`` eigenpairs of largest magnitude of a symmetric matrix.

    The reconstruction is exactly symmetric; eigenvalues keep their signs.
    """
    matrix = as_matrix(matrix, "matrix")
    n, m = matrix.shape
    if n != m:
        raise ValueError("symmetric_lowrank requires a square matrix")
    if not np.array_equal(matrix, matrix.T):
        raise ValueError("matrix is not symmetric")
    if not 0 <= rank <= n:
        raise ValueError(f"rank must be in [0, {n}], got {rank}")
    vals, vecs = np.linalg.eigh(matrix)
    order = np.argsort(-np.abs(vals), kind="stable")[:rank]
    vecs = vecs[:, order].copy()
    vals = vals[order].copy()
    _fix_signs(vecs, vecs)
    return SvdApprox(vecs, vals, vecs, symmetric=True)


def reconstruct(approx: SvdApprox) -> np.ndarray:
    """Dense matrix ``left @ diag(values) @ right.T``.

    Symmetric approximations are averaged with their transpose so the
    result is exactly symmetric despite rounding.
    """
    out = (approx.left * approx.values) @ approx.right.T
    if approx.symmetric:
        out += out.T
        out *= 0.5
    return out


def svd_mse_curve(matrix, max_rank: int) -> np.ndarray:
    """MSE of the best rank-r approximation for r = 0..max_rank.

    Uses the tail-energy identity: the squared Frobenius error of rank-r
    truncation is the sum of the squared singular values past r.
    """
    matrix = as_matrix(matrix, "matrix")
    n, m = matrix.shape
    if not 0 <= max_rank <= min(n, m):
        raise ValueError(f"max_rank must be in [0, {min(n, m)}], got {max_rank}")
    s = np.linalg.svd(matrix, compute_uv=False)
    sq = s * s
    tail = np.concatenate((np.cumsum(sq[::-1])[::-1], [0.0]))
    return tail[: max_rank + 1] / (n * m)


def svd_param_count(approx: SvdApprox) -> int:
    """Stored scalars: vectors plus values (shared vectors counted once)."""
    r = approx.rank
    if approx.symmetric:
        return r * approx.n + r
    return r * (approx.n + approx.m) + r


def svd_vector_param_count(approx: SvdApprox) -> int:
    """Vector entries only, for parameter-budget comparisons."""
    r = approx.rank
    return r * approx.n if approx.symmetric else r * (approx.n + approx.m)
