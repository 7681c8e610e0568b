"""Synthetic targets: smooth kernels, random graphs, and point clouds.

Every generator takes a ``numpy.random.Generator`` and documents its draw
order, so a fixed generator state reproduces outputs bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import RbfModel, evaluate_full


@dataclass(frozen=True)
class PointCloud:
    """Points as an (n, d) array, optionally with one scalar label per point."""

    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.size == 0:
            raise ValueError("points must be a nonempty 2-D array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.float64)
            if lab.shape != (pts.shape[0],):
                raise ValueError("labels must be one scalar per point")
            object.__setattr__(self, "labels", lab)

    def __len__(self) -> int:
        return self.points.shape[0]


def gaussian_matrix(n: int, m: int, rng) -> np.ndarray:
    """An n x m matrix of iid standard normals (row-major draw order)."""
    if n < 1 or m < 1:
        raise ValueError("dimensions must be positive")
    return rng.normal(0.0, 1.0, (n, m))


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = math.ceil(4.0 * sigma)
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(t * t) / (2.0 * sigma * sigma))
    kernel /= kernel.sum()
    return kernel


def _convolve_reflect(raw: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    radius = (kernel.size - 1) // 2
    n = raw.size
    padded = np.pad(raw, radius, mode="reflect") if n > 1 else np.full(
        2 * radius + 1, raw[0]
    )
    return np.convolve(padded, kernel, mode="valid")


def smoothed_gaussian_vector(n: int, sigma: float, rng) -> np.ndarray:
    """Standard normal noise blurred by a normalized Gaussian kernel.

    The kernel has radius ceil(4 * sigma) and weights
    exp(-t**2 / (2 * sigma**2)) normalized to sum one; the signal is
    mirror-padded (edge sample not repeated) so the output keeps length n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return _convolve_reflect(rng.normal(0.0, 1.0, n), _gaussian_kernel(sigma))


def k_exact2(n: int, rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """A smooth symmetric n x n target with a known 2-component structure.

    Draws two smoothed noise vectors (first with sigma 3, then sigma 6),
    rescales each so smoothing does not shrink its variance (a sum-one kernel
    damps unit-variance noise by its own l2 norm), and combines their
    unit-width RBF matrices with weights +5 and -4.  The rescaling keeps the
    coordinates spread over a few kernel widths, which is what makes this
    target hard for a low-rank baseline.  Returns (matrix, first vector,
    second vector).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    vectors = []
    for sigma in (3.0, 6.0):
        kernel = _gaussian_kernel(sigma)
        smoothed = _convolve_reflect(rng.normal(0.0, 1.0, n), kernel)
        vectors.append(smoothed / math.sqrt(float(np.sum(kernel * kernel))))
    u1, u2 = vectors
    truth = RbfModel(np.stack((u1, u2)), np.array([5.0, -4.0]), 0.0)
    return evaluate_full(truth), u1, u2


def _fill_symmetric(n: int, upper_values: np.ndarray) -> np.ndarray:
    adj = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    adj[iu] = upper_values
    adj += adj.T
    return adj


def erdos_renyi(n: int, p: float, rng) -> np.ndarray:
    """Adjacency matrix of G(n, p): each unordered pair independently.

    Pairs (i, j), i < j are decided in row-major order from one uniform
    draw each; the result is symmetric 0/1 with a zero diagonal.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    draws = rng.random(n * (n - 1) // 2)
    return _fill_symmetric(n, (draws < p).astype(np.float64))


def barabasi_albert(n: int, m: int, rng) -> np.ndarray:
    """Preferential-attachment graph: m-clique seed, then m edges per vertex.

    Vertices m..n-1 arrive in order; each picks m distinct targets among
    the earlier vertices, sequentially, with probability proportional to
    the degrees as they were before its arrival (picked targets are
    excluded from later picks of the same vertex).  The edge count is
    always m*(m-1)/2 + m*(n-m).
    """
    if m < 1:
        raise ValueError("m must be positive")
    if n <= m:
        raise ValueError("n must exceed m")
    adj = np.zeros((n, n))
    adj[:m, :m] = 1.0
    np.fill_diagonal(adj, 0.0)
    degrees = adj.sum(axis=1)
    for v in range(m, n):
        weights = degrees[:v].copy()
        for _ in range(m):
            pick = int(rng.choice(v, p=weights / weights.sum()))
            adj[v, pick] = adj[pick, v] = 1.0
            weights[pick] = 0.0
        degrees = adj.sum(axis=1)
    return adj


def sbm(block_sizes, p_in: float, p_out: float, rng) -> tuple[np.ndarray, np.ndarray]:
    """Stochastic block model with vertices ordered by block.

    Pair (i, j), i < j connects with probability ``p_in`` inside a block
    and ``p_out`` across blocks, decided in row-major order from one
    uniform draw each.  Returns (adjacency, integer block label per
    vertex).
    """
    sizes = [int(s) for s in block_sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("block sizes must be positive")
    for q in (p_in, p_out):
        if not 0.0 <= q <= 1.0:
            raise ValueError("probabilities must be in [0, 1]")
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = labels.size
    iu = np.triu_indices(n, k=1)
    same = labels[iu[0]] == labels[iu[1]]
    thresholds = np.where(same, p_in, p_out)
    draws = rng.random(iu[0].size)
    return _fill_symmetric(n, (draws < thresholds).astype(np.float64)), labels


def s_curve(count: int, noise: float, rng) -> PointCloud:
    """Points on an S-shaped surface in 3-D, labeled by curve position.

    With t uniform on (-1.5*pi, 1.5*pi) and y uniform on (0, 2), points
    are (sin t, y, sign(t) * (cos t - 1)), plus iid Normal(0, noise**2)
    on every coordinate when ``noise`` > 0.  Draw order: all t, all y,
    then the noise block.  Labels are t.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if noise < 0:
        raise ValueError("noise must be nonnegative")
    t = 1.5 * np.pi * (2.0 * rng.random(count) - 1.0)
    y = 2.0 * rng.random(count)
    pts = np.column_stack((np.sin(t), y, np.sign(t) * (np.cos(t) - 1.0)))
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, (count, 3))
    return PointCloud(pts, labels=t)


def soft_distance_matrix(cloud: PointCloud | np.ndarray) -> np.ndarray:
    """Gaussian affinities exp(-||x_i - x_j||^2 / 2); unit diagonal."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.exp(-0.5 * np.einsum("ijd,ijd->ij", diff, diff))


def distance_from_gram(gram) -> np.ndarray:
    """Pairwise distances implied by an inner-product matrix.

    d_ij = sqrt(max(0, g_ii + g_jj - 2 g_ij)); the clamp guards against
    small negative values from noise or approximation.
    """
    gram = np.asarray(gram, dtype=np.float64)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ValueError("gram matrix must be square")
    diag = np.diag(gram)
    sq = diag[:, None] + diag[None, :] - 2.0 * gram
    return np.sqrt(np.maximum(sq, 0.0))
