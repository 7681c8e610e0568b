"""Downstream measurements on fitted matrices.

Covers edge-prediction ROC curves for graph reconstructions, gap-based
clustering of one-dimensional embeddings, label-permutation community
accuracy, correlation, and float/8-bit image conversion.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .model import as_matrix


@dataclass(frozen=True)
class RocCurve:
    """Operating points of a score-threshold sweep, plus the trapezoid AUC.

    Row zero is the empty prediction (threshold +inf, rates 0); the last
    row predicts everything (threshold = lowest score, rates 1).  Rates
    are nondecreasing and tied scores share one operating point.
    """

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    def __post_init__(self):
        th = np.asarray(self.thresholds, dtype=np.float64)
        fpr = np.asarray(self.fpr, dtype=np.float64)
        tpr = np.asarray(self.tpr, dtype=np.float64)
        if not th.shape == fpr.shape == tpr.shape or th.ndim != 1 or th.size < 2:
            raise ValueError("thresholds/fpr/tpr must be 1-D, equal length >= 2")
        object.__setattr__(self, "thresholds", th)
        object.__setattr__(self, "fpr", fpr)
        object.__setattr__(self, "tpr", tpr)


def edge_prediction_roc(scores, adjacency) -> RocCurve:
    """ROC of thresholding pairwise scores against a 0/1 adjacency matrix.

    Only off-diagonal upper-triangle pairs count (undirected edges, no
    self-loops).  A pair is predicted positive when its score is at or
    above the threshold; thresholds sweep the distinct scores descending.
    Requires at least one edge and one non-edge.
    """
    scores = as_matrix(scores, "scores")
    adjacency = as_matrix(adjacency, "adjacency")
    if scores.shape != adjacency.shape or scores.shape[0] != scores.shape[1]:
        raise ValueError("scores and adjacency must be square and same shape")
    iu = np.triu_indices(scores.shape[0], k=1)
    s = scores[iu]
    truth = adjacency[iu] != 0
    pos = int(truth.sum())
    neg = truth.size - pos
    if pos == 0 or neg == 0:
        raise ValueError("need at least one edge and one non-edge")

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    tp = np.cumsum(truth[order])
    fp = np.cumsum(~truth[order])
    # keep one operating point per distinct score: the last of each tie group
    last = np.nonzero(np.diff(s_sorted))[0]
    keep = np.concatenate((last, [s.size - 1]))
    thresholds = np.concatenate(([np.inf], s_sorted[keep]))
    tpr = np.concatenate(([0.0], tp[keep] / pos))
    fpr = np.concatenate(([0.0], fp[keep] / neg))
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(thresholds, fpr, tpr, auc)


def cluster_1d(values, k: int) -> np.ndarray:
    """Split scalars into k groups at the k-1 widest gaps.

    Values are sorted, the k-1 largest consecutive gaps become boundaries
    (equal gaps resolved toward the lower sorted position), and each input
    gets the index of its group, 0 for the smallest values through k-1 for
    the largest, in original input order.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("values must be a nonempty 1-D array")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    if not 1 <= k <= values.size:
        raise ValueError(f"k must be in [1, {values.size}], got {k}")
    order = np.argsort(values, kind="stable")
    gaps = np.diff(values[order])
    cuts = np.sort(np.argsort(-gaps, kind="stable")[: k - 1])
    labels_sorted = np.zeros(values.size, dtype=np.int64)
    for c in cuts:
        labels_sorted[c + 1 :] += 1
    labels = np.empty_like(labels_sorted)
    labels[order] = labels_sorted
    return labels


def community_accuracy(predicted, truth) -> float:
    """Best label agreement over all matchings of predicted to true groups.

    Tries every permutation mapping predicted group ids onto true group
    ids and returns the highest fraction of agreeing vertices.  Limited to
    six distinct groups on either side to keep the search exact and cheap.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1 or predicted.size == 0:
        raise ValueError("labelings must be nonempty 1-D and equal length")
    _, pred_ids = np.unique(predicted, return_inverse=True)
    _, true_ids = np.unique(truth, return_inverse=True)
    k = max(pred_ids.max(), true_ids.max()) + 1
    if k > 6:
        raise ValueError("at most 6 distinct groups supported")
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (pred_ids, true_ids), 1)
    best = max(
        sum(confusion[c, perm[c]] for c in range(k))
        for perm in permutations(range(k))
    )
    return best / predicted.size


def pearson_correlation(x, y) -> float:
    """Pearson correlation coefficient of two equal-length samples."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("x and y must be 1-D, equal length >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    if denom == 0.0:
        raise ValueError("correlation undefined for a constant sample")
    return float(np.dot(xc, yc) / denom)


def image_to_matrix(pixels) -> np.ndarray:
    """8-bit grayscale pixels to floats in [0, 1] (divide by 255)."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2 or pixels.size == 0:
        raise ValueError("pixels must be a nonempty 2-D array")
    if pixels.dtype != np.uint8:
        if np.any((pixels < 0) | (pixels > 255)):
            raise ValueError("pixel values must be in [0, 255]")
        pixels = pixels.astype(np.uint8)
    return pixels.astype(np.float64) / 255.0


def matrix_to_image(matrix) -> np.ndarray:
    """Floats to 8-bit grayscale: clamp to [0, 1], scale by 255, round."""
    matrix = as_matrix(matrix, "matrix")
    clipped = np.clip(matrix, 0.0, 1.0)
    return np.rint(clipped * 255.0).astype(np.uint8)
