"""Figure rendering for experiment reports.

All helpers draw with the Agg backend and write PNG files next to the
experiment's delimited output; nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["figure.figsize"] = (6.0, 4.0)
plt.rcParams["figure.dpi"] = 110
plt.rcParams["savefig.dpi"] = 150
plt.rcParams["savefig.bbox"] = "tight"
plt.rcParams["axes.grid"] = True
plt.rcParams["grid.alpha"] = 0.3


def _finish(fig, path):
    fig.savefig(path)
    plt.close(fig)


def plot_trajectories(trajectories, path, title="Training loss"):
    """Loss-vs-iteration curves; ``trajectories`` maps label to (iter, loss) pairs."""
    fig, ax = plt.subplots()
    for label, pairs in trajectories.items():
        pairs = np.asarray(pairs)
        ax.semilogy(pairs[:, 0], pairs[:, 1], label=str(label))
    ax.set_xlabel("iteration")
    ax.set_ylabel("MSE")
    ax.set_title(title)
    if trajectories:
        ax.legend(fontsize=8)
    _finish(fig, path)


def plot_run_histogram(losses, path, title="Final loss across restarts"):
    """Histogram of per-run final losses on a log scale (finite runs only)."""
    losses = np.asarray(losses, dtype=np.float64)
    finite = losses[np.isfinite(losses)]
    fig, ax = plt.subplots()
    if finite.size:
        lo = max(finite.min(), 1e-300)
        bins = np.logspace(np.log10(lo) - 0.1, np.log10(finite.max()) + 0.1, 30)
        ax.hist(finite, bins=bins, edgecolor="black", linewidth=0.4)
        ax.set_xscale("log")
    ax.set_xlabel("final MSE")
    ax.set_ylabel("runs")
    ax.set_title(title)
    _finish(fig, path)


def plot_mse_curves(series, path, xlabel, title="Approximation error"):
    """MSE lines keyed by method; ``series`` maps label to (x, mse) pairs."""
    fig, ax = plt.subplots()
    for label, pairs in series.items():
        pairs = np.asarray(pairs, dtype=np.float64)
        order = np.argsort(pairs[:, 0])
        ax.semilogy(pairs[order, 0], pairs[order, 1], marker="o",
                    markersize=4, label=str(label))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("MSE")
    ax.set_title(title)
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_lines(series, path, xlabel, ylabel, title=""):
    """Linear-scale line plot; ``series`` maps label to (x, y) pairs."""
    fig, ax = plt.subplots()
    for label, pairs in series.items():
        pairs = np.asarray(pairs, dtype=np.float64)
        order = np.argsort(pairs[:, 0])
        ax.plot(pairs[order, 0], pairs[order, 1], marker="o",
                markersize=4, label=str(label))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    _finish(fig, path)


def plot_heatmaps(matrices, path, title=None):
    """One image panel per (label, matrix) pair, shared color scale."""
    items = list(matrices.items())
    vmin = min(float(np.min(m)) for _, m in items)
    vmax = max(float(np.max(m)) for _, m in items)
    fig, axs = plt.subplots(1, len(items), figsize=(3.2 * len(items), 3.2))
    if len(items) == 1:
        axs = [axs]
    for ax, (label, mat) in zip(axs, items):
        im = ax.imshow(mat, vmin=vmin, vmax=vmax, cmap="viridis")
        ax.set_title(str(label), fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
        ax.grid(False)
    fig.colorbar(im, ax=axs, shrink=0.8)
    if title:
        fig.suptitle(title)
    _finish(fig, path)


def plot_roc(curves, path, title="Edge prediction"):
    """ROC curves keyed by label, AUC shown in the legend."""
    fig, ax = plt.subplots()
    for label, curve in curves.items():
        ax.plot(curve.fpr, curve.tpr, label=f"{label} (AUC {curve.auc:.3f})")
    ax.plot([0, 1], [0, 1], "k--", linewidth=0.8)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(title)
    ax.legend(fontsize=8, loc="lower right")
    _finish(fig, path)


def plot_embedding(values, labels, path, title="Recovered coordinates"):
    """Sorted 1-D embedding values colored by group label."""
    values = np.asarray(values, dtype=np.float64)
    labels = np.asarray(labels)
    order = np.argsort(values, kind="stable")
    fig, ax = plt.subplots()
    sc = ax.scatter(np.arange(values.size), values[order], c=labels[order],
                    cmap="tab10", s=14)
    ax.set_xlabel("sorted position")
    ax.set_ylabel("coordinate")
    ax.set_title(title)
    fig.colorbar(sc, ax=ax, label="group")
    _finish(fig, path)


def plot_point_cloud(points, color, path, title="Point cloud"):
    """Three axis-aligned 2-D projections of 3-D points, colored by a scalar."""
    points = np.asarray(points, dtype=np.float64)
    fig, axs = plt.subplots(1, 3, figsize=(9.5, 3.2))
    for ax, (a, b) in zip(axs, ((0, 1), (0, 2), (1, 2))):
        sc = ax.scatter(points[:, a], points[:, b], c=color, cmap="viridis", s=8)
        ax.set_xlabel(f"x{a}")
        ax.set_ylabel(f"x{b}")
    fig.colorbar(sc, ax=axs, shrink=0.8)
    fig.suptitle(title)
    _finish(fig, path)


def plot_images(images, path, title=None):
    """Grayscale image panels keyed by label."""
    items = list(images.items())
    fig, axs = plt.subplots(1, len(items), figsize=(3.0 * len(items), 3.2))
    if len(items) == 1:
        axs = [axs]
    for ax, (label, img) in zip(axs, items):
        ax.imshow(img, cmap="gray", vmin=0, vmax=255)
        ax.set_title(str(label), fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
        ax.grid(False)
    if title:
        fig.suptitle(title)
    _finish(fig, path)
