"""Adaptive gradient fitting with batched random restarts.

A fit runs ``batch_runs`` independent trainings from small random
initializations and keeps the best final full-matrix MSE; one good run is
all that matters.  Each run draws its random stream from the root seed via
``numpy.random.SeedSequence(seed, spawn_key=(run_index,))``, so results are
reproducible and independent of thread scheduling, and growing the batch
only appends runs.

Runs that produce non-finite losses are quarantined (recorded with loss
+inf) rather than aborting the batch; if every run diverges,
:class:`AllRunsDivergedError` is raised.

Parameters are updated on a flat vector laid out as
[row_coords, col_coords (asymmetric only), weights, offset], matching the
gradient workspaces in :mod:`rbfmat.lossgrad`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .lossgrad import FullGradWorkspace, GradientSet, SubsetGradWorkspace
from .model import IndexSample, RbfModel, as_matrix

_OPTIMIZERS = ("adam", "adamw", "adagrad")


class AllRunsDivergedError(RuntimeError):
    """Every restart in the batch produced non-finite losses."""


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters for :func:`fit`.

    ``minibatch_size`` is entries per step and is required when
    ``stochastic``; ``weight_decay`` applies to the adamw optimizer only
    (and only to coordinate vectors, never weights or offset);
    ``target_loss`` stops a run early once the full MSE falls to it.
    """

    components: int
    symmetric: bool = False
    optimizer: str = "adam"
    learning_rate: float = 0.1
    max_iters: int = 10000
    batch_runs: int = 100
    init_scale: float = 0.1
    stochastic: bool = False
    minibatch_size: int = 0
    weight_decay: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    target_loss: float | None = None
    seed: int = 0
    trace_stride: int = 100

    def __post_init__(self):
        if self.components < 0:
            raise ValueError("components must be nonnegative")
        if self.optimizer not in _OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {_OPTIMIZERS}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.batch_runs < 1:
            raise ValueError("batch_runs must be at least 1")
        if self.init_scale <= 0:
            raise ValueError("init_scale must be positive")
        if self.stochastic and self.minibatch_size < 1:
            raise ValueError("minibatch_size must be at least 1 when stochastic")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class FitReport:
    """Outcome of a batched fit.

    ``best_loss`` is the full-matrix MSE of ``best_model`` and the minimum
    of ``per_run_final_losses`` (diverged runs appear as +inf).
    ``loss_trajectory`` holds (iteration, full MSE) samples for the best
    run, every ``trace_stride`` iterations plus the final point.
    """

    best_model: RbfModel
    best_loss: float
    per_run_final_losses: np.ndarray
    loss_trajectory: list[tuple[int, float]] = field(repr=False)
    iterations_used: int = 0
    seed: int = 0


class AdamOptimizer:
    """Bias-corrected adaptive moment estimation over a flat parameter vector.

    With ``weight_decay`` > 0 this is the decoupled-decay variant: the first
    ``decay_len`` entries of the vector are multiplied by
    (1 - lr * weight_decay) before each moment update.
    """

    def __init__(self, dim, learning_rate, beta1=0.9, beta2=0.999,
                 epsilon=1e-8, weight_decay=0.0, decay_len=0):
        self.lr = learning_rate
        self.beta1, self.beta2, self.epsilon = beta1, beta2, epsilon
        self.weight_decay = weight_decay
        self.decay_len = decay_len
        self.m = np.zeros(dim)
        self.v = np.zeros(dim)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        if self.weight_decay:
            theta[: self.decay_len] *= 1.0 - self.lr * self.weight_decay
        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grad
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * np.square(grad)
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        theta -= self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)


class AdagradOptimizer:
    """Accumulated squared-gradient scaling over a flat parameter vector."""

    def __init__(self, dim, learning_rate, epsilon=1e-8):
        self.lr = learning_rate
        self.epsilon = epsilon
        self.acc = np.zeros(dim)

    def step(self, theta: np.ndarray, grad: np.ndarray) -> None:
        self.acc += np.square(grad)
        theta -= self.lr * grad / (np.sqrt(self.acc) + self.epsilon)


def make_optimizer(config: FitConfig, dim: int, decay_len: int):
    """Build the optimizer named by ``config`` for a ``dim``-long vector."""
    if config.optimizer == "adagrad":
        return AdagradOptimizer(dim, config.learning_rate, config.epsilon)
    decay = config.weight_decay if config.optimizer == "adamw" else 0.0
    return AdamOptimizer(
        dim, config.learning_rate, config.beta1, config.beta2,
        config.epsilon, weight_decay=decay, decay_len=decay_len,
    )


def init_model(components, n, m, symmetric, init_scale, rng,
               value_range=1.0) -> RbfModel:
    """Random initialization: small coordinates, data-scaled weights.

    Coordinates are iid Normal(0, init_scale**2) and the offset starts at 0.
    Weights start at alternating signs with magnitude
    value_range * sqrt(2 / components), jittered by a shared |Normal(1, 0.2)|
    factor, so the summed squared weight is about twice the squared range of
    the target no matter how many components share it.  Starting the weights
    at the magnitude of the data keeps the coordinate gradients, which are
    proportional to the weights, strong from the first step; near-zero
    weights leave multi-component fits stalled in a weak-gradient regime long
    enough for the coordinates to scatter.  Draw order is row coordinates,
    column coordinates (asymmetric only), then the weight jitter, so a fixed
    generator state gives a bit-identical model.
    """
    if n < 1 or (not symmetric and m < 1):
        raise ValueError("dimensions must be positive")
    if symmetric and n != m:
        raise ValueError("symmetric model requires n == m")
    row = rng.normal(0.0, init_scale, (components, n))
    col = None if symmetric else rng.normal(0.0, init_scale, (components, m))
    signs = np.where(np.arange(components) % 2 == 0, 1.0, -1.0)
    magnitude = value_range * math.sqrt(2.0 / components) if components else 1.0
    weights = signs * magnitude * abs(rng.normal(1.0, 0.2))
    return RbfModel(row, weights, 0.0, col)


def sample_minibatch(n, m, size, rng) -> IndexSample:
    """Uniform sample of ``size`` distinct coordinates from the n x m grid."""
    if not 1 <= size <= n * m:
        raise ValueError(f"size must be in [1, {n * m}], got {size}")
    flat = _draw_flat(n * m, size, rng)
    pairs = np.column_stack((flat // m, flat % m))
    return IndexSample(pairs, n, m)


def _draw_flat(cells: int, size: int, rng) -> np.ndarray:
    # shuffle=False keeps subsets uniform while skipping the O(cells) shuffle
    return rng.choice(cells, size, replace=False, shuffle=False)


def _theta_views(theta, r, n, m, symmetric):
    u = theta[: r * n].reshape(r, n)
    off = r * n
    if symmetric:
        v = u
    else:
        v = theta[off : off + r * m].reshape(r, m)
        off += r * m
    return u, v, theta[off : off + r], off + r


def _flatten_model(model: RbfModel) -> np.ndarray:
    parts = [model.row_coords.ravel()]
    if not model.symmetric:
        parts.append(model.col_coords.ravel())
    parts.append(model.weights)
    parts.append([model.offset])
    return np.concatenate(parts)


def _model_from_flat(theta, r, n, m, symmetric) -> RbfModel:
    u, v, w, b_idx = _theta_views(theta, r, n, m, symmetric)
    return RbfModel(u, w, theta[b_idx], None if symmetric else v)


def _flatten_grads(grads: GradientSet, symmetric: bool) -> np.ndarray:
    parts = [np.asarray(grads.row_coords, dtype=np.float64).ravel()]
    if not symmetric:
        if grads.col_coords is None:
            raise ValueError("asymmetric model needs col_coords gradients")
        parts.append(np.asarray(grads.col_coords, dtype=np.float64).ravel())
    parts.append(np.asarray(grads.weights, dtype=np.float64))
    parts.append([grads.offset])
    return np.concatenate(parts)


def apply_gradient_step(optimizer, model: RbfModel, grads: GradientSet) -> RbfModel:
    """One optimizer update of a model; returns the updated model.

    The optimizer object carries its own state (moments, iteration count)
    across calls.
    """
    theta = _flatten_model(model)
    optimizer.step(theta, _flatten_grads(grads, model.symmetric))
    return _model_from_flat(
        theta, model.components, model.n, model.m, model.symmetric
    )


@dataclass
class _RunOutcome:
    final_loss: float
    theta: np.ndarray | None
    trace: list[tuple[int, float]]
    iterations_used: int


def _run_one(target, config: FitConfig, run_index: int) -> _RunOutcome:
    n, m = target.shape
    r = config.components
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(run_index,))
    )
    value_range = float(target.max() - target.min())
    start = init_model(r, n, m, config.symmetric, config.init_scale, rng,
                       value_range=value_range if value_range > 0 else 1.0)
    theta = _flatten_model(start)
    u, v, w, b_idx = _theta_views(theta, r, n, m, config.symmetric)
    decay_len = r * n if config.symmetric else r * (n + m)
    opt = make_optimizer(config, theta.size, decay_len)
    full_ws = FullGradWorkspace(target, r, config.symmetric)
    trace: list[tuple[int, float]] = []
    stride = config.trace_stride
    tl = config.target_loss
    iters_done = config.max_iters
    diverged = False

    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        if not config.stochastic:
            for t in range(config.max_iters):
                loss = full_ws.loss_and_grad(u, v, w, theta[b_idx])
                if not np.isfinite(loss):
                    diverged = True
                    break
                if t % stride == 0:
                    trace.append((t, loss))
                if tl is not None and loss <= tl:
                    iters_done = t
                    break
                opt.step(theta, full_ws.grad)
        else:
            sub_ws = SubsetGradWorkspace(
                target, r, config.symmetric, config.minibatch_size
            )
            cells = n * m
            for t in range(config.max_iters):
                if t % stride == 0:
                    full = full_ws.loss_only(u, v, w, theta[b_idx])
                    if not np.isfinite(full):
                        diverged = True
                        break
                    trace.append((t, full))
                    if tl is not None and full <= tl:
                        iters_done = t
                        break
                flat = _draw_flat(cells, config.minibatch_size, rng)
                loss = sub_ws.loss_and_grad(u, v, w, theta[b_idx], flat // m, flat % m)
                if not np.isfinite(loss):
                    diverged = True
                    break
                opt.step(theta, sub_ws.grad)

        if diverged:
            return _RunOutcome(np.inf, None, trace, 0)
        final_loss = full_ws.loss_only(u, v, w, theta[b_idx])
    if not np.isfinite(final_loss):
        return _RunOutcome(np.inf, None, trace, 0)
    if not trace or trace[-1][0] != iters_done:
        trace.append((iters_done, final_loss))
    else:
        trace[-1] = (iters_done, final_loss)
    return _RunOutcome(final_loss, theta, trace, iters_done)


def fit(target, config: FitConfig, threads: int = 1) -> FitReport:
    """Fit an RBF decomposition to a target matrix.

    Runs ``config.batch_runs`` independent restarts (optionally on a thread
    pool; results are identical for any ``threads``) and reports the run
    with the lowest final full-matrix MSE, ties broken by lowest run index.
    """
    target = as_matrix(target, "target")
    n, m = target.shape
    if config.symmetric and n != m:
        raise ValueError("symmetric fit requires a square target")
    if config.stochastic and config.minibatch_size > n * m:
        raise ValueError("minibatch_size cannot exceed the entry count")

    indices = range(config.batch_runs)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda i: _run_one(target, config, i), indices))
    else:
        outcomes = [_run_one(target, config, i) for i in indices]

    losses = np.array([o.final_loss for o in outcomes])
    if not np.any(np.isfinite(losses)):
        raise AllRunsDivergedError(
            f"all {config.batch_runs} runs diverged; "
            "try a smaller learning rate or init_scale"
        )
    best_idx = int(np.argmin(losses))
    best = outcomes[best_idx]
    best_model = _model_from_flat(best.theta, config.components, n, m, config.symmetric)
    return FitReport(
        best_model=best_model,
        best_loss=float(losses[best_idx]),
        per_run_final_losses=losses,
        loss_trajectory=best.trace,
        iterations_used=best.iterations_used,
        seed=config.seed,
    )
