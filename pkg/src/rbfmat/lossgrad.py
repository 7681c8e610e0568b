"""Mean-squared-error objective and its exact analytic gradient.

With prediction P = evaluate_full(model) and residual rho = P - K against
a target K, the full loss is mean(rho**2) over all n*m entries.  Writing
e_k = exp(-(u_k[i] - v_k[j])**2) and d_k = u_k[i] - v_k[j], the gradient is

    d/d offset     = (2/nm) sum_ij rho_ij
    d/d weights[k] = (2/nm) sum_ij rho_ij * e_k[i, j]
    d/d u_k[i]     = -(4/nm) * weights[k] * sum_j rho_ij * e_k[i, j] * d_k[i, j]
    d/d v_k[j]     = +(4/nm) * weights[k] * sum_i rho_ij * e_k[i, j] * d_k[i, j]

For a symmetric model the coordinates appear in both index roles, so their
gradient accumulates the u-role and v-role contributions.  The stochastic
variants restrict the sums to a coordinate sample and replace 1/nm with
1/|sample|.

All reductions are plain numpy sums with a fixed order, so results are
deterministic for a fixed input.  The ``*Workspace`` classes carry
preallocated buffers for the optimizer's inner loop; the public functions
are thin wrappers that allocate per call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import IndexSample, RbfModel, as_matrix, evaluate_entries, evaluate_full


@dataclass(frozen=True)
class GradientSet:
    """Loss gradient with respect to every model parameter.

    Field shapes mirror :class:`RbfModel`: ``row_coords`` (r, n),
    ``col_coords`` (r, m) or None for symmetric models, ``weights`` (r,),
    ``offset`` scalar.
    """

    row_coords: np.ndarray
    col_coords: np.ndarray | None
    weights: np.ndarray
    offset: float


def _check_dims(target: np.ndarray, model: RbfModel) -> np.ndarray:
    target = as_matrix(target, "target")
    if target.shape != (model.n, model.m):
        raise ValueError(
            f"target shape {target.shape} does not match model "
            f"({model.n}, {model.m})"
        )
    return target


def mse_loss(target, model: RbfModel) -> float:
    """Mean squared residual over all matrix entries."""
    target = _check_dims(target, model)
    resid = evaluate_full(model) - target
    return float(np.dot(resid.ravel(), resid.ravel()) / resid.size)


def mse_loss_subset(target, model: RbfModel, sample: IndexSample) -> float:
    """Mean squared residual over the sampled coordinates only."""
    target = _check_dims(target, model)
    resid = evaluate_entries(model, sample) - target[sample.rows, sample.cols]
    return float(np.dot(resid, resid) / resid.size)


class FullGradWorkspace:
    """Reusable buffers for full-matrix loss/gradient at fixed (r, n, m).

    The gradient is written into the flat array ``grad`` laid out as
    [row_coords, col_coords (asymmetric only), weights, offset]; the
    ``g_*`` attributes are views into it.
    """

    def __init__(self, target: np.ndarray, r: int, symmetric: bool):
        n, m = target.shape
        if symmetric and n != m:
            raise ValueError("symmetric workspace requires a square target")
        self.target = target
        self.r, self.n, self.m = r, n, m
        self.symmetric = symmetric
        self.inv_size = 1.0 / (n * m)
        self._d = np.empty((r, n, m))
        self._e = np.empty((r, n, m))
        self._p = np.empty((n, m))
        dim = r * n + (0 if symmetric else r * m) + r + 1
        self.grad = np.zeros(dim)
        self.g_row = self.grad[: r * n].reshape(r, n)
        off = r * n
        if symmetric:
            self.g_col = None
        else:
            self.g_col = self.grad[off : off + r * m].reshape(r, m)
            off += r * m
        self.g_weights = self.grad[off : off + r]
        self._off_index = off + r

    def loss_only(self, row, col, weights, offset) -> float:
        """Loss at the given raw parameters, without touching ``grad``."""
        p = self._p
        p.fill(offset)
        d = self._d[0] if self.r else None
        for k in range(self.r):
            np.subtract(row[k][:, None], col[k][None, :], out=d)
            np.multiply(d, d, out=d)
            np.negative(d, out=d)
            np.exp(d, out=d)
            p += weights[k] * d
        p -= self.target
        return float(np.dot(p.ravel(), p.ravel()) / (self.n * self.m))

    def loss_and_grad(self, row, col, weights, offset) -> float:
        """Compute loss and fill ``grad``, both at the given parameters."""
        r, n, m = self.r, self.n, self.m
        d, e, p = self._d, self._e, self._p
        np.subtract(row[:, :, None], col[:, None, :], out=d)
        np.multiply(d, d, out=e)
        np.negative(e, out=e)
        np.exp(e, out=e)
        np.einsum("k,kij->ij", weights, e, out=p)
        p += offset
        p -= self.target  # p is now the residual
        loss = float(np.dot(p.ravel(), p.ravel()) * self.inv_size)
        self.grad[self._off_index] = 2.0 * self.inv_size * p.sum()
        e *= p  # e_k <- rho * e_k
        np.einsum("kij->k", e, out=self.g_weights)
        self.g_weights *= 2.0 * self.inv_size
        e *= d  # e_k <- rho * e_k * d_k
        scale = (-4.0 * self.inv_size) * weights
        row_part = e.sum(axis=2)
        if self.symmetric:
            row_part -= e.sum(axis=1)
            np.multiply(row_part, scale[:, None], out=self.g_row)
        else:
            np.multiply(row_part, scale[:, None], out=self.g_row)
            np.multiply(e.sum(axis=1), -scale[:, None], out=self.g_col)
        return loss


class SubsetGradWorkspace:
    """Reusable buffers for loss/gradient over a coordinate sample.

    Same flat gradient layout as :class:`FullGradWorkspace`.  The sample
    changes per call; buffer shapes are fixed by the sample size.
    """

    def __init__(self, target: np.ndarray, r: int, symmetric: bool, size: int):
        n, m = target.shape
        if symmetric and n != m:
            raise ValueError("symmetric workspace requires a square target")
        self.target = target
        self.r, self.n, self.m = r, n, m
        self.symmetric = symmetric
        self.size = size
        self.inv_size = 1.0 / size
        self._d = np.empty((r, size))
        self._e = np.empty((r, size))
        self._t = np.empty((r, size))
        dim = r * n + (0 if symmetric else r * m) + r + 1
        self.grad = np.zeros(dim)
        self.g_row = self.grad[: r * n].reshape(r, n)
        off = r * n
        if symmetric:
            self.g_col = None
        else:
            self.g_col = self.grad[off : off + r * m].reshape(r, m)
            off += r * m
        self.g_weights = self.grad[off : off + r]
        self._off_index = off + r

    def loss_and_grad(self, row, col, weights, offset, ii, jj) -> float:
        r, n, m = self.r, self.n, self.m
        d, e = self._d, self._e
        np.take(row, ii, axis=1, out=d)
        np.take(col, jj, axis=1, out=self._t)
        d -= self._t
        np.multiply(d, d, out=e)
        np.negative(e, out=e)
        np.exp(e, out=e)
        pred = weights @ e
        pred += offset
        pred -= self.target[ii, jj]  # pred is now the residual
        loss = float(np.dot(pred, pred) * self.inv_size)
        self.grad[self._off_index] = 2.0 * self.inv_size * pred.sum()
        e *= pred
        np.einsum("ks->k", e, out=self.g_weights)
        self.g_weights *= 2.0 * self.inv_size
        e *= d
        scale = (-4.0 * self.inv_size) * weights
        for k in range(r):
            row_part = np.bincount(ii, weights=e[k], minlength=n)
            if self.symmetric:
                row_part -= np.bincount(jj, weights=e[k], minlength=n)
                np.multiply(row_part, scale[k], out=self.g_row[k])
            else:
                np.multiply(row_part, scale[k], out=self.g_row[k])
                np.multiply(
                    np.bincount(jj, weights=e[k], minlength=m),
                    -scale[k],
                    out=self.g_col[k],
                )
        return loss


def _grad_from_workspace(ws) -> GradientSet:
    return GradientSet(
        row_coords=ws.g_row.copy(),
        col_coords=None if ws.g_col is None else ws.g_col.copy(),
        weights=ws.g_weights.copy(),
        offset=float(ws.grad[ws._off_index]),
    )


def gradient(target, model: RbfModel) -> GradientSet:
    """Exact gradient of :func:`mse_loss` with respect to every parameter."""
    target = _check_dims(target, model)
    ws = FullGradWorkspace(target, model.components, model.symmetric)
    ws.loss_and_grad(model.row_coords, model.col_coords, model.weights, model.offset)
    return _grad_from_workspace(ws)


def gradient_subset(target, model: RbfModel, sample: IndexSample) -> GradientSet:
    """Gradient of :func:`mse_loss_subset`; equals :func:`gradient` when the
    sample is exhaustive."""
    target = _check_dims(target, model)
    if sample.n != model.n or sample.m != model.m:
        raise IndexError(
            f"sample is for a {sample.n}x{sample.m} matrix, "
            f"model is {model.n}x{model.m}"
        )
    ws = SubsetGradWorkspace(target, model.components, model.symmetric, len(sample))
    ws.loss_and_grad(
        model.row_coords, model.col_coords, model.weights, model.offset,
        sample.rows, sample.cols,
    )
    return _grad_from_workspace(ws)
