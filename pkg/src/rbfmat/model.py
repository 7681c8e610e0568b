"""RBF decomposition model: parameterization and evaluation.

A target matrix is approximated as a scalar offset plus a weighted sum of
RBF components.  Component ``k`` is the matrix ``exp(-(u_i - v_j)**2)``
built from a row-coordinate vector ``u`` (length n) and a column-coordinate
vector ``v`` (length m); the approximation entry is

    offset + sum_k weights[k] * exp(-(row_coords[k, i] - col_coords[k, j])**2)

Matrices throughout the package are plain row-major float64 2-D numpy
arrays; :func:`as_matrix` is the boundary validator (finite entries,
positive dimensions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Validate and return a dense matrix as a float64 2-D array.

    Rejects empty dimensions and non-finite entries.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _locked(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


class RbfModel:
    """Immutable RBF decomposition.

    Parameters
    ----------
    row_coords : (r, n) array
        One row-coordinate vector per component.
    weights : (r,) array
        Mixing coefficient of each component.
    offset : float
        Scalar added to every entry.
    col_coords : (r, m) array, optional
        Column-coordinate vectors.  Omit (None) for a symmetric model,
        where column coordinates alias ``row_coords`` and are not stored.

    Parameter arrays are copied and locked read-only; the model is safe to
    share across threads.
    """

    __slots__ = ("row_coords", "weights", "offset", "_col_coords")

    def __init__(self, row_coords, weights, offset, col_coords=None):
        rc = _locked(np.atleast_2d(row_coords))
        if rc.ndim != 2:
            raise ValueError(f"row_coords must be 2-D, got shape {rc.shape}")
        r, n = rc.shape
        if n < 1:
            raise ValueError("row_coords must have positive vector length")
        w = _locked(np.atleast_1d(weights))
        if w.shape != (r,):
            raise ValueError(f"weights must have shape ({r},), got {w.shape}")
        if col_coords is None:
            cc = None
        else:
            cc = _locked(np.atleast_2d(col_coords))
            if cc.ndim != 2 or cc.shape[0] != r or cc.shape[1] < 1:
                raise ValueError(
                    f"col_coords must have shape ({r}, m), got {cc.shape}"
                )
        if not (np.all(np.isfinite(rc)) and np.all(np.isfinite(w))):
            raise ValueError("model parameters must be finite")
        if cc is not None and not np.all(np.isfinite(cc)):
            raise ValueError("model parameters must be finite")
        if not np.isfinite(offset):
            raise ValueError("offset must be finite")
        self.row_coords = rc
        self.weights = w
        self.offset = float(offset)
        self._col_coords = cc

    @property
    def symmetric(self) -> bool:
        return self._col_coords is None

    @property
    def col_coords(self) -> np.ndarray:
        """Column-coordinate vectors; aliases ``row_coords`` when symmetric."""
        return self.row_coords if self._col_coords is None else self._col_coords

    @property
    def components(self) -> int:
        return self.row_coords.shape[0]

    @property
    def n(self) -> int:
        return self.row_coords.shape[1]

    @property
    def m(self) -> int:
        return self.col_coords.shape[1]

    def __repr__(self) -> str:
        kind = "symmetric" if self.symmetric else "asymmetric"
        return (
            f"RbfModel(components={self.components}, n={self.n}, m={self.m}, "
            f"{kind}, offset={self.offset!r})"
        )


@dataclass(frozen=True)
class IndexSample:
    """A set of distinct matrix coordinates, used by the stochastic loss.

    ``pairs`` is an (S, 2) int array of (row, col) coordinates, all within
    an ``n`` x ``m`` grid and distinct within the sample.
    """

    pairs: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64)
        if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 1:
            raise ValueError(f"pairs must be a nonempty (S, 2) array, got {pairs.shape}")
        if self.n < 1 or self.m < 1:
            raise ValueError("grid dimensions must be positive")
        i, j = pairs[:, 0], pairs[:, 1]
        if i.min() < 0 or i.max() >= self.n or j.min() < 0 or j.max() >= self.m:
            raise IndexError(
                f"sample coordinates out of range for a {self.n}x{self.m} matrix"
            )
        flat = i * self.m + j
        if np.unique(flat).size != flat.size:
            raise ValueError("sample coordinates must be distinct")
        object.__setattr__(self, "pairs", _locked_int(pairs))

    def __len__(self) -> int:
        return self.pairs.shape[0]

    @property
    def rows(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def cols(self) -> np.ndarray:
        return self.pairs[:, 1]


def _locked_int(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.int64)
    out.flags.writeable = False
    return out


def rbf_component(u, v=None) -> np.ndarray:
    """Kernel matrix ``exp(-(u_i - v_j)**2)`` of a single component.

    With ``v`` omitted the component is symmetric (v = u) and has a unit
    diagonal.
    """
    u = np.asarray(u, dtype=np.float64)
    v = u if v is None else np.asarray(v, dtype=np.float64)
    d = u[:, None] - v[None, :]
    return np.exp(-d * d)


def rbf_entry(model: RbfModel, k: int, i: int, j: int) -> float:
    """Single-component kernel value exp(-(u_i - v_j)**2); always in (0, 1]."""
    if not 0 <= k < model.components:
        raise IndexError(f"component index {k} out of range [0, {model.components})")
    if not 0 <= i < model.n:
        raise IndexError(f"row index {i} out of range [0, {model.n})")
    if not 0 <= j < model.m:
        raise IndexError(f"column index {j} out of range [0, {model.m})")
    d = model.row_coords[k, i] - model.col_coords[k, j]
    return float(np.exp(-d * d))


def evaluate_full(model: RbfModel) -> np.ndarray:
    """Evaluate the decomposition into a dense n x m matrix.

    For a symmetric model the result is exactly symmetric and every
    diagonal entry equals offset + sum(weights).
    """
    out = np.full((model.n, model.m), model.offset)
    v_all = model.col_coords
    for k in range(model.components):
        d = model.row_coords[k][:, None] - v_all[k][None, :]
        out += model.weights[k] * np.exp(-d * d)
    return out


def evaluate_entries(model: RbfModel, sample: IndexSample) -> np.ndarray:
    """Evaluate the decomposition at sampled coordinates, in sample order.

    Agrees entrywise with :func:`evaluate_full`.
    """
    if sample.n != model.n or sample.m != model.m:
        raise IndexError(
            f"sample is for a {sample.n}x{sample.m} matrix, "
            f"model is {model.n}x{model.m}"
        )
    ii, jj = sample.rows, sample.cols
    out = np.full(len(sample), model.offset)
    v_all = model.col_coords
    for k in range(model.components):
        d = model.row_coords[k][ii] - v_all[k][jj]
        out += model.weights[k] * np.exp(-d * d)
    return out


def param_count(model: RbfModel) -> int:
    """Full learnable parameter count: coordinates plus weights plus offset."""
    r = model.components
    if model.symmetric:
        return r * model.n + r + 1
    return r * (model.n + model.m) + r + 1


def vector_param_count(model_or_r, n: int | None = None, m: int | None = None,
                       symmetric: bool | None = None) -> int:
    """Coordinate-vector entries only, excluding weights and offset.

    Reported alongside the full count in experiment outputs so component
    budgets can be compared on vector storage alone.  Accepts either a model
    or explicit (r, n, m, symmetric).
    """
    if isinstance(model_or_r, RbfModel):
        model = model_or_r
        r, n, m, symmetric = model.components, model.n, model.m, model.symmetric
    else:
        r = int(model_or_r)
        if n is None or symmetric is None or (not symmetric and m is None):
            raise ValueError("need n, m and symmetric when not passing a model")
    return r * n if symmetric else r * (n + m)
