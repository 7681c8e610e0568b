"""Shared helpers for the test suite."""

import numpy as np

from rbfmat import RbfModel


def random_model(rng, n, m, r, symmetric, coord_scale=1.0):
    """A model with Gaussian coordinates and weights, for generic checks."""
    row = coord_scale * rng.normal(0.0, 1.0, (r, n))
    col = None if symmetric else coord_scale * rng.normal(0.0, 1.0, (r, m))
    weights = rng.normal(0.0, 1.0, r)
    offset = rng.normal(0.0, 1.0)
    return RbfModel(row, weights, offset, col_coords=col)


def flatten_gradient(grads):
    """Gradient fields in the flat layout [row, col (asym), weights, offset]."""
    parts = [grads.row_coords.ravel()]
    if grads.col_coords is not None:
        parts.append(grads.col_coords.ravel())
    parts.append(np.asarray(grads.weights).ravel())
    parts.append(np.array([grads.offset]))
    return np.concatenate(parts)
