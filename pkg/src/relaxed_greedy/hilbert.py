"""Dense real vector arithmetic.

Vectors are plain 1-D ``float64`` numpy arrays. :func:`as_vector` is the
validation gate every public entry point passes its inputs through.
"""

import numpy as np


class DimensionMismatchError(ValueError):
    """Raised when two operands live in spaces of different dimension."""


def as_vector(x, name="x"):
    """Return ``x`` as a finite, non-empty 1-D float64 array.

    Raises
    ------
    ValueError
        If ``x`` is not one-dimensional, is empty, or holds NaN/inf.
    """
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if v.size == 0:
        raise ValueError(f"{name} must have at least one coordinate")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def _check_same_dim(x, y):
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatchError(
            f"incompatible operands: dim {x.shape[0]} vs dim {y.shape[0]}"
        )


def inner(x, y):
    """Euclidean inner product ``sum_i x_i * y_i``."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    _check_same_dim(x, y)
    return float(np.dot(x, y))


def norm_l2(x):
    x = as_vector(x)
    return float(np.sqrt(np.dot(x, x)))


def norm_l1(x):
    x = as_vector(x)
    return float(np.sum(np.abs(x)))


def combine(a, x, b, y):
    """Return the linear combination ``a*x + b*y``.

    Every approximant update in the engines goes through this function, so a
    recorded sequence of (atom, step) pairs can be replayed bit-for-bit.
    """
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    _check_same_dim(x, y)
    return float(a) * x + float(b) * y
