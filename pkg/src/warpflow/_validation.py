"""Small input-checking helpers shared by the estimators and functions."""

import numbers

import numpy as np

from .errors import EmptySeries


def check_series(x, *, min_length=1, name="x"):
    """Return ``x`` as a finite, 1-D float64 array.

    Accepts lists, tuples, numpy arrays, or anything with a ``values``
    attribute holding one of those (e.g. :class:`~warpflow.series.DailySeries`).
    """
    if hasattr(x, "values") and not isinstance(x, np.ndarray):
        x = x.values
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        if arr.size == 0:
            raise EmptySeries(f"{name} is empty")
        raise ValueError(f"{name} needs at least {min_length} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


def check_positive_int(value, name, *, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    lower = 0 if allow_zero else 1
    if value < lower:
        raise ValueError(f"{name} must be >= {lower}, got {value}")
    return value


def check_same_length(x, y, names=("x", "y")):
    if len(x) != len(y):
        raise ValueError(
            f"{names[0]} and {names[1]} differ in length ({len(x)} != {len(y)})"
        )
