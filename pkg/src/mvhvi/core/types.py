"""Shared array aliases and small helpers for immutable numeric fields."""

from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import NDArray

from mvhvi.core.errors import ShapeError

FloatArray = NDArray[np.float64]


def frozen_array(values: Any, ndim: int, name: str = "array") -> FloatArray:
    """Copy values into a read-only float64 array of the given rank."""
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise ShapeError(f"{name} is not a numeric array: {e}") from None
    if arr.ndim != ndim:
        raise ShapeError(f"{name} must be a rank-{ndim} array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def as_vector(values: Any, size: int, name: str) -> FloatArray:
    """Coerce to a float vector of the given length or raise ShapeError."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (size,):
        raise ShapeError(f"{name} must have length {size}, got shape {np.shape(values)}")
    return arr
