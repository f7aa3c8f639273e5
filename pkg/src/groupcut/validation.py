"""Input validation helpers shared by the solvers, estimators, and CLI."""

from __future__ import annotations

import numpy as np

__all__ = ["check_distance_array", "check_labels"]


def check_distance_array(values) -> tuple[np.ndarray, bool]:
    """Validate a precomputed distance matrix and return it in canonical form.

    Returns an ``(array, is_integral)`` pair where the array is C-contiguous
    ``int64`` for integer inputs and ``float64`` otherwise.  Requires a square
    matrix with finite nonnegative entries, a zero diagonal, and exact
    symmetry.
    """
    arr = np.asarray(values)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("distance matrix must have at least one item")
    if arr.dtype == object or np.iscomplexobj(arr):
        raise ValueError(f"unsupported matrix dtype {arr.dtype}")
    integral = np.issubdtype(arr.dtype, np.integer) or arr.dtype == bool
    arr = np.ascontiguousarray(arr, dtype=np.int64 if integral else np.float64)
    if not integral and not np.all(np.isfinite(arr)):
        raise ValueError("distance matrix contains non-finite entries")
    if np.any(arr < 0):
        raise ValueError("distance matrix contains negative entries")
    if np.any(np.diagonal(arr) != 0):
        raise ValueError("distance matrix diagonal must be zero")
    if not np.array_equal(arr, arr.T):
        raise ValueError("distance matrix must be symmetric")
    return arr, integral


def check_labels(labels, n_items: int | None = None) -> np.ndarray:
    """Coerce group labels to a 1-D int64 array, optionally checking length."""
    arr = np.asarray(labels, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError(f"labels must be one-dimensional, got shape {arr.shape}")
    if n_items is not None and arr.shape[0] != n_items:
        raise ValueError(f"expected {n_items} labels, got {arr.shape[0]}")
    return np.ascontiguousarray(arr)
