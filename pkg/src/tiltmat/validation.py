"""Input validation helpers.

Matrices and vectors travel through the package as plain float64 numpy
arrays; these helpers certify shape, finiteness, and sign conventions at the
API boundary and raise the domain errors from :mod:`tiltmat.errors`.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionError,
    NonFiniteError,
    NotSquareError,
    ZeroComponentError,
)

# Default certification tolerance shared across the package and the CLI.
DEFAULT_TOL = 1e-9

# Zero-pattern threshold is relative to the largest entry: exact zeros in the
# underlying math become floating-point dust after repeated products.
PATTERN_REL_THRESHOLD = 1e-14


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Return ``values`` as a finite 2-D float64 array with positive dims."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have positive dimensions, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    return arr


def as_square_matrix(values, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(values, name)
    if arr.shape[0] != arr.shape[1]:
        raise NotSquareError(f"{name} must be square, got {arr.shape}")
    return arr


def as_vector(values, name: str = "vector") -> np.ndarray:
    """Return ``values`` as a finite 1-D float64 array of length >= 1."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.reshape(-1) if arr.size == max(arr.shape, default=0) else arr
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or infinite entries")
    return arr


def as_positive_vector(values, name: str = "vector") -> np.ndarray:
    """Return a finite 1-D array whose components are all strictly positive."""
    arr = as_vector(values, name)
    if np.any(arr <= 0.0):
        worst = int(np.argmin(arr))
        raise ZeroComponentError(
            f"{name} must be strictly positive; component {worst} is {arr[worst]!r}"
        )
    return arr


def require_same_length(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionError(f"{what}: lengths {a.shape[0]} and {b.shape[0]} differ")


def pattern_threshold(arr: np.ndarray) -> float:
    """Scale-relative cutoff below which an entry counts as a structural zero."""
    peak = float(np.max(np.abs(arr))) if arr.size else 0.0
    return PATTERN_REL_THRESHOLD * peak


def readonly(arr: np.ndarray) -> np.ndarray:
    """Copy and freeze an array so value types can be shared across threads."""
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out
