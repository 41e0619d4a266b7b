"""Input validation helpers for the estimator-facing APIs."""

import numpy as np

from .errors import InsufficientSamplesError


def as_matrix(X, name="X"):
    """Coerce to a 2-d float64 array and require every entry finite."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_vector(x, name="x", size=None):
    """Coerce to a 1-d float64 array, optionally of a fixed length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise ValueError(f"{name} must have {size} components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def require_samples(n, minimum, what="fit"):
    if n < minimum:
        raise InsufficientSamplesError(
            f"insufficient samples: need at least {minimum} to {what}, got {n}"
        )
