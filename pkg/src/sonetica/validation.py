"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np

from .errors import ShapeError


def check_matrix(X) -> np.ndarray:
    """Coerce to a 2-D float64 array with no NaN/inf entries."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={X.ndim}")
    if not np.isfinite(X).all():
        raise ShapeError("matrix contains NaN or infinite entries")
    return X


def check_vector(y) -> np.ndarray:
    """Coerce to a 1-D array."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ShapeError(f"expected a 1-D vector, got ndim={y.ndim}")
    return y


def check_paired(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Two equally long 1-D float arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise ShapeError("paired inputs must be 1-D")
    return a, b
