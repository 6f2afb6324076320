"""Input validation helpers shared by the estimator and functional APIs."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError

__all__ = [
    "as_matrix",
    "as_vector",
    "check_square",
    "check_compatible",
    "symmetrize",
    "check_symmetric",
    "min_symmetric_eigenvalue",
    "require",
]


def require(condition: bool, message: str) -> None:
    """Raise ``DimensionError`` with ``message`` unless ``condition`` holds."""
    if not condition:
        raise DimensionError(message)


def as_matrix(value, name: str) -> np.ndarray:
    """Coerce to a 2-D float array; scalars become 1x1."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    require(arr.ndim == 2, f"{name} must be at most 2-dimensional, got ndim={arr.ndim}")
    require(np.isfinite(arr).all(), f"{name} contains non-finite entries")
    return arr


def as_vector(value, name: str, length: int | None = None) -> np.ndarray:
    """Coerce to a 1-D float array, optionally checking its length."""
    arr = np.asarray(value, dtype=float).reshape(-1)
    require(np.isfinite(arr).all(), f"{name} contains non-finite entries")
    if length is not None:
        require(
            arr.shape[0] == length,
            f"{name} has length {arr.shape[0]}, expected {length}",
        )
    return arr


def check_square(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = as_matrix(matrix, name)
    require(
        matrix.shape[0] == matrix.shape[1],
        f"{name} must be square, got shape {matrix.shape}",
    )
    return matrix


def check_compatible(a: np.ndarray, b: np.ndarray, name_a: str, name_b: str) -> None:
    require(
        a.shape[0] == b.shape[0],
        f"{name_b} has {b.shape[0]} rows, expected {a.shape[0]} to match {name_a}",
    )


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def check_symmetric(matrix: np.ndarray, name: str, tol: float = 1e-8) -> np.ndarray:
    """Return the symmetrized matrix, rejecting gross asymmetry."""
    matrix = check_square(matrix, name)
    scale = 1.0 + np.abs(matrix).max()
    asym = np.abs(matrix - matrix.T).max()
    require(asym <= tol * scale, f"{name} is not symmetric (max asymmetry {asym:.3e})")
    return symmetrize(matrix)


def min_symmetric_eigenvalue(matrix: np.ndarray) -> float:
    """Smallest eigenvalue of the symmetric part of ``matrix``."""
    return float(np.linalg.eigvalsh(symmetrize(matrix)).min())
