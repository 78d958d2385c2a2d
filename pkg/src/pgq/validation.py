"""Input validation helpers used by constructors and the CLI."""

from __future__ import annotations

import numpy as np

PROB_ROW_TOL = 1e-12
DIST_TOL = 1e-10


def as_float_array(x, name: str, ndim: int | None = None) -> np.ndarray:
    """Copy ``x`` into a float64 array, requiring finite entries."""
    arr = np.array(x, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_probability_rows(rows: np.ndarray, name: str, tol: float = PROB_ROW_TOL) -> None:
    """Every row along the last axis must be a probability distribution."""
    if np.any(rows < 0):
        raise ValueError(f"{name} has negative entries")
    sums = rows.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > tol):
        worst = float(np.max(np.abs(sums - 1.0)))
        raise ValueError(f"{name} rows must sum to 1 within {tol}, worst deviation {worst:g}")


def check_unit_interval(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {x}")
    return x


def check_positive(x: float, name: str) -> float:
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"{name} must be positive, got {x}")
    return x


def check_index(i: int, n: int, name: str) -> int:
    i = int(i)
    if not 0 <= i < n:
        raise IndexError(f"{name} out of range: {i} not in [0, {n})")
    return i


def check_length(v: np.ndarray, n: int, name: str) -> np.ndarray:
    if v.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {v.shape}")
    return v
