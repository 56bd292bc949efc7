"""Input validation helpers shared by the estimator facade and the service."""

from __future__ import annotations

import math

import numpy as np

from .grid import Cell, GridError, GridMap


def as_cell(grid: GridMap, value) -> Cell:
    """Coerce a Cell or an (x, y) pair into a validated Cell of ``grid``."""
    if isinstance(value, Cell):
        cell = grid.cell(value.x, value.y)
    else:
        arr = np.asarray(value)
        if arr.shape != (2,):
            raise GridError(f"expected an (x, y) pair, got {value!r}")
        cell = grid.cell(int(arr[0]), int(arr[1]))
    if grid.is_blocked(cell):
        raise GridError(f"cell {cell.coords()} is blocked")
    return cell


def check_trajectory(grid: GridMap, X) -> list[Cell]:
    """Validate an observed trajectory as an array-like of (x, y) cells."""
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise GridError("trajectory must be a (k, 2) array of cell coordinates")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise GridError("trajectory coordinates must be integers")
    return [as_cell(grid, row) for row in arr]


def check_probability_vector(p, n: int | None = None, tol: float = 1e-8) -> np.ndarray:
    v = np.asarray(p, dtype=float).ravel()
    if n is not None and v.size != n:
        raise ValueError(f"expected {n} probabilities, got {v.size}")
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise ValueError("probabilities must be finite and non-negative")
    s = v.sum()
    if abs(s - 1.0) > tol:
        raise ValueError(f"probabilities sum to {s}, expected 1")
    return v / s


def check_alpha(value) -> float:
    v = float(value)
    if not (v >= 0 and math.isfinite(v)):
        raise ValueError("alpha must be finite and >= 0")
    return v
