"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .env import ACTION_DIM, STATE_DIM


def check_states(X) -> np.ndarray:
    """2-D float array of normalized states with ``STATE_DIM`` columns."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != STATE_DIM:
        raise ValueError(f"expected {STATE_DIM} state features, got {X.shape[1]}")
    return X


def check_action(a) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape != (ACTION_DIM,) or not np.all(np.isfinite(a)):
        raise ValueError(f"action must be {ACTION_DIM} finite numbers")
    return a


def check_grid(grid, name="grid") -> np.ndarray:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError(f"{name} must be non-empty")
    return grid
