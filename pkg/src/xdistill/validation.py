"""Input validation helpers shared by all estimators."""
from __future__ import annotations

import numpy as np


def check_matrix(x, name="X"):
    """Coerce to a 2-D float64 array with finite entries."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {x.shape}")
    if x.shape[0] == 0:
        raise ValueError(f"{name} has no rows")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or Inf")
    return x


def check_xy(x, y, task):
    """Validate a (features, targets) pair for the given task."""
    x = check_matrix(x)
    y = np.asarray(y)
    if y.ndim != 1:
        y = y.ravel()
    if y.shape[0] != x.shape[0]:
        raise ValueError(f"X has {x.shape[0]} rows but y has {y.shape[0]}")
    if task == "classification":
        y = y.astype(np.int64)
        if y.min() < 0:
            raise ValueError("classification labels must be nonnegative integers")
    elif task == "regression":
        y = y.astype(np.float64)
        if not np.all(np.isfinite(y)):
            raise ValueError("y contains NaN or Inf")
    else:
        raise ValueError(f"unknown task {task!r}")
    return x, y


def check_feature_count(x, n_features, name="X"):
    if x.shape[1] != n_features:
        raise ValueError(
            f"{name} has {x.shape[1]} features, model was fitted with {n_features}"
        )


def check_sample_weight(sample_weight, n):
    if sample_weight is None:
        return np.ones(n, dtype=np.float64)
    w = np.asarray(sample_weight, dtype=np.float64).ravel()
    if w.shape[0] != n:
        raise ValueError(f"sample_weight has length {w.shape[0]}, expected {n}")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("sample_weight entries must be finite and nonnegative")
    return w


def check_probabilities(p, name="probs"):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional")
    if np.any(p < -1e-9) or np.any(p > 1 + 1e-9):
        raise ValueError(f"{name} entries must lie in [0, 1]")
    if not np.allclose(p.sum(axis=1), 1.0, atol=1e-6):
        raise ValueError(f"{name} rows must sum to 1")
    return p
