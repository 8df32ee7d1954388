"""Uncertainty quantification unified across model families.

Epistemic uncertainty is the prediction variance across ensemble members
(trees of a forest, or several models); the aleatoric proxy for neural
networks is the variance across stochastic dropout forward passes. Both
use the same per-sample scalar (probability-vector variance averaged over
classes for classification), so the paradigms are directly comparable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .neural.training import predict_mlp
from .trees import ensemble_signals


@dataclass(frozen=True)
class PredictionWithUncertainty:
    point: float
    uncertainty: float
    probs: np.ndarray | None = None
    interval: tuple | None = None

    def __post_init__(self):
        if self.uncertainty < 0:
            raise ValueError("uncertainty must be nonnegative")
        if self.interval is not None:
            lo, hi = self.interval
            if not (lo <= self.point <= hi):
                raise ValueError("interval must contain the point prediction")


def epistemic_uncertainty(members, x):
    """Per-sample population variance across ensemble members.

    ``members`` is a list of fitted models or a single forest (whose trees
    are the members). A single non-ensemble model has zero spread.
    """
    if not isinstance(members, (list, tuple)):
        return ensemble_signals(members, x)[1]
    if len(members) < 2:
        return np.zeros(np.asarray(x).shape[0])
    return ensemble_signals(list(members), x)[1]


def aleatoric_uncertainty(model, x, passes=30, seed=0):
    """Variance across stochastic dropout forward passes of an MLP."""
    if passes < 2:
        raise ValueError("passes must be >= 2")
    net = getattr(model, "net_", model)
    _, var = predict_mlp(net, x, mode="mc_dropout", passes=passes, seed=seed)
    return var


def normal_quantile(coverage):
    """Two-sided standard-normal quantile, e.g. 0.95 -> 1.959964."""
    if not (0.0 < coverage < 1.0):
        raise ValueError("coverage must lie in (0, 1)")
    return float(ndtri(0.5 + coverage / 2.0))


def prediction_interval(members, x, coverage=0.95):
    """Gaussian ensemble interval mean +- z(coverage) * std per sample.

    Regression only; ``members`` as in epistemic_uncertainty.
    """
    mean, var = (
        ensemble_signals(members, x)
        if not isinstance(members, (list, tuple))
        else ensemble_signals(list(members), x)
    )
    if mean.ndim != 1:
        raise ValueError("prediction intervals are defined for regression tasks only")
    z = normal_quantile(coverage)
    half = z * np.sqrt(var)
    return mean - half, mean + half
