"""Bidirectional knowledge distillation between tree ensembles and MLPs.

Self-contained engines (forests, gradient boosting, multilayer
perceptrons), cross-paradigm distillers, uncertainty quantification,
evaluation metrics and an experiment harness with a CLI.
"""
from . import datasets, distill, harness, io, metrics, neural, trees, uncertainty
from .base import BaseEstimator, NotFittedError, clone

__version__ = "0.1.0"

__all__ = [
    "BaseEstimator",
    "NotFittedError",
    "clone",
    "datasets",
    "distill",
    "harness",
    "io",
    "metrics",
    "neural",
    "trees",
    "uncertainty",
]
