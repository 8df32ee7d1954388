"""Tree-ensemble engine: forests, extra trees and gradient boosting."""
from .boosting import GradientBoostingClassifier, GradientBoostingRegressor
from .forest import ForestClassifier, ForestRegressor, ensemble_signals

__all__ = [
    "ForestClassifier",
    "ForestRegressor",
    "GradientBoostingClassifier",
    "GradientBoostingRegressor",
    "ensemble_signals",
]
