"""Multilayer-perceptron engine and estimators."""
from .estimators import MlpClassifier, MlpRegressor
from .gradcheck import gradient_check
from .net import ARCHITECTURES, MlpModel, MlpSpec, build_mlp
from .objectives import CrossEntropy, SquaredError, log_softmax, softmax
from .training import TrainSpec, TrainingDiverged, predict_mlp, train

__all__ = [
    "ARCHITECTURES",
    "CrossEntropy",
    "MlpClassifier",
    "MlpModel",
    "MlpRegressor",
    "MlpSpec",
    "SquaredError",
    "TrainSpec",
    "TrainingDiverged",
    "build_mlp",
    "gradient_check",
    "log_softmax",
    "predict_mlp",
    "softmax",
    "train",
]
