"""Estimator wrappers around the MLP engine."""
from __future__ import annotations

import numpy as np

from ..base import BaseEstimator, check_is_fitted
from ..validation import check_feature_count, check_matrix, check_xy
from .net import build_mlp
from .objectives import CrossEntropy, SquaredError
from .training import TrainSpec, predict_mlp, train


class _BaseMlp(BaseEstimator):
    _task = None

    def __init__(self, arch="standard", train_spec=None, seed=0):
        self.arch = arch
        self.train_spec = train_spec
        self.seed = seed

    def _resolved_train_spec(self):
        return self.train_spec if self.train_spec is not None else TrainSpec()

    def _fit_net(self, x, output_dim, objective):
        net = build_mlp(self.arch, x.shape[1], output_dim, seed=self.seed,
                        task=self._task)
        self.history_ = train(net, x, objective, self._resolved_train_spec())
        self.net_ = net
        self.n_features_ = x.shape[1]
        return self

    def _check_x(self, x):
        check_is_fitted(self, "net_")
        x = check_matrix(x)
        check_feature_count(x, self.n_features_)
        return x

    def predict_with_uncertainty(self, x, passes=30, seed=0):
        """Monte-Carlo-dropout mean prediction and per-sample variance."""
        x = self._check_x(x)
        return predict_mlp(self.net_, x, mode="mc_dropout", passes=passes, seed=seed)


class MlpClassifier(_BaseMlp):
    """Feed-forward softmax classifier (preset or custom architecture)."""

    _task = "classification"

    def fit(self, x, y, objective=None):
        x, y = check_xy(x, y, "classification")
        self.classes_ = np.unique(y)
        self.n_classes_ = self.classes_.shape[0]
        y_enc = np.searchsorted(self.classes_, y)
        if objective is None:
            objective = CrossEntropy(y_enc)
        return self._fit_net(x, self.n_classes_, objective)

    def predict_proba(self, x):
        x = self._check_x(x)
        probs, _ = predict_mlp(self.net_, x, mode="eval")
        return probs

    def predict(self, x):
        return self.classes_[np.argmax(self.predict_proba(x), axis=1)]


class MlpRegressor(_BaseMlp):
    """Feed-forward regressor with a linear output unit."""

    _task = "regression"

    def fit(self, x, y, objective=None):
        x, y = check_xy(x, y, "regression")
        if objective is None:
            objective = SquaredError(y)
        return self._fit_net(x, 1, objective)

    def predict(self, x):
        x = self._check_x(x)
        values, _ = predict_mlp(self.net_, x, mode="eval")
        return values
