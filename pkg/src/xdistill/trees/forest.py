"""Bagged and extremely randomized tree ensembles."""
from __future__ import annotations

import math

import numpy as np
from joblib import Parallel, delayed

from ..base import BaseEstimator, check_is_fitted
from ..validation import check_feature_count, check_matrix, check_sample_weight, check_xy
from . import _kernels as k


class Tree:
    """Flat-array binary tree; rows with x[feature] < threshold go left."""

    __slots__ = ("feature", "threshold", "left", "right", "value", "n_node", "importances")

    def __init__(self, feature, threshold, left, right, value, n_node, importances):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.value = value
        self.n_node = n_node
        self.importances = importances

    @property
    def node_count(self):
        return self.feature.shape[0]

    def apply(self, x):
        return k.apply_tree(self.feature, self.threshold, self.left, self.right, x)

    def predict_value(self, x):
        """Leaf payload per row: (n, K) class distribution or (n,) value."""
        leaves = self.apply(x)
        out = self.value[leaves]
        return out if out.shape[1] > 1 else out[:, 0]


def tree_seed(master_seed, index, n_streams=2):
    """Counter-based per-tree stream seeds; independent of thread count.

    Returns ``n_streams`` independent 64-bit seeds (bootstrap draw and
    split search use separate streams).
    """
    return np.random.SeedSequence((int(master_seed), int(index))).generate_state(
        n_streams, np.uint64
    )


def default_mtry(n_features, task):
    if task == "classification":
        return int(math.ceil(math.sqrt(n_features)))
    return max(1, int(math.ceil(n_features / 3.0)))


def _fit_one_tree(x, y_class, targets, w, n_classes, criterion, mtry, max_depth,
                  min_leaf, extra, seeds, bootstrap):
    n = x.shape[0]
    if bootstrap:
        rows = k.bootstrap_rows(n, seeds[0])
    else:
        rows = np.arange(n, dtype=np.int64)
    hess = np.ones(0, dtype=np.float64)  # unused for GINI/VARIANCE
    out = k.grow_tree(
        x, y_class, targets, hess, w, rows, n_classes, criterion,
        mtry, max_depth, min_leaf, 1 if extra else 0, 0.0, seeds[1],
    )
    feature, threshold, left, right, value, n_node, _, _, importances = out
    return Tree(feature, threshold, left, right, value, n_node, importances)


class _BaseForest(BaseEstimator):
    """Shared fit/aggregation logic for forest classifier and regressor."""

    _task = None

    def __init__(self, n_estimators=200, max_depth=0, mtry=None, min_leaf=1,
                 mode="bagging", seed=0, n_jobs=None):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.mtry = mtry
        self.min_leaf = min_leaf
        self.mode = mode
        self.seed = seed
        self.n_jobs = n_jobs

    def _check_params(self, n_features):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be positive")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be positive")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0 (0 means unlimited)")
        if self.mode not in ("bagging", "extra"):
            raise ValueError(f"unknown mode {self.mode!r}")
        mtry = self.mtry if self.mtry is not None else default_mtry(n_features, self._task)
        if not (1 <= mtry <= n_features):
            raise ValueError(f"mtry must lie in [1, {n_features}], got {mtry}")
        return mtry

    def _fit_trees(self, x, y_class, targets, w, n_classes, criterion):
        mtry = self._check_params(x.shape[1])
        extra = self.mode == "extra"
        bootstrap = self.mode == "bagging"
        seeds = [tree_seed(self.seed, t) for t in range(self.n_estimators)]
        fit = delayed(_fit_one_tree)
        jobs = self.n_jobs or 1
        if jobs == 1:
            trees = [
                _fit_one_tree(x, y_class, targets, w, n_classes, criterion, mtry,
                              self.max_depth, self.min_leaf, extra, s, bootstrap)
                for s in seeds
            ]
        else:
            trees = Parallel(n_jobs=jobs, prefer="threads")(
                fit(x, y_class, targets, w, n_classes, criterion, mtry,
                    self.max_depth, self.min_leaf, extra, s, bootstrap)
                for s in seeds
            )
        self.trees_ = trees
        self.n_features_ = x.shape[1]
        total = np.zeros(x.shape[1])
        for tree in trees:
            total += tree.importances
        norm = total.sum()
        self.feature_importances_ = total / norm if norm > 0 else total
        return self

    def _tree_values(self, x):
        x = check_matrix(x)
        check_feature_count(x, self.n_features_)
        for tree in self.trees_:
            yield tree.predict_value(x)

    def member_signals(self, x):
        """Mean prediction and per-sample population variance across trees.

        Classification: variance of the per-tree class-probability vectors,
        averaged over classes. Regression: variance of per-tree predictions.
        """
        check_is_fitted(self, "trees_")
        m = len(self.trees_)
        acc = None
        acc_sq = None
        for vals in self._tree_values(x):
            if acc is None:
                acc = np.zeros_like(vals)
                acc_sq = np.zeros_like(vals)
            acc += vals
            acc_sq += vals * vals
        mean = acc / m
        var = np.maximum(acc_sq / m - mean * mean, 0.0)
        if var.ndim == 2:
            var = var.mean(axis=1)
        return mean, var


class ForestClassifier(_BaseForest):
    """Bootstrap-aggregated (or extremely randomized) classification trees.

    ``mode="bagging"`` draws a bootstrap sample per tree and searches the
    best split over ``mtry`` random features by Gini impurity;
    ``mode="extra"`` uses the full sample and one uniformly random
    threshold per candidate feature.
    """

    _task = "classification"

    def fit(self, x, y, sample_weight=None):
        x, y = check_xy(x, y, "classification")
        w = check_sample_weight(sample_weight, x.shape[0])
        self.classes_ = np.unique(y)
        self.n_classes_ = self.classes_.shape[0]
        y_enc = np.searchsorted(self.classes_, y).astype(np.int64)
        return self._fit_trees(x, y_enc, np.zeros(0), w, self.n_classes_, k.GINI)

    def predict_proba(self, x):
        check_is_fitted(self, "trees_")
        acc = None
        for vals in self._tree_values(x):
            acc = vals if acc is None else acc + vals
        return acc / len(self.trees_)

    def predict(self, x):
        return self.classes_[np.argmax(self.predict_proba(x), axis=1)]


class ForestRegressor(_BaseForest):
    """Forest of variance-reduction regression trees (bagging or extra mode)."""

    _task = "regression"

    def fit(self, x, y, sample_weight=None):
        x, y = check_xy(x, y, "regression")
        w = check_sample_weight(sample_weight, x.shape[0])
        return self._fit_trees(x, np.zeros(0, dtype=np.int64), y, w, 1, k.VARIANCE)

    def predict(self, x):
        check_is_fitted(self, "trees_")
        acc = None
        for vals in self._tree_values(x):
            acc = vals if acc is None else acc + vals
        return acc / len(self.trees_)


def ensemble_signals(models, x):
    """Aggregate a list of fitted models into (mean prediction, variance).

    Classifiers must expose predict_proba, regressors predict; the variance
    is the population variance across models (probability vectors averaged
    over classes for classification). A single forest may be passed to use
    its individual trees as members.
    """
    if isinstance(models, _BaseForest):
        return models.member_signals(x)
    if not models:
        raise ValueError("need at least one model")
    outputs = []
    for model in models:
        if hasattr(model, "predict_proba"):
            outputs.append(np.asarray(model.predict_proba(x), dtype=np.float64))
        else:
            outputs.append(np.asarray(model.predict(x), dtype=np.float64))
    shapes = {o.shape for o in outputs}
    if len(shapes) != 1:
        raise ValueError("models produce incompatible output shapes")
    stacked = np.stack(outputs)
    mean = stacked.mean(axis=0)
    var = ((stacked - mean) ** 2).mean(axis=0)
    if var.ndim == 2:
        var = var.mean(axis=1)
    return mean, var
