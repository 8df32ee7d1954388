"""Gradient-boosted trees in three variants.

first_order   trees fit negative gradients, leaves hold mean residuals
newton        split gain and leaf values from (gradient, hessian) sums
              with L2 leaf regularization
histogram     newton statistics on pre-binned features with leaf-wise
              growth bounded by 2**max_depth leaves
"""
from __future__ import annotations

import numpy as np

from ..base import BaseEstimator, check_is_fitted
from ..validation import check_feature_count, check_matrix, check_sample_weight, check_xy
from . import _kernels as k
from .forest import Tree, tree_seed

VARIANTS = ("first_order", "newton", "histogram")
_PROB_FLOOR = 1e-12
_HESS_FLOOR = 1e-16


def _softmax(scores):
    z = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def make_bins(x, n_bins):
    """Quantile bin edges per feature; at most n_bins bins, uint8 codes."""
    n, p = x.shape
    edges = []
    for j in range(p):
        col = x[:, j]
        uniq = np.unique(col)
        if uniq.size <= 1:
            e = np.empty(0, dtype=np.float64)
        elif uniq.size <= n_bins:
            e = (uniq[:-1] + uniq[1:]) / 2.0
        else:
            qs = np.quantile(col, np.arange(1, n_bins) / n_bins, method="linear")
            e = np.unique(qs)
        edges.append(e)
    return edges


def apply_bins(x, edges):
    n, p = x.shape
    binned = np.empty((n, p), dtype=np.uint8)
    for j in range(p):
        binned[:, j] = np.searchsorted(edges[j], x[:, j], side="right")
    return binned


class _BaseGbm(BaseEstimator):
    _task = None

    def __init__(self, n_estimators=100, max_depth=6, learning_rate=0.1,
                 min_leaf=1, mtry=None, variant="first_order", n_bins=256,
                 l2_leaf=1.0, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.min_leaf = min_leaf
        self.mtry = mtry
        self.variant = variant
        self.n_bins = n_bins
        self.l2_leaf = l2_leaf
        self.seed = seed

    def _check_params(self, n_features):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive for boosting")
        if self.variant == "histogram" and not (2 <= self.n_bins <= 256):
            raise ValueError("n_bins must lie in [2, 256]")
        if self.l2_leaf < 0:
            raise ValueError("l2_leaf must be nonnegative")
        mtry = self.mtry if self.mtry is not None else n_features
        if not (1 <= mtry <= n_features):
            raise ValueError(f"mtry must lie in [1, {n_features}], got {mtry}")
        return mtry

    def _grow_stage_tree(self, x, g, h, w, mtry, stage, group):
        """One regression tree on gradient statistics; returns (Tree, update).

        ``g`` and ``h`` are per-row loss derivatives before sample weighting;
        first_order fits the raw negative gradient with weighted variance
        splits, newton/histogram sum weight-scaled (g, h).
        """
        n = x.shape[0]
        rows = np.arange(n, dtype=np.int64)
        seeds = tree_seed(self.seed, stage * 64 + group)
        if self.variant == "first_order":
            out = k.grow_tree(
                x, np.zeros(0, dtype=np.int64), -g, np.ones(0), w, rows, 1,
                k.VARIANCE, mtry, self.max_depth, self.min_leaf, 0, 0.0, seeds[1],
            )
            feature, threshold, left, right, value, n_node, _, _, imps = out
            tree = Tree(feature, threshold, left, right, value, n_node, imps)
        elif self.variant == "newton":
            out = k.grow_tree(
                x, np.zeros(0, dtype=np.int64), g * w, h * w, w, rows, 1,
                k.NEWTON, mtry, self.max_depth, self.min_leaf, 0,
                self.l2_leaf, seeds[1],
            )
            feature, threshold, left, right, value, n_node, _, _, imps = out
            tree = Tree(feature, threshold, left, right, value, n_node, imps)
        else:
            max_leaves = 2 ** self.max_depth
            feature, split_bin, left, right, value, n_node, imps = k.grow_tree_hist(
                self._binned, self._bins_per_feature, g * w, h * w, rows,
                max_leaves, self.min_leaf, self.l2_leaf,
            )
            # convert bin splits to raw thresholds (x < edges[f][b] goes left)
            threshold = np.zeros(feature.shape[0], dtype=np.float64)
            for i in range(feature.shape[0]):
                if feature[i] >= 0:
                    threshold[i] = self._bin_edges[feature[i]][split_bin[i]]
            tree = Tree(feature, threshold, left, right,
                        value.reshape(-1, 1), n_node, imps)
        update = tree.predict_value(x)
        return tree, update

    def _finish(self, importance_total):
        norm = importance_total.sum()
        self.feature_importances_ = (
            importance_total / norm if norm > 0 else importance_total
        )
        if self.variant == "histogram":
            del self._binned, self._bins_per_feature
        return self

    def _raw_scores(self, x):
        check_is_fitted(self, "stages_")
        x = check_matrix(x)
        check_feature_count(x, self.n_features_)
        scores = np.broadcast_to(self.base_score_, (x.shape[0], self.base_score_.shape[0])).copy()
        for stage in self.stages_:
            for group, tree in enumerate(stage):
                scores[:, group] += self.learning_rate * tree.predict_value(x)
        return scores


class GradientBoostingClassifier(_BaseGbm):
    """Stagewise softmax boosting with one tree per class per stage."""

    _task = "classification"

    def fit(self, x, y, sample_weight=None):
        x, y = check_xy(x, y, "classification")
        w = check_sample_weight(sample_weight, x.shape[0])
        mtry = self._check_params(x.shape[1])
        self.classes_ = np.unique(y)
        kcls = self.classes_.shape[0]
        self.n_classes_ = kcls
        self.n_features_ = x.shape[1]
        y_enc = np.searchsorted(self.classes_, y)
        onehot = np.zeros((x.shape[0], kcls))
        onehot[np.arange(x.shape[0]), y_enc] = 1.0

        if self.variant == "histogram":
            self._bin_edges = make_bins(x, self.n_bins)
            self._binned = apply_bins(x, self._bin_edges)
            self._bins_per_feature = np.array(
                [e.size + 1 for e in self._bin_edges], dtype=np.int32
            )

        prior = np.clip(
            np.bincount(y_enc, weights=w, minlength=kcls) / w.sum(),
            _PROB_FLOOR, None,
        )
        self.base_score_ = np.log(prior)
        scores = np.tile(self.base_score_, (x.shape[0], 1))

        importance_total = np.zeros(x.shape[1])
        self.stages_ = []
        self.train_loss_path_ = []
        wn = w / w.sum()
        for stage_idx in range(self.n_estimators):
            probs = _softmax(scores)
            stage = []
            for cls in range(kcls):
                g = probs[:, cls] - onehot[:, cls]
                h = np.maximum(probs[:, cls] * (1.0 - probs[:, cls]), _HESS_FLOOR)
                tree, update = self._grow_stage_tree(x, g, h, w, mtry, stage_idx, cls)
                stage.append(tree)
                scores[:, cls] += self.learning_rate * update
                importance_total += tree.importances
            self.stages_.append(stage)
            probs = _softmax(scores)
            logp = np.log(np.clip(probs[np.arange(x.shape[0]), y_enc], _PROB_FLOOR, None))
            self.train_loss_path_.append(float(-(wn * logp).sum()))
        return self._finish(importance_total)

    def predict_proba(self, x):
        return _softmax(self._raw_scores(x))

    def predict(self, x):
        return self.classes_[np.argmax(self.predict_proba(x), axis=1)]


class GradientBoostingRegressor(_BaseGbm):
    """Stagewise squared-loss boosting; base score is the target mean."""

    _task = "regression"

    def fit(self, x, y, sample_weight=None):
        x, y = check_xy(x, y, "regression")
        w = check_sample_weight(sample_weight, x.shape[0])
        mtry = self._check_params(x.shape[1])
        self.n_features_ = x.shape[1]

        if self.variant == "histogram":
            self._bin_edges = make_bins(x, self.n_bins)
            self._binned = apply_bins(x, self._bin_edges)
            self._bins_per_feature = np.array(
                [e.size + 1 for e in self._bin_edges], dtype=np.int32
            )

        base = float(np.average(y, weights=w))
        self.base_score_ = np.array([base])
        pred = np.full(x.shape[0], base)

        importance_total = np.zeros(x.shape[1])
        self.stages_ = []
        self.train_loss_path_ = []
        wn = w / w.sum()
        for stage_idx in range(self.n_estimators):
            g = pred - y
            h = np.ones_like(y)
            tree, update = self._grow_stage_tree(x, g, h, w, mtry, stage_idx, 0)
            self.stages_.append([tree])
            pred += self.learning_rate * update
            importance_total += tree.importances
            self.train_loss_path_.append(float((wn * (pred - y) ** 2).sum()))
        return self._finish(importance_total)

    def predict(self, x):
        return self._raw_scores(x)[:, 0]
