"""Method descriptors -> concrete estimators, and per-family evaluation."""
from __future__ import annotations

import dataclasses
import zlib

import numpy as np

from ..distill import (
    MultiTeacherDistiller,
    NeuralToTreeDistiller,
    ProgressiveDistiller,
    TreeToNeuralDistiller,
    default_tree_teachers,
)
from ..neural import MlpClassifier, MlpRegressor
from ..trees import (
    ForestClassifier,
    ForestRegressor,
    GradientBoostingClassifier,
    GradientBoostingRegressor,
)


def _forest(task, mode, seed):
    cls = ForestClassifier if task == "classification" else ForestRegressor
    return cls(n_estimators=200, max_depth=0, mode=mode, seed=seed)


def _gbm(task, variant, seed):
    cls = (
        GradientBoostingClassifier
        if task == "classification"
        else GradientBoostingRegressor
    )
    return cls(n_estimators=100, max_depth=6, learning_rate=0.1, variant=variant,
               seed=seed)


def _mlp(task, arch, train, seed):
    cls = MlpClassifier if task == "classification" else MlpRegressor
    return cls(arch=arch, train_spec=train, seed=seed)


def build_estimator(method, task, seed):
    """Instantiate the estimator for one (method, task, seed) cell."""
    train = dataclasses.replace(method.train, seed=seed)
    if method.kind == "tree_baseline":
        builders = {
            "random_forest": lambda: _forest(task, "bagging", seed),
            "extra_trees": lambda: _forest(task, "extra", seed),
            "gradient_boosting": lambda: _gbm(task, "first_order", seed),
            "newton_boosting": lambda: _gbm(task, "newton", seed),
            "histogram_boosting": lambda: _gbm(task, "histogram", seed),
        }
        return builders[method.model]()
    if method.kind == "nn_baseline":
        return _mlp(task, method.arch, train, seed)
    if method.kind in ("rf_to_nn", "rf_to_nn_uncertainty"):
        return TreeToNeuralDistiller(
            teacher=_forest(task, "bagging", seed),
            student_arch=method.arch,
            spec=method.distill,
            train_spec=train,
            seed=seed,
        )
    if method.kind == "nn_to_rf":
        return NeuralToTreeDistiller(
            teacher=_mlp(task, method.arch, train, seed),
            student=_forest(task, "bagging", seed),
            spec=method.distill,
            seed=seed,
        )
    if method.kind in ("multi_teacher", "multi_teacher_uncertainty"):
        return MultiTeacherDistiller(
            teachers=default_tree_teachers(task, seed=seed),
            student_arch="standard",
            spec=method.distill,
            train_spec=train,
            seed=seed,
        )
    if method.kind == "progressive":
        return ProgressiveDistiller(
            teachers=default_tree_teachers(task, seed=seed),
            spec=method.distill,
            train_spec=train,
            seed=seed,
        )
    raise ValueError(f"unknown method kind {method.kind!r}")


def stable_cell_seed(method_id, dataset_name, seed):
    """Deterministic per-cell stream id for Monte-Carlo dropout."""
    return zlib.crc32(f"{method_id}|{dataset_name}|{seed}".encode())


def evaluate_model(model, x_test, mc_passes, mc_seed):
    """Family-appropriate predictions, uncertainty and inference callable.

    Returns (point_or_probs, per_sample_uncertainty, predict_for_timing).
    Forest-family models report the variance across their trees in one
    pass; neural-family models report Monte-Carlo-dropout variance, and
    their timed inference is the stochastic multi-pass call. Boosting
    models have no ensemble spread and report zero uncertainty.
    """
    if hasattr(model, "predict_with_uncertainty"):
        mean, var = model.predict_with_uncertainty(x_test, passes=mc_passes, seed=mc_seed)
        out = (
            model.predict_proba(x_test)
            if hasattr(model, "predict_proba")
            else model.predict(x_test)
        )
        timed = lambda x: model.predict_with_uncertainty(x, passes=mc_passes, seed=mc_seed)
        return out, var, timed
    if hasattr(model, "member_signals"):
        mean, var = model.member_signals(x_test)
        return mean, var, model.member_signals
    out = (
        model.predict_proba(x_test)
        if hasattr(model, "predict_proba")
        else model.predict(x_test)
    )
    var = np.zeros(x_test.shape[0])
    timed = model.predict_proba if hasattr(model, "predict_proba") else model.predict
    return out, var, timed
