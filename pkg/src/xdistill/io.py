"""JSON serialization of fitted models.

Schema (version 1): a top-level object with "schema_version", "model_type",
"params" (constructor arguments) and "state" (fitted arrays). Tree models
store every tree as nested node objects: internal nodes carry
{"feature", "threshold", "left", "right"} with the rule x[feature] <
threshold -> left; leaves carry {"value"} (class-probability list for
classification, scalar for regression). Neural models store flat
row-major weight lists per layer.
"""
from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .neural.estimators import MlpClassifier, MlpRegressor
from .neural.net import MlpModel, MlpSpec
from .neural.training import TrainSpec
from .trees.boosting import GradientBoostingClassifier, GradientBoostingRegressor
from .trees.forest import ForestClassifier, ForestRegressor, Tree

SCHEMA_VERSION = 1

_MODEL_TYPES = {
    "forest_classifier": ForestClassifier,
    "forest_regressor": ForestRegressor,
    "gbm_classifier": GradientBoostingClassifier,
    "gbm_regressor": GradientBoostingRegressor,
    "mlp_classifier": MlpClassifier,
    "mlp_regressor": MlpRegressor,
}
_TYPE_NAMES = {cls: name for name, cls in _MODEL_TYPES.items()}


def _tree_to_nested(tree):
    """Iterative flat-to-nested conversion (trees can be very deep)."""
    nodes = [None] * tree.node_count
    for i in range(tree.node_count - 1, -1, -1):
        if tree.feature[i] < 0:
            value = tree.value[i]
            nodes[i] = {"value": value.tolist() if value.size > 1 else float(value[0])}
        else:
            nodes[i] = {
                "feature": int(tree.feature[i]),
                "threshold": float(tree.threshold[i]),
                "left": nodes[tree.left[i]],
                "right": nodes[tree.right[i]],
            }
    return nodes[0]


def _tree_from_nested(node, n_values):
    feature, threshold, left, right, values = [], [], [], [], []

    def add(nd):
        i = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        values.append([0.0] * n_values)
        return i

    stack = [(node, add(node))]
    while stack:
        nd, i = stack.pop()
        if "value" in nd:
            v = nd["value"]
            values[i] = [float(v)] if np.isscalar(v) else [float(x) for x in v]
        else:
            feature[i] = int(nd["feature"])
            threshold[i] = float(nd["threshold"])
            li = add(nd["left"])
            ri = add(nd["right"])
            left[i] = li
            right[i] = ri
            stack.append((nd["left"], li))
            stack.append((nd["right"], ri))
    count = len(feature)
    return Tree(
        np.array(feature, dtype=np.int32),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int32),
        np.array(right, dtype=np.int32),
        np.array(values, dtype=np.float64),
        np.zeros(count, dtype=np.int64),
        np.zeros(0, dtype=np.float64),
    )


def model_to_dict(model):
    """Serialize a fitted forest, boosting or MLP model to plain objects."""
    name = _TYPE_NAMES.get(type(model))
    if name is None:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    out = {
        "schema_version": SCHEMA_VERSION,
        "model_type": name,
        "params": _params_to_json(model),
    }
    if name.startswith("forest"):
        state = {
            "n_features": model.n_features_,
            "feature_importances": model.feature_importances_.tolist(),
            "trees": [_tree_to_nested(t) for t in model.trees_],
        }
        if hasattr(model, "classes_"):
            state["classes"] = model.classes_.tolist()
    elif name.startswith("gbm"):
        state = {
            "n_features": model.n_features_,
            "feature_importances": model.feature_importances_.tolist(),
            "base_score": model.base_score_.tolist(),
            "stages": [[_tree_to_nested(t) for t in stage] for stage in model.stages_],
        }
        if hasattr(model, "classes_"):
            state["classes"] = model.classes_.tolist()
    else:
        net = model.net_
        state = {
            "input_dim": net.input_dim,
            "spec": {
                "layer_widths": list(net.spec.layer_widths),
                "dropout_rates": list(net.spec.dropout_rates),
                "batchnorm": list(net.spec.batchnorm),
                "skip_blocks": [list(s) for s in net.spec.skip_blocks],
                "output_dim": net.spec.output_dim,
                "task": net.spec.task,
            },
            "weights": [w.ravel().tolist() for w in net.weights],
            "biases": [None if b is None else b.tolist() for b in net.biases],
            "gammas": [None if g is None else g.tolist() for g in net.gammas],
            "betas": [None if b is None else b.tolist() for b in net.betas],
            "running_mean": [None if m is None else m.tolist() for m in net.running_mean],
            "running_var": [None if v is None else v.tolist() for v in net.running_var],
            "out_weight": net.out_weight.ravel().tolist(),
            "out_bias": net.out_bias.tolist(),
        }
        if hasattr(model, "classes_"):
            state["classes"] = model.classes_.tolist()
    out["state"] = state
    return out


def _params_to_json(model):
    params = {}
    for key, value in model.get_params(deep=False).items():
        if isinstance(value, (TrainSpec,)):
            params[key] = asdict(value)
        elif isinstance(value, MlpSpec):
            params[key] = {
                "layer_widths": list(value.layer_widths),
                "dropout_rates": list(value.dropout_rates),
                "batchnorm": list(value.batchnorm),
                "skip_blocks": [list(s) for s in value.skip_blocks],
                "output_dim": value.output_dim,
                "task": value.task,
            }
        elif isinstance(value, np.generic):
            params[key] = value.item()
        else:
            params[key] = value
    return params


def model_from_dict(data):
    """Rebuild a fitted model from model_to_dict output."""
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {data.get('schema_version')!r}")
    name = data["model_type"]
    if name not in _MODEL_TYPES:
        raise ValueError(f"unknown model_type {name!r}")
    cls = _MODEL_TYPES[name]
    params = dict(data["params"])
    state = data["state"]
    if name.startswith("mlp"):
        if params.get("train_spec") is not None:
            params["train_spec"] = TrainSpec(**params["train_spec"])
        if isinstance(params.get("arch"), dict) or params.get("arch") is None:
            spec_data = state["spec"]
            params["arch"] = MlpSpec(
                tuple(spec_data["layer_widths"]),
                tuple(spec_data["dropout_rates"]),
                tuple(spec_data["batchnorm"]),
                tuple(tuple(s) for s in spec_data["skip_blocks"]),
                spec_data["output_dim"],
                spec_data["task"],
            )
        model = cls(**params)
        spec_data = state["spec"]
        spec = MlpSpec(
            tuple(spec_data["layer_widths"]),
            tuple(spec_data["dropout_rates"]),
            tuple(spec_data["batchnorm"]),
            tuple(tuple(s) for s in spec_data["skip_blocks"]),
            spec_data["output_dim"],
            spec_data["task"],
        )
        net = MlpModel(spec, state["input_dim"], seed=params.get("seed", 0))
        for i in range(spec.n_hidden):
            net.weights[i] = np.array(state["weights"][i]).reshape(net.weights[i].shape)
            if state["biases"][i] is not None:
                net.biases[i] = np.array(state["biases"][i])
            if state["gammas"][i] is not None:
                net.gammas[i] = np.array(state["gammas"][i])
                net.betas[i] = np.array(state["betas"][i])
                net.running_mean[i] = np.array(state["running_mean"][i])
                net.running_var[i] = np.array(state["running_var"][i])
        net.out_weight = np.array(state["out_weight"]).reshape(net.out_weight.shape)
        net.out_bias = np.array(state["out_bias"])
        model.net_ = net
        model.n_features_ = state["input_dim"]
        if "classes" in state:
            model.classes_ = np.array(state["classes"])
            model.n_classes_ = model.classes_.shape[0]
        return model
    model = cls(**params)
    model.n_features_ = state["n_features"]
    model.feature_importances_ = np.array(state["feature_importances"])
    if "classes" in state:
        model.classes_ = np.array(state["classes"])
        model.n_classes_ = model.classes_.shape[0]
    if name.startswith("forest"):
        n_values = model.n_classes_ if "classes" in state else 1
        model.trees_ = [_tree_from_nested(t, n_values) for t in state["trees"]]
    else:
        model.base_score_ = np.array(state["base_score"])
        model.stages_ = [
            [_tree_from_nested(t, 1) for t in stage] for stage in state["stages"]
        ]
    return model


def save_model(model, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)
    return path


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
