"""Minimal estimator base class.

Implements the get_params/set_params protocol so models compose with
scikit-learn tooling (clone, pipelines, grid search) without depending
on scikit-learn itself.
"""
from __future__ import annotations

import inspect


class NotFittedError(ValueError):
    """Raised when predict/transform is called before fit."""


class BaseEstimator:
    """get_params/set_params via __init__ signature introspection."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep=True):
        out = {}
        for name in self._param_names():
            value = getattr(self, name)
            if deep and hasattr(value, "get_params"):
                for sub, subval in value.get_params(deep=True).items():
                    out[f"{name}__{sub}"] = subval
            out[name] = value
        return out

    def set_params(self, **params):
        valid = set(self._param_names())
        nested = {}
        for key, value in params.items():
            if "__" in key:
                head, _, tail = key.partition("__")
                nested.setdefault(head, {})[tail] = value
            elif key in valid:
                setattr(self, key, value)
            else:
                raise ValueError(f"unknown parameter {key!r} for {type(self).__name__}")
        for head, sub in nested.items():
            getattr(self, head).set_params(**sub)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params(deep=False).items())
        return f"{type(self).__name__}({args})"


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted; call fit() first"
        )


def clone(estimator):
    """Fresh unfitted copy with the same constructor parameters."""
    return type(estimator)(**estimator.get_params(deep=False))
