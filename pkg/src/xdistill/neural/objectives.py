"""Training objectives: scalar loss + gradient w.r.t. the network output.

Objectives hold full-dataset target arrays and are evaluated on row
subsets, so distillation targets stay aligned with minibatch shuffling.
"""
from __future__ import annotations

import numpy as np


def softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def log_softmax(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


class CrossEntropy:
    """Mean softmax cross-entropy against integer labels."""

    def __init__(self, labels):
        self.labels = np.asarray(labels, dtype=np.int64)

    def value_and_grad(self, logits, rows):
        y = self.labels[rows]
        logp = log_softmax(logits)
        n = logits.shape[0]
        value = -logp[np.arange(n), y].mean()
        grad = softmax(logits)
        grad[np.arange(n), y] -= 1.0
        return value, grad / n

    def value(self, logits, rows):
        y = self.labels[rows]
        logp = log_softmax(logits)
        return -logp[np.arange(logits.shape[0]), y].mean()


class SquaredError:
    """Mean squared error against real targets (single-output nets)."""

    def __init__(self, targets):
        self.targets = np.asarray(targets, dtype=np.float64).reshape(-1)

    def value_and_grad(self, logits, rows):
        t = self.targets[rows]
        diff = logits[:, 0] - t
        n = logits.shape[0]
        value = float((diff**2).mean())
        grad = np.zeros_like(logits)
        grad[:, 0] = 2.0 * diff / n
        return value, grad

    def value(self, logits, rows):
        t = self.targets[rows]
        return float(((logits[:, 0] - t) ** 2).mean())
