"""Trainable distillation objectives (value + gradient w.r.t. student output)."""
from __future__ import annotations

import numpy as np

from ..neural.objectives import log_softmax, softmax
from .losses import teacher_pseudo_logits


def _normalize_weights(weights, count):
    if weights is None:
        return np.full(count, 1.0 / count)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape[0] != count:
        raise ValueError(f"got {w.shape[0]} weights for {count} teachers")
    if np.any(w < 0):
        raise ValueError("teacher weights must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("teacher weights must sum to 1")
    return w


class _VarianceTerm:
    """Shared handling of the teacher-variance term of the loss."""

    def __init__(self, lambda_, variance, mode, n_rows):
        self.lambda_ = float(lambda_)
        self.mode = mode
        if self.lambda_ > 0:
            if variance is None:
                raise ValueError("lambda > 0 requires per-sample teacher variance")
            self.variance = np.asarray(variance, dtype=np.float64).reshape(-1)
            if self.variance.shape[0] != n_rows:
                raise ValueError("variance length must match training rows")
            if np.any(self.variance < 0):
                raise ValueError("teacher variance must be nonnegative")
            if mode == "sample_weighted":
                w = 1.0 / (1.0 + self.lambda_ * self.variance)
                self.sample_weights = w / w.mean()
        else:
            self.variance = None

    def soft_weights(self, rows):
        if self.lambda_ > 0 and self.mode == "sample_weighted":
            return self.sample_weights[rows]
        return None

    def constant(self, rows):
        if self.lambda_ > 0 and self.mode == "literal":
            return self.lambda_ * self.variance[rows].mean()
        return 0.0


class ClassificationDistillObjective:
    """alpha * sum_i w_i KD_i + (1 - alpha) * cross-entropy (+ variance term).

    Teacher probability matrices are converted once to temperature-scaled
    target distributions; evaluation on row subsets keeps targets aligned
    with minibatch shuffling.
    """

    def __init__(self, labels, teacher_probs_list, weights=None, alpha=0.7,
                 tau=3.0, lambda_=0.0, variance=None, mode="literal"):
        if tau <= 0:
            raise ValueError("tau must be positive")
        if not (0.0 <= alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        self.labels = np.asarray(labels, dtype=np.int64)
        self.alpha = float(alpha)
        self.tau = float(tau)
        self.weights = _normalize_weights(weights, len(teacher_probs_list))
        self.p_tau = [
            softmax(teacher_pseudo_logits(p) / tau) for p in teacher_probs_list
        ]
        self.log_p_tau = [np.log(p) for p in self.p_tau]
        self.var_term = _VarianceTerm(lambda_, variance, mode, self.labels.shape[0])

    def _soft_terms(self, logits, rows):
        tau = self.tau
        log_q = log_softmax(logits / tau)
        q = np.exp(log_q)
        values = np.zeros(logits.shape[0])
        grads = np.zeros_like(logits)
        for w, p, log_p in zip(self.weights, self.p_tau, self.log_p_tau):
            if w == 0.0:
                continue
            pr = p[rows]
            values += w * tau * tau * (pr * (log_p[rows] - log_q)).sum(axis=1)
            grads += w * tau * (q - pr)
        return values, grads

    def value_and_grad(self, logits, rows):
        n = logits.shape[0]
        y = self.labels[rows]
        kd_values, kd_grads = self._soft_terms(logits, rows)
        sw = self.var_term.soft_weights(rows)
        if sw is not None:
            kd_value = (sw * kd_values).mean()
            kd_grad = sw[:, None] * kd_grads / n
        else:
            kd_value = kd_values.mean()
            kd_grad = kd_grads / n
        logp = log_softmax(logits)
        ce_value = -logp[np.arange(n), y].mean()
        ce_grad = softmax(logits)
        ce_grad[np.arange(n), y] -= 1.0
        ce_grad /= n
        value = (
            self.alpha * kd_value
            + (1 - self.alpha) * ce_value
            + self.var_term.constant(rows)
        )
        grad = self.alpha * kd_grad + (1 - self.alpha) * ce_grad
        return float(value), grad

    def value(self, logits, rows):
        return self.value_and_grad(logits, rows)[0]


class RegressionDistillObjective:
    """alpha * sum_i w_i MSE(student, teacher_i) + (1 - alpha) * MSE(student, y)."""

    def __init__(self, targets, teacher_preds_list, weights=None, alpha=0.7,
                 lambda_=0.0, variance=None, mode="literal"):
        if not (0.0 <= alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        self.targets = np.asarray(targets, dtype=np.float64).reshape(-1)
        self.alpha = float(alpha)
        self.weights = _normalize_weights(weights, len(teacher_preds_list))
        self.teacher_preds = [
            np.asarray(t, dtype=np.float64).reshape(-1) for t in teacher_preds_list
        ]
        self.var_term = _VarianceTerm(lambda_, variance, mode, self.targets.shape[0])

    def value_and_grad(self, logits, rows):
        n = logits.shape[0]
        s = logits[:, 0]
        soft_values = np.zeros(n)
        soft_grads = np.zeros(n)
        for w, t in zip(self.weights, self.teacher_preds):
            if w == 0.0:
                continue
            diff = s - t[rows]
            soft_values += w * diff * diff
            soft_grads += w * 2.0 * diff
        sw = self.var_term.soft_weights(rows)
        if sw is not None:
            soft_value = (sw * soft_values).mean()
            soft_grad = sw * soft_grads / n
        else:
            soft_value = soft_values.mean()
            soft_grad = soft_grads / n
        diff_y = s - self.targets[rows]
        hard_value = (diff_y**2).mean()
        hard_grad = 2.0 * diff_y / n
        value = (
            self.alpha * soft_value
            + (1 - self.alpha) * hard_value
            + self.var_term.constant(rows)
        )
        grad = np.zeros_like(logits)
        grad[:, 0] = self.alpha * soft_grad + (1 - self.alpha) * hard_grad
        return float(value), grad

    def value(self, logits, rows):
        return self.value_and_grad(logits, rows)[0]
