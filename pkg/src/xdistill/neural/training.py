"""Minibatch Adam training with validation-based early stopping."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objectives import softmax


class TrainingDiverged(RuntimeError):
    """Raised when the training loss becomes NaN or infinite."""


@dataclass(frozen=True)
class TrainSpec:
    learning_rate: float = 1e-3
    batch_size: int = 32
    max_epochs: int = 200
    early_stop_patience: int = 20
    val_fraction: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.max_epochs < 1:
            raise ValueError("learning_rate, batch_size and max_epochs must be positive")
        if self.early_stop_patience < 1:
            raise ValueError("early_stop_patience must be positive")
        if not (0.0 <= self.val_fraction < 1.0):
            raise ValueError("val_fraction must lie in [0, 1)")


class Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        correction = self.lr * np.sqrt(1.0 - b2**self.t) / (1.0 - b1**self.t)
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p -= correction * m / (np.sqrt(v) + self.eps)


def train(model, x, objective, spec):
    """Fit the model in place; returns per-epoch history.

    Early stopping watches the validation loss (computed in eval mode on a
    held-back fraction of the rows) and restores the best parameters.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise ValueError("empty training data")
    if x.shape[1] != model.input_dim:
        raise ValueError(f"data has {x.shape[1]} features, model expects {model.input_dim}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed)))
    perm = rng.permutation(n)
    n_val = int(round(spec.val_fraction * n))
    if spec.val_fraction > 0 and n_val == 0:
        n_val = 1
    val_rows = perm[:n_val]
    train_rows = perm[n_val:]
    if train_rows.size == 0:
        raise ValueError("validation split leaves no training rows")

    optimizer = Adam(model.parameters(), spec.learning_rate)
    history = {"train_loss": [], "val_loss": []}
    best_val = np.inf
    best_params = None
    best_epoch = -1
    patience_left = spec.early_stop_patience

    for epoch in range(spec.max_epochs):
        order = train_rows[rng.permutation(train_rows.size)]
        total = 0.0
        for start in range(0, order.size, spec.batch_size):
            batch = order[start:start + spec.batch_size]
            logits = model.forward(
                x[batch], batch_stats=True, dropout_rng=rng, update_running=True
            )
            loss, dlogits = objective.value_and_grad(logits, batch)
            if not np.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss {loss!r} at epoch {epoch}, "
                    f"batch starting {start} (lr={spec.learning_rate})"
                )
            params = model.parameters()
            grads = model.backward(dlogits)
            optimizer.step(params, grads)
            total += loss * batch.size
        history["train_loss"].append(total / order.size)

        if n_val > 0:
            logits = model.forward(x[val_rows], batch_stats=False, dropout_rng=None)
            val_loss = objective.value(logits, val_rows)
            history["val_loss"].append(val_loss)
            if val_loss < best_val:
                best_val = val_loss
                best_params = model.copy_parameters()
                best_epoch = epoch
                patience_left = spec.early_stop_patience
            else:
                patience_left -= 1
                if patience_left == 0:
                    break

    if best_params is not None:
        model.set_parameters(best_params)
    history["best_epoch"] = best_epoch if best_params is not None else len(
        history["train_loss"]
    ) - 1
    model.history = history
    return history


def predict_logits(model, x):
    x = np.asarray(x, dtype=np.float64)
    return model.forward(x, batch_stats=False, dropout_rng=None)


def predict_mlp(model, x, mode="eval", passes=30, seed=0):
    """Predict with optional stochastic forward passes.

    mode='eval': deterministic (dropout off, running batchnorm statistics);
    returns (output, zero variance). mode='mc_dropout': `passes` stochastic
    passes with dropout active; returns the per-sample mean and variance
    (probability vectors averaged over classes for classification).
    """
    x = np.asarray(x, dtype=np.float64)
    classification = model.spec.task == "classification"
    if mode == "eval":
        logits = model.forward(x, batch_stats=False, dropout_rng=None)
        out = softmax(logits) if classification else logits[:, 0]
        return out, np.zeros(x.shape[0])
    if mode != "mc_dropout":
        raise ValueError(f"unknown mode {mode!r}")
    if passes < 1:
        raise ValueError("passes must be >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    acc = None
    acc_sq = None
    for _ in range(passes):
        logits = model.forward(x, batch_stats=False, dropout_rng=rng)
        out = softmax(logits) if classification else logits[:, 0]
        if acc is None:
            acc = np.zeros_like(out)
            acc_sq = np.zeros_like(out)
        acc += out
        acc_sq += out * out
    mean = acc / passes
    var = np.maximum(acc_sq / passes - mean * mean, 0.0)
    if var.ndim == 2:
        var = var.mean(axis=1)
    return mean, var
