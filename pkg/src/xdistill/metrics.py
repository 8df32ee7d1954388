"""Evaluation metrics and inference timing."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .validation import check_probabilities


@dataclass
class MetricReport:
    task: str
    accuracy: float | None = None
    f1_macro: float | None = None
    auc: float | None = None
    rmse: float | None = None
    r2: float | None = None
    mae: float | None = None
    mean_uncertainty: float | None = None
    inference_seconds: float | None = None

    def __post_init__(self):
        for name in ("accuracy", "f1_macro", "auc"):
            v = getattr(self, name)
            if v is not None and not (-1e-9 <= v <= 1 + 1e-9):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        for name in ("rmse", "mae"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative, got {v}")
        if self.r2 is not None and self.r2 > 1 + 1e-9:
            raise ValueError(f"r2 cannot exceed 1, got {self.r2}")


def _binary_auc(scores, positives):
    """ROC area via the rank statistic with midranks for ties."""
    n_pos = int(positives.sum())
    n_neg = positives.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    ranks = np.empty(positives.size, dtype=np.float64)
    i = 0
    while i < sorted_scores.size:
        j = i
        while j + 1 < sorted_scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # midrank, 1-based
        i = j + 1
    rank_sum = ranks[positives].sum()
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_auc(probs, labels):
    """One-vs-rest macro AUC; None when no class has both outcomes."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.shape[1] == 2:
        return _binary_auc(probs[:, 1], labels == 1)
    aucs = []
    for cls in range(probs.shape[1]):
        auc = _binary_auc(probs[:, cls], labels == cls)
        if auc is not None:
            aucs.append(auc)
    return float(np.mean(aucs)) if aucs else None


def f1_macro(predictions, labels, n_classes):
    scores = []
    for cls in range(n_classes):
        tp = int(np.sum((predictions == cls) & (labels == cls)))
        fp = int(np.sum((predictions == cls) & (labels != cls)))
        fn = int(np.sum((predictions != cls) & (labels == cls)))
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom > 0 else 0.0)
    return float(np.mean(scores))


def classification_metrics(probs, labels):
    """Accuracy (argmax), macro F1 and one-vs-rest macro ROC AUC."""
    probs = check_probabilities(probs)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != probs.shape[0]:
        raise ValueError("probs and labels length mismatch")
    predictions = np.argmax(probs, axis=1)
    accuracy = float((predictions == labels).mean())
    f1 = f1_macro(predictions, labels, probs.shape[1])
    auc = roc_auc(probs, labels)
    return MetricReport(task="classification", accuracy=accuracy, f1_macro=f1, auc=auc)


def regression_metrics(preds, targets):
    """RMSE, R^2 and MAE; R^2 is None for constant targets."""
    preds = np.asarray(preds, dtype=np.float64).reshape(-1)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    if preds.shape[0] != targets.shape[0]:
        raise ValueError("preds and targets length mismatch")
    if preds.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    err = preds - targets
    rmse = float(np.sqrt((err**2).mean()))
    mae = float(np.abs(err).mean())
    ss_tot = float(((targets - targets.mean()) ** 2).sum())
    r2 = None if ss_tot == 0.0 else float(1.0 - (err**2).sum() / ss_tot)
    return MetricReport(task="regression", rmse=rmse, r2=r2, mae=mae)


def time_inference(predict_fn, x, repeats=5):
    """Median wall-clock seconds of predict_fn(x); one warm-up call excluded."""
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    predict_fn(x)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        predict_fn(x)
        times.append(time.perf_counter() - start)
    return float(np.median(times))
