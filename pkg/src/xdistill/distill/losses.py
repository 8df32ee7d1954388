"""Knowledge-transfer losses (scalar values and per-sample internals).

Tree teachers emit probabilities, not logits; they are mapped to
pseudo-logits ln(p + 1e-7) so that temperature scaling is well defined
and tau = 1 recovers the teacher distribution up to epsilon.
"""
from __future__ import annotations

import numpy as np

from ..neural.objectives import log_softmax, softmax
from ..validation import check_probabilities

PSEUDO_LOGIT_EPS = 1e-7


def teacher_pseudo_logits(teacher_probs):
    return np.log(np.asarray(teacher_probs, dtype=np.float64) + PSEUDO_LOGIT_EPS)


def temperature_softmax(logits, tau):
    return softmax(np.asarray(logits, dtype=np.float64) / tau)


def _check_kd_inputs(student_logits, teacher_probs, tau):
    if tau <= 0:
        raise ValueError("tau must be positive")
    student_logits = np.asarray(student_logits, dtype=np.float64)
    teacher_probs = check_probabilities(teacher_probs, "teacher_probs")
    if student_logits.shape != teacher_probs.shape:
        raise ValueError(
            f"shape mismatch: student {student_logits.shape} vs teacher {teacher_probs.shape}"
        )
    return student_logits, teacher_probs


def kd_per_sample(student_logits, teacher_probs, tau):
    """Per-sample temperature-scaled KL terms and their logit gradients.

    Returns (values, grads): values[i] = tau^2 * KL(p_i || q_i) with
    p = softmax(pseudo_logits / tau), q = softmax(student / tau);
    grads[i] = d values[i] / d student_logits[i] = tau * (q_i - p_i).
    """
    p = temperature_softmax(teacher_pseudo_logits(teacher_probs), tau)
    log_q = log_softmax(student_logits / tau)
    log_p = np.log(p)
    values = tau * tau * (p * (log_p - log_q)).sum(axis=1)
    grads = tau * (softmax(student_logits / tau) - p)
    return values, grads


def kd_loss(student_logits, teacher_probs, tau):
    """Mean temperature-scaled KL between teacher and student distributions."""
    student_logits, teacher_probs = _check_kd_inputs(student_logits, teacher_probs, tau)
    values, _ = kd_per_sample(student_logits, teacher_probs, tau)
    # KL is nonnegative; identical distributions can round to ~-1e-16
    return max(float(values.mean()), 0.0)


def cross_entropy(student_logits, labels):
    logits = np.asarray(student_logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    logp = log_softmax(logits)
    return float(-logp[np.arange(logits.shape[0]), labels].mean())


def combined_loss(student_logits, teacher_probs, labels, alpha, tau):
    """alpha * kd_loss + (1 - alpha) * cross-entropy against hard labels."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * kd_loss(student_logits, teacher_probs, tau) + (
        1.0 - alpha
    ) * cross_entropy(student_logits, labels)


def combined_loss_regression(student_pred, teacher_pred, targets, alpha):
    """Regression analog: alpha * MSE(student, teacher) + (1-alpha) * MSE(student, y)."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must lie in [0, 1]")
    s = np.asarray(student_pred, dtype=np.float64).reshape(-1)
    t = np.asarray(teacher_pred, dtype=np.float64).reshape(-1)
    y = np.asarray(targets, dtype=np.float64).reshape(-1)
    return float(alpha * ((s - t) ** 2).mean() + (1 - alpha) * ((s - y) ** 2).mean())


def multi_teacher_loss(student_logits, teacher_probs_list, weights, tau):
    """Weighted sum of per-teacher distillation losses."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape[0] != len(teacher_probs_list):
        raise ValueError("weights length must match teacher count")
    if np.any(weights < 0):
        raise ValueError("teacher weights must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("teacher weights must sum to 1")
    total = 0.0
    for w, probs in zip(weights, teacher_probs_list):
        total += w * kd_loss(student_logits, probs, tau)
    return float(total)


def uncertainty_aware_loss(student_logits, teacher_probs, teacher_variance, labels, spec):
    """Confidence-aware distillation loss.

    literal: combined_loss + lambda * mean(variance) (the added term does
    not depend on the student). sample_weighted: per-sample soft terms are
    scaled by 1/(1 + lambda * var_i), renormalized to mean weight 1, so
    low-confidence teacher rows contribute less.
    """
    var = np.asarray(teacher_variance, dtype=np.float64).reshape(-1)
    if np.any(var < 0):
        raise ValueError("teacher variance must be nonnegative")
    student_logits, teacher_probs = _check_kd_inputs(student_logits, teacher_probs, spec.tau)
    if var.shape[0] != student_logits.shape[0]:
        raise ValueError("teacher_variance length must match batch size")
    ce = cross_entropy(student_logits, labels)
    kd_values, _ = kd_per_sample(student_logits, teacher_probs, spec.tau)
    if spec.uncertainty_mode == "literal" or spec.lambda_ == 0.0:
        return float(
            spec.alpha * kd_values.mean()
            + (1 - spec.alpha) * ce
            + spec.lambda_ * var.mean()
        )
    weights = 1.0 / (1.0 + spec.lambda_ * var)
    weights = weights / weights.mean()
    return float(spec.alpha * (weights * kd_values).mean() + (1 - spec.alpha) * ce)
