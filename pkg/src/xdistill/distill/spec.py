"""Distillation hyperparameter bundle."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class DistillSpec:
    """All knobs of the knowledge-transfer procedures.

    alpha      soft/hard mixing weight of the combined loss
    tau        softmax temperature for the distillation term
    beta       teacher-label influence when training tree students
    teacher_weights  per-teacher weights (None = equal); must sum to 1
    lambda_    weight of the teacher-variance term (0 disables it);
               serialized under the JSON key "lambda"
    aug_copies / aug_sigma   jittered copies added when training tree
               students (Gaussian noise in standardized feature space)
    uncertainty_mode  'literal' adds lambda * mean(variance) to the loss;
               'sample_weighted' rescales per-sample soft terms by
               1 / (1 + lambda * variance), renormalized to mean weight 1
    """

    alpha: float = 0.7
    tau: float = 3.0
    beta: float = 0.5
    teacher_weights: tuple | None = None
    lambda_: float = 0.0
    aug_copies: int = 1
    aug_sigma: float = 0.05
    uncertainty_mode: str = "literal"

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError("beta must lie in [0, 1]")
        if self.lambda_ < 0.0:
            raise ValueError("lambda must be nonnegative")
        if self.aug_copies < 0:
            raise ValueError("aug_copies must be nonnegative")
        if self.aug_sigma < 0.0:
            raise ValueError("aug_sigma must be nonnegative")
        if self.aug_copies > 0 and self.aug_sigma == 0.0:
            raise ValueError("aug_copies > 0 requires aug_sigma > 0 (copies would be exact duplicates)")
        if self.uncertainty_mode not in ("literal", "sample_weighted"):
            raise ValueError(f"unknown uncertainty_mode {self.uncertainty_mode!r}")
        if self.teacher_weights is not None:
            weights = tuple(float(w) for w in self.teacher_weights)
            if any(w < 0 for w in weights):
                raise ValueError("teacher weights must be nonnegative")
            if abs(sum(weights) - 1.0) > 1e-9:
                raise ValueError("teacher weights must sum to 1")
            object.__setattr__(self, "teacher_weights", weights)

    def with_(self, **kwargs):
        return replace(self, **kwargs)

    def to_json(self):
        return {
            "alpha": self.alpha,
            "tau": self.tau,
            "beta": self.beta,
            "teacher_weights": list(self.teacher_weights) if self.teacher_weights else None,
            "lambda": self.lambda_,
            "aug_copies": self.aug_copies,
            "aug_sigma": self.aug_sigma,
            "uncertainty_mode": self.uncertainty_mode,
        }

    @classmethod
    def from_json(cls, data):
        data = dict(data)
        if "lambda" in data:
            data["lambda_"] = data.pop("lambda")
        weights = data.get("teacher_weights")
        if weights is not None:
            data["teacher_weights"] = tuple(weights)
        return cls(**data)
