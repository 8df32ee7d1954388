"""Knowledge-transfer procedures between tree ensembles and neural nets."""
from .distillers import (
    MultiTeacherDistiller,
    NeuralToTreeDistiller,
    ProgressiveDistiller,
    TreeToNeuralDistiller,
    default_tree_teachers,
    teacher_variance,
)
from .losses import (
    combined_loss,
    combined_loss_regression,
    cross_entropy,
    kd_loss,
    kd_per_sample,
    multi_teacher_loss,
    teacher_pseudo_logits,
    temperature_softmax,
    uncertainty_aware_loss,
)
from .objectives import ClassificationDistillObjective, RegressionDistillObjective
from .spec import DistillSpec

__all__ = [
    "ClassificationDistillObjective",
    "DistillSpec",
    "MultiTeacherDistiller",
    "NeuralToTreeDistiller",
    "ProgressiveDistiller",
    "RegressionDistillObjective",
    "TreeToNeuralDistiller",
    "combined_loss",
    "combined_loss_regression",
    "cross_entropy",
    "default_tree_teachers",
    "kd_loss",
    "kd_per_sample",
    "multi_teacher_loss",
    "teacher_pseudo_logits",
    "teacher_variance",
    "temperature_softmax",
    "uncertainty_aware_loss",
]
