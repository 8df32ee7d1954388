"""Cross-paradigm knowledge-transfer estimators.

TreeToNeuralDistiller   tree teacher -> MLP student (soft targets + labels)
NeuralToTreeDistiller   MLP teacher -> forest student (label blending on
                        jitter-augmented rows)
MultiTeacherDistiller   weighted set of tree teachers -> one MLP student
ProgressiveDistiller    staged transfer through shrinking architectures,
                        each stage re-using the previous student as an
                        extra teacher
"""
from __future__ import annotations

import numpy as np

from ..base import BaseEstimator, check_is_fitted, clone
from ..neural import MlpClassifier, MlpRegressor
from ..trees import (
    ForestClassifier,
    ForestRegressor,
    GradientBoostingClassifier,
    GradientBoostingRegressor,
    ensemble_signals,
)
from ..validation import check_xy
from .objectives import ClassificationDistillObjective, RegressionDistillObjective
from .spec import DistillSpec


def _task_of(model):
    task = getattr(model, "_task", None)
    if task is None:
        task = "classification" if hasattr(model, "predict_proba") else "regression"
    return task


def _ensure_fitted(model, x, y):
    if hasattr(model, "n_features_"):
        return model
    return clone(model).fit(x, y)


def teacher_variance(teachers, x):
    """Per-sample epistemic variance of the teacher signal.

    A single forest contributes the variance across its own trees; several
    teachers contribute the variance across their mean predictions.
    """
    if len(teachers) == 1:
        teacher = teachers[0]
        if hasattr(teacher, "member_signals"):
            return teacher.member_signals(x)[1]
        raise ValueError(
            "uncertainty-aware distillation needs ensemble members: "
            "use a forest teacher or several teachers"
        )
    return ensemble_signals(list(teachers), x)[1]


def default_tree_teachers(task, seed=0):
    """Forest + Newton boosting + histogram boosting, the diverse teacher trio."""
    if task == "classification":
        return [
            ForestClassifier(n_estimators=200, seed=seed),
            GradientBoostingClassifier(variant="newton", seed=seed),
            GradientBoostingClassifier(variant="histogram", seed=seed),
        ]
    return [
        ForestRegressor(n_estimators=200, seed=seed),
        GradientBoostingRegressor(variant="newton", seed=seed),
        GradientBoostingRegressor(variant="histogram", seed=seed),
    ]


class _StudentMixin:
    """Prediction plumbing shared by distillers with an MLP student."""

    def predict(self, x):
        check_is_fitted(self, "student_")
        return self.student_.predict(x)

    def predict_proba(self, x):
        check_is_fitted(self, "student_")
        return self.student_.predict_proba(x)

    def predict_with_uncertainty(self, x, passes=30, seed=0):
        check_is_fitted(self, "student_")
        return self.student_.predict_with_uncertainty(x, passes=passes, seed=seed)


def _fit_mlp_student(x, y, task, teacher_outputs, weights, spec, arch, train_spec,
                     seed, variance):
    """Train an MLP student against teacher outputs plus hard labels."""
    if task == "classification":
        classes = np.unique(y)
        y_enc = np.searchsorted(classes, y)
        objective = ClassificationDistillObjective(
            y_enc, teacher_outputs, weights, alpha=spec.alpha, tau=spec.tau,
            lambda_=spec.lambda_, variance=variance, mode=spec.uncertainty_mode,
        )
        student = MlpClassifier(arch=arch, train_spec=train_spec, seed=seed)
    else:
        objective = RegressionDistillObjective(
            y, teacher_outputs, weights, alpha=spec.alpha,
            lambda_=spec.lambda_, variance=variance, mode=spec.uncertainty_mode,
        )
        student = MlpRegressor(arch=arch, train_spec=train_spec, seed=seed)
    return student.fit(x, y, objective=objective)


def _teacher_outputs(teacher, x, task, y_classes):
    if task == "classification":
        if not np.array_equal(teacher.classes_, y_classes):
            raise ValueError(
                "teacher classes do not match the training labels "
                f"({teacher.classes_} vs {y_classes})"
            )
        return teacher.predict_proba(x)
    return teacher.predict(x)


class TreeToNeuralDistiller(_StudentMixin, BaseEstimator):
    """Distill one fitted tree ensemble into a neural network student.

    The teacher's soft targets are computed once on the training rows; the
    student minimizes the mixed soft/hard loss (uncertainty-aware when the
    spec sets lambda > 0, sourcing variance from the teacher's trees).
    """

    def __init__(self, teacher=None, student_arch="compact", spec=None,
                 train_spec=None, seed=0):
        self.teacher = teacher
        self.student_arch = student_arch
        self.spec = spec
        self.train_spec = train_spec
        self.seed = seed

    def fit(self, x, y):
        teacher = self.teacher
        if teacher is None:
            teacher = (
                ForestClassifier(n_estimators=200, seed=self.seed)
                if np.asarray(y).dtype.kind in "iub"
                else ForestRegressor(n_estimators=200, seed=self.seed)
            )
        task = _task_of(teacher)
        x, y = check_xy(x, y, task)
        self.teacher_ = _ensure_fitted(teacher, x, y)
        self.task_ = task
        spec = self.spec if self.spec is not None else DistillSpec()
        classes = np.unique(y) if task == "classification" else None
        outputs = _teacher_outputs(self.teacher_, x, task, classes)
        variance = None
        if spec.lambda_ > 0:
            variance = teacher_variance([self.teacher_], x)
        self.student_ = _fit_mlp_student(
            x, y, task, [outputs], None, spec, self.student_arch,
            self.train_spec, self.seed, variance,
        )
        return self


class MultiTeacherDistiller(_StudentMixin, BaseEstimator):
    """Distill several diverse tree teachers into one MLP student.

    The soft loss is the weighted sum of per-teacher distillation terms;
    weights come from spec.teacher_weights (equal when unset).
    """

    def __init__(self, teachers=None, student_arch="standard", spec=None,
                 train_spec=None, seed=0):
        self.teachers = teachers
        self.student_arch = student_arch
        self.spec = spec
        self.train_spec = train_spec
        self.seed = seed

    def fit(self, x, y):
        teachers = self.teachers
        if teachers is None:
            task = "classification" if np.asarray(y).dtype.kind in "iub" else "regression"
            teachers = default_tree_teachers(task, seed=self.seed)
        if not teachers:
            raise ValueError("need at least one teacher")
        task = _task_of(teachers[0])
        x, y = check_xy(x, y, task)
        self.teachers_ = [_ensure_fitted(t, x, y) for t in teachers]
        self.task_ = task
        spec = self.spec if self.spec is not None else DistillSpec()
        classes = np.unique(y) if task == "classification" else None
        outputs = [_teacher_outputs(t, x, task, classes) for t in self.teachers_]
        variance = None
        if spec.lambda_ > 0:
            variance = teacher_variance(self.teachers_, x)
        self.student_ = _fit_mlp_student(
            x, y, task, outputs, spec.teacher_weights, spec, self.student_arch,
            self.train_spec, self.seed, variance,
        )
        return self


class ProgressiveDistiller(_StudentMixin, BaseEstimator):
    """Staged distillation through a sequence of shrinking architectures.

    Stage 1 distills the tree teachers into the first architecture; every
    later stage distills from the previous student (weight 0.5) together
    with the tree teachers (weight 0.5 split equally) into the next one.
    Predictions come from the final stage; all stage models are kept in
    ``stages_``.
    """

    def __init__(self, teachers=None, stage_archs=("deep", "standard", "compact"),
                 spec=None, train_spec=None, seed=0):
        self.teachers = teachers
        self.stage_archs = stage_archs
        self.spec = spec
        self.train_spec = train_spec
        self.seed = seed

    def fit(self, x, y):
        teachers = self.teachers
        if teachers is None:
            task = "classification" if np.asarray(y).dtype.kind in "iub" else "regression"
            teachers = default_tree_teachers(task, seed=self.seed)
        if not teachers:
            raise ValueError("need at least one tree teacher")
        if not self.stage_archs:
            raise ValueError("need at least one stage architecture")
        task = _task_of(teachers[0])
        x, y = check_xy(x, y, task)
        self.teachers_ = [_ensure_fitted(t, x, y) for t in teachers]
        self.task_ = task
        spec = self.spec if self.spec is not None else DistillSpec()
        classes = np.unique(y) if task == "classification" else None
        tree_outputs = [_teacher_outputs(t, x, task, classes) for t in self.teachers_]
        variance = None
        if spec.lambda_ > 0:
            variance = teacher_variance(self.teachers_, x)

        m = len(tree_outputs)
        self.stages_ = []
        previous = None
        for k, arch in enumerate(self.stage_archs):
            if previous is None:
                outputs = tree_outputs
                weights = spec.teacher_weights
            else:
                outputs = [_teacher_outputs(previous, x, task, classes)] + tree_outputs
                weights = np.concatenate([[0.5], np.full(m, 0.5 / m)])
            student = _fit_mlp_student(
                x, y, task, outputs, weights, spec, arch,
                self.train_spec, self.seed + k, variance,
            )
            self.stages_.append(student)
            previous = student
        self.student_ = self.stages_[-1]
        return self


class NeuralToTreeDistiller(BaseEstimator):
    """Distill a fitted MLP teacher into a forest student.

    Training rows are optionally augmented with Gaussian-jittered copies
    (noise applied in the standardized feature space). For classification,
    the label blend beta * teacher + (1 - beta) * true is realized by
    sample duplication: originals enter once with the teacher's argmax
    label (weight beta) and once with the true label (weight 1 - beta);
    augmented copies carry teacher labels only. Regression blends targets
    directly. Zero-weight duplicates are pruned, so beta = 0 with no
    augmentation reproduces the baseline forest bit for bit.
    """

    def __init__(self, teacher, student=None, spec=None, seed=0):
        self.teacher = teacher
        self.student = student
        self.spec = spec
        self.seed = seed

    def fit(self, x, y):
        task = _task_of(self.teacher)
        x, y = check_xy(x, y, task)
        self.teacher_ = _ensure_fitted(self.teacher, x, y)
        self.task_ = task
        spec = self.spec if self.spec is not None else DistillSpec()
        student = self.student
        if student is None:
            student = (
                ForestClassifier(n_estimators=200, seed=self.seed)
                if task == "classification"
                else ForestRegressor(n_estimators=200, seed=self.seed)
            )
        else:
            student = clone(student)

        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))
        augmented = [
            x + rng.normal(0.0, spec.aug_sigma, size=x.shape)
            for _ in range(spec.aug_copies)
        ]

        if task == "classification":
            teacher_labels = self.teacher_.predict(x)
            parts_x, parts_y, parts_w = [], [], []
            if spec.beta < 1.0:
                parts_x.append(x)
                parts_y.append(y)
                parts_w.append(np.full(x.shape[0], 1.0 - spec.beta))
            if spec.beta > 0.0:
                parts_x.append(x)
                parts_y.append(teacher_labels)
                parts_w.append(np.full(x.shape[0], spec.beta))
                for xa in augmented:
                    parts_x.append(xa)
                    parts_y.append(self.teacher_.predict(xa))
                    parts_w.append(np.full(x.shape[0], spec.beta))
            x_fit = np.vstack(parts_x)
            y_fit = np.concatenate(parts_y)
            w_fit = np.concatenate(parts_w)
            if spec.beta == 0.0 and not augmented:
                self.student_ = student.fit(x, y)
            else:
                self.student_ = student.fit(x_fit, y_fit, sample_weight=w_fit)
        else:
            t = self.teacher_.predict(x)
            blended = spec.beta * t + (1.0 - spec.beta) * y
            parts_x = [x]
            parts_y = [blended]
            for xa in augmented:
                parts_x.append(xa)
                parts_y.append(self.teacher_.predict(xa))
            self.student_ = student.fit(np.vstack(parts_x), np.concatenate(parts_y))
        return self

    def predict(self, x):
        check_is_fitted(self, "student_")
        return self.student_.predict(x)

    def predict_proba(self, x):
        check_is_fitted(self, "student_")
        return self.student_.predict_proba(x)

    def member_signals(self, x):
        check_is_fitted(self, "student_")
        return self.student_.member_signals(x)

    @property
    def feature_importances_(self):
        check_is_fitted(self, "student_")
        return self.student_.feature_importances_
