"""Dataset ingestion, synthetic generators, splitting and standardization."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .base import BaseEstimator, check_is_fitted

CLASSIFICATION = "classification"
REGRESSION = "regression"


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix + targets.

    For classification, ``y`` holds class indices ``0..n_classes-1``;
    for regression it holds real targets and ``n_classes`` is 0.
    """

    name: str
    task: str
    x: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    n_classes: int = 0

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64, order="C")
        if x.ndim != 2:
            raise ValueError("x must be 2-dimensional")
        if not np.all(np.isfinite(x)):
            raise ValueError(f"dataset {self.name!r}: x contains NaN or Inf")
        if self.task not in (CLASSIFICATION, REGRESSION):
            raise ValueError(f"unknown task {self.task!r}")
        if self.task == CLASSIFICATION:
            y = np.array(self.y, dtype=np.int64)
            if self.n_classes < 1:
                raise ValueError("classification dataset needs n_classes >= 1")
            if y.size and (y.min() < 0 or y.max() >= self.n_classes):
                raise ValueError("labels out of range [0, n_classes)")
        else:
            y = np.array(self.y, dtype=np.float64)
            if not np.all(np.isfinite(y)):
                raise ValueError(f"dataset {self.name!r}: y contains NaN or Inf")
            if self.n_classes != 0:
                raise ValueError("regression dataset must have n_classes == 0")
        if y.shape[0] != x.shape[0]:
            raise ValueError("x and y row counts differ")
        if len(self.feature_names) != x.shape[1]:
            raise ValueError("feature_names length must match feature count")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n_samples(self):
        return self.x.shape[0]

    @property
    def n_features(self):
        return self.x.shape[1]

    def subset(self, rows, name=None):
        rows = np.asarray(rows)
        return Dataset(
            name=name or self.name,
            task=self.task,
            x=self.x[rows],
            y=self.y[rows],
            feature_names=list(self.feature_names),
            n_classes=self.n_classes,
        )

    def replace_x(self, x):
        return Dataset(
            name=self.name,
            task=self.task,
            x=x,
            y=self.y,
            feature_names=list(self.feature_names),
            n_classes=self.n_classes,
        )


@dataclass(frozen=True)
class SplitSpec:
    """Held-out split parameters."""

    test_fraction: float = 0.25
    seed: int = 0
    stratified: bool = False

    def __post_init__(self):
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError("test_fraction must lie in (0, 1)")


class Standardizer(BaseEstimator):
    """Per-column (x - mean) / std transform; constant columns get std 1."""

    def fit(self, x, y=None):
        x = np.asarray(x, dtype=np.float64)
        self.means_ = x.mean(axis=0)
        stds = x.std(axis=0)
        stds[stds == 0.0] = 1.0
        self.stds_ = stds
        return self

    def transform(self, x):
        check_is_fitted(self, "means_")
        x = np.asarray(x, dtype=np.float64)
        return (x - self.means_) / self.stds_

    def fit_transform(self, x, y=None):
        return self.fit(x).transform(x)

    def inverse_transform(self, x):
        check_is_fitted(self, "means_")
        return np.asarray(x, dtype=np.float64) * self.stds_ + self.means_


def load_csv(path, task, label_column):
    """Load a header-ed CSV into a Dataset.

    Classification labels are re-encoded to 0..K-1 in lexicographic order
    of their raw string values.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ValueError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        rows = []
        labels = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            feats = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    labels.append(cell.strip())
                    continue
                try:
                    feats.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: non-numeric value {cell.strip()!r} "
                        f"in column {header[i]!r}"
                    ) from None
            rows.append(feats)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    x = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{path}: features contain NaN or Inf")
    if task == CLASSIFICATION:
        classes = sorted(set(labels))
        mapping = {c: i for i, c in enumerate(classes)}
        y = np.array([mapping[c] for c in labels], dtype=np.int64)
        n_classes = len(classes)
    elif task == REGRESSION:
        try:
            y = np.array([float(v) for v in labels], dtype=np.float64)
        except ValueError:
            raise ValueError(f"{path}: non-numeric regression target") from None
        n_classes = 0
    else:
        raise ValueError(f"unknown task {task!r}")
    return Dataset(path.stem, task, x, y, feature_names, n_classes)


def save_csv(dataset, path, label_column="target"):
    """Write a Dataset in the same CSV format load_csv reads."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + [label_column])
        for i in range(dataset.n_samples):
            row = [repr(float(v)) for v in dataset.x[i]]
            if dataset.task == CLASSIFICATION:
                row.append(str(int(dataset.y[i])))
            else:
                row.append(repr(float(dataset.y[i])))
            writer.writerow(row)
    return path


IMBALANCED_COUNTS = (1050, 300, 150)
IMBALANCED_INFORMATIVE = 10
IMBALANCED_FEATURES = 20


def generate_imbalanced(seed):
    """3-class imbalanced synthetic set: 1500 x 20, class sizes 1050/300/150.

    Features 0-9 are informative (class-conditional Gaussians whose means are
    drawn once per class and dimension from N(0, 2^2), unit variance);
    features 10-19 are pure N(0, 1) noise.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    n_classes = len(IMBALANCED_COUNTS)
    centers = rng.normal(0.0, 2.0, size=(n_classes, IMBALANCED_INFORMATIVE))
    y = np.repeat(np.arange(n_classes), IMBALANCED_COUNTS)
    n = y.size
    x = rng.normal(0.0, 1.0, size=(n, IMBALANCED_FEATURES))
    x[:, :IMBALANCED_INFORMATIVE] += centers[y]
    order = rng.permutation(n)
    names = [f"f{j:02d}" for j in range(IMBALANCED_FEATURES)]
    return Dataset("imbalanced", CLASSIFICATION, x[order], y[order], names, n_classes)


NONLINEAR_N = 1200
NONLINEAR_FEATURES = 8
NONLINEAR_NOISE_STD = 0.9


def nonlinear_signal(x):
    """Noise-free target of the nonlinear regression generator.

    Uses the first five columns; the remaining columns are distractors.
    """
    x = np.asarray(x, dtype=np.float64)
    return (
        3.0 * np.sin(2.0 * x[:, 0])
        + x[:, 1] ** 2
        - 2.0 * x[:, 2] * x[:, 3]
        + np.abs(x[:, 4])
    )


def generate_nonlinear_regression(seed):
    """Nonlinear regression set: 1200 x 8, i.i.d. standard normal features.

    y = 3 sin(2 x0) + x1^2 - 2 x2 x3 + |x4| + eps with eps ~ N(0, 0.9^2);
    columns 5-7 carry no signal.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    x = rng.normal(0.0, 1.0, size=(NONLINEAR_N, NONLINEAR_FEATURES))
    eps = rng.normal(0.0, NONLINEAR_NOISE_STD, size=NONLINEAR_N)
    y = nonlinear_signal(x) + eps
    names = [f"x{j}" for j in range(NONLINEAR_FEATURES)]
    return Dataset("nonlinear", REGRESSION, x, y, names)


GENERATORS = {
    "imbalanced": generate_imbalanced,
    "nonlinear": generate_nonlinear_regression,
}


def _split_indices(dataset, spec):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed)))
    n = dataset.n_samples
    if spec.stratified:
        if dataset.task != CLASSIFICATION:
            raise ValueError("stratified split is only valid for classification")
        test_parts = []
        train_parts = []
        for c in range(dataset.n_classes):
            members = np.flatnonzero(dataset.y == c)
            if members.size and members.size < 2:
                raise ValueError(f"class {c} has fewer than 2 samples; cannot stratify")
            perm = members[rng.permutation(members.size)]
            n_test = int(np.floor(spec.test_fraction * members.size + 0.5))
            n_test = min(n_test, members.size - 1) if members.size else 0
            test_parts.append(perm[:n_test])
            train_parts.append(perm[n_test:])
        test_idx = np.sort(np.concatenate(test_parts))
        train_idx = np.sort(np.concatenate(train_parts))
    else:
        perm = rng.permutation(n)
        n_test = int(np.floor(spec.test_fraction * n + 0.5))
        n_test = max(1, min(n_test, n - 1))
        test_idx = np.sort(perm[:n_test])
        train_idx = np.sort(perm[n_test:])
    return train_idx, test_idx


def split_and_standardize(dataset, spec):
    """Partition rows into train/test and standardize with train statistics.

    Returns (train, test, scaler); the scaler is fitted on training rows only
    and applied to both splits.
    """
    train_idx, test_idx = _split_indices(dataset, spec)
    scaler = Standardizer()
    x_train = scaler.fit_transform(dataset.x[train_idx])
    x_test = scaler.transform(dataset.x[test_idx])
    train = dataset.subset(train_idx).replace_x(x_train)
    test = dataset.subset(test_idx).replace_x(x_test)
    return train, test, scaler
