"""Experiment configuration: JSON schema and the default 24-method matrix."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..datasets import GENERATORS, SplitSpec
from ..distill.spec import DistillSpec
from ..neural.training import TrainSpec

TREE_BASELINE_MODELS = (
    "random_forest",
    "extra_trees",
    "gradient_boosting",
    "newton_boosting",
    "histogram_boosting",
)
NN_ARCHS = ("standard", "deep", "wide", "compact", "residual")

METHOD_KINDS = (
    "tree_baseline",
    "nn_baseline",
    "rf_to_nn",
    "nn_to_rf",
    "multi_teacher",
    "progressive",
    "rf_to_nn_uncertainty",
    "multi_teacher_uncertainty",
)

CATEGORIES = {
    "tree_baseline": "Tree",
    "nn_baseline": "Neural",
    "rf_to_nn": "Cross-Paradigm",
    "nn_to_rf": "Cross-Paradigm",
    "multi_teacher": "Advanced",
    "progressive": "Advanced",
    "rf_to_nn_uncertainty": "Advanced",
    "multi_teacher_uncertainty": "Advanced",
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def category_of(kind):
    try:
        return CATEGORIES[kind]
    except KeyError:
        raise ConfigError(f"unknown method kind {kind!r}") from None


@dataclass(frozen=True)
class DatasetRef:
    """One dataset source: a CSV path or a built-in generator name."""

    name: str
    path: str | None = None
    generator: str | None = None
    task: str | None = None
    label_column: str = "target"
    seed: int = 0
    max_rows: int | None = None

    def __post_init__(self):
        if (self.path is None) == (self.generator is None):
            raise ConfigError(
                f"dataset {self.name!r} must set exactly one of path/generator"
            )
        if self.generator is not None and self.generator not in GENERATORS:
            raise ConfigError(
                f"dataset {self.name!r}: unknown generator {self.generator!r}"
            )
        if self.path is not None and self.task not in ("classification", "regression"):
            raise ConfigError(f"dataset {self.name!r}: csv datasets need a task")
        if self.max_rows is not None and self.max_rows < 10:
            raise ConfigError(f"dataset {self.name!r}: max_rows too small")

    def to_json(self):
        out = {"name": self.name, "seed": self.seed}
        if self.path is not None:
            out.update(path=self.path, task=self.task, label_column=self.label_column)
        else:
            out["generator"] = self.generator
        if self.max_rows is not None:
            out["max_rows"] = self.max_rows
        return out


@dataclass(frozen=True)
class MethodSpec:
    """One experiment method: a baseline or a distillation pipeline."""

    id: str
    kind: str
    model: str | None = None
    arch: str | None = None
    distill: DistillSpec = field(default_factory=DistillSpec)
    train: TrainSpec = field(default_factory=TrainSpec)
    tasks: tuple | None = None

    def __post_init__(self):
        if self.kind not in METHOD_KINDS:
            raise ConfigError(f"method {self.id!r}: unknown kind {self.kind!r}")
        if self.kind == "tree_baseline" and self.model not in TREE_BASELINE_MODELS:
            raise ConfigError(
                f"method {self.id!r}: tree_baseline needs model in {TREE_BASELINE_MODELS}"
            )
        if self.kind in ("nn_baseline", "rf_to_nn", "nn_to_rf", "rf_to_nn_uncertainty"):
            if self.arch not in NN_ARCHS:
                raise ConfigError(f"method {self.id!r}: needs arch in {NN_ARCHS}")
        if self.tasks is not None:
            bad = set(self.tasks) - {"classification", "regression"}
            if bad:
                raise ConfigError(f"method {self.id!r}: unknown tasks {bad}")

    @property
    def category(self):
        return category_of(self.kind)

    def supports(self, task):
        return self.tasks is None or task in self.tasks

    def to_json(self):
        out = {"id": self.id, "kind": self.kind}
        if self.model is not None:
            out["model"] = self.model
        if self.arch is not None:
            out["arch"] = self.arch
        out["distill"] = self.distill.to_json()
        out["train"] = {
            "learning_rate": self.train.learning_rate,
            "batch_size": self.train.batch_size,
            "max_epochs": self.train.max_epochs,
            "early_stop_patience": self.train.early_stop_patience,
            "val_fraction": self.train.val_fraction,
            "seed": self.train.seed,
        }
        if self.tasks is not None:
            out["tasks"] = list(self.tasks)
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple
    methods: tuple
    split: SplitSpec = field(default_factory=lambda: SplitSpec(0.25, 0, True))
    seeds: tuple = (42,)
    output_dir: str = "results"
    mc_passes: int = 30
    timing_repeats: int = 5

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("config needs at least one dataset")
        if not self.methods:
            raise ConfigError("config needs at least one method")
        if not self.seeds:
            raise ConfigError("config needs at least one seed")
        ids = [m.id for m in self.methods]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate method ids")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate dataset names")
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def to_json(self):
        return {
            "datasets": [d.to_json() for d in self.datasets],
            "methods": [m.to_json() for m in self.methods],
            "split": {
                "test_fraction": self.split.test_fraction,
                "stratified": self.split.stratified,
            },
            "seeds": list(self.seeds),
            "output_dir": self.output_dir,
            "mc_passes": self.mc_passes,
            "timing_repeats": self.timing_repeats,
        }

    @classmethod
    def from_json(cls, data):
        try:
            datasets = tuple(DatasetRef(**d) for d in data["datasets"])
            methods = []
            for m in data["methods"]:
                m = dict(m)
                distill = DistillSpec.from_json(m.pop("distill", {}))
                train = TrainSpec(**m.pop("train", {}))
                tasks = m.pop("tasks", None)
                methods.append(
                    MethodSpec(
                        distill=distill,
                        train=train,
                        tasks=tuple(tasks) if tasks else None,
                        **m,
                    )
                )
            split_data = data.get("split", {})
            split = SplitSpec(
                test_fraction=split_data.get("test_fraction", 0.25),
                seed=split_data.get("seed", 0),
                stratified=split_data.get("stratified", True),
            )
            return cls(
                datasets=datasets,
                methods=tuple(methods),
                split=split,
                seeds=tuple(data.get("seeds", (42,))),
                output_dir=data.get("output_dir", "results"),
                mc_passes=data.get("mc_passes", 30),
                timing_repeats=data.get("timing_repeats", 5),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc

    @classmethod
    def load(cls, path):
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_json(data)

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")
        return path


def default_methods(matrix_train=None):
    """The 24 default method combinations.

    5 tree baselines, 5 neural baselines, 5 tree-to-neural students (one
    per architecture), 5 neural-to-tree students (one per teacher
    architecture), multi-teacher, progressive, and the two
    uncertainty-aware variants.
    """
    train = matrix_train if matrix_train is not None else TrainSpec(
        batch_size=64, max_epochs=80, early_stop_patience=10
    )
    plain = DistillSpec(lambda_=0.0)
    uncertain = DistillSpec(lambda_=0.1)
    methods = [
        MethodSpec(id=model, kind="tree_baseline", model=model, train=train)
        for model in TREE_BASELINE_MODELS
    ]
    methods += [
        MethodSpec(id=f"nn_{arch}", kind="nn_baseline", arch=arch, train=train)
        for arch in NN_ARCHS
    ]
    methods += [
        MethodSpec(id=f"rf_to_nn_{arch}", kind="rf_to_nn", arch=arch,
                   distill=plain, train=train)
        for arch in NN_ARCHS
    ]
    methods += [
        MethodSpec(id=f"nn_to_rf_{arch}", kind="nn_to_rf", arch=arch,
                   distill=plain, train=train)
        for arch in NN_ARCHS
    ]
    methods += [
        MethodSpec(id="multi_teacher", kind="multi_teacher", distill=plain, train=train),
        MethodSpec(id="progressive", kind="progressive", distill=plain, train=train),
        MethodSpec(id="rf_to_nn_uncertainty", kind="rf_to_nn_uncertainty",
                   arch="compact", distill=uncertain, train=train),
        MethodSpec(id="multi_teacher_uncertainty", kind="multi_teacher_uncertainty",
                   distill=uncertain, train=train),
    ]
    return methods


def default_datasets(data_dir="data"):
    data_dir = Path(data_dir)
    csv = lambda stem, task: DatasetRef(
        name=stem, path=str(data_dir / f"{stem}.csv"), task=task
    )
    return (
        csv("breast_cancer", "classification"),
        csv("wine", "classification"),
        csv("digits", "classification"),
        DatasetRef(name="imbalanced", generator="imbalanced", seed=7),
        DatasetRef(
            name="california_housing",
            path=str(data_dir / "california_housing.csv"),
            task="regression",
            max_rows=6000,
        ),
        DatasetRef(name="nonlinear", generator="nonlinear", seed=11),
    )


def default_config(data_dir="data", output_dir="results"):
    """The full evaluation matrix: 24 methods x 6 datasets x 1 seed."""
    return ExperimentConfig(
        datasets=default_datasets(data_dir),
        methods=tuple(default_methods()),
        split=SplitSpec(test_fraction=0.25, seed=0, stratified=True),
        seeds=(42,),
        output_dir=output_dir,
    )
