"""Experiment matrix execution and result persistence."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..datasets import GENERATORS, SplitSpec, load_csv, split_and_standardize
from ..metrics import MetricReport, classification_metrics, regression_metrics, time_inference
from ..validation import check_probabilities
from .config import ConfigError
from .methods import build_estimator, evaluate_model, stable_cell_seed

RESULT_COLUMNS = (
    "method",
    "category",
    "dataset",
    "seed",
    "task",
    "accuracy",
    "f1_macro",
    "auc",
    "rmse",
    "r2",
    "mae",
    "train_seconds",
    "inference_seconds",
    "mean_uncertainty",
    "status",
    "note",
)

IMPORTANCE_COLUMNS = ("method", "dataset", "seed", "rank", "feature", "importance")
STAGE_COLUMNS = ("method", "dataset", "seed", "stage", "arch", "metric", "value")


@dataclass
class ExperimentResult:
    method: str
    category: str
    dataset: str
    seed: int
    task: str
    report: MetricReport | None
    train_seconds: float | None = None
    status: str = "ok"
    note: str = ""

    def row(self):
        r = self.report
        return {
            "method": self.method,
            "category": self.category,
            "dataset": self.dataset,
            "seed": self.seed,
            "task": self.task,
            "accuracy": _fmt(r.accuracy if r else None),
            "f1_macro": _fmt(r.f1_macro if r else None),
            "auc": _fmt(r.auc if r else None),
            "rmse": _fmt(r.rmse if r else None),
            "r2": _fmt(r.r2 if r else None),
            "mae": _fmt(r.mae if r else None),
            "train_seconds": _fmt(self.train_seconds),
            "inference_seconds": _fmt(r.inference_seconds if r else None),
            "mean_uncertainty": _fmt(r.mean_uncertainty if r else None),
            "status": self.status,
            "note": self.note,
        }


def _fmt(value):
    return "" if value is None else repr(float(value))


def resolve_dataset(ref):
    """Materialize a DatasetRef; raises ConfigError when unresolvable."""
    if ref.generator is not None:
        dataset = GENERATORS[ref.generator](ref.seed)
    else:
        path = Path(ref.path)
        if not path.exists():
            raise ConfigError(
                f"dataset {ref.name!r}: file not found: {path} "
                "(run scripts/fetch_datasets.py to materialize the CSVs)"
            )
        dataset = load_csv(path, ref.task, ref.label_column)
    if ref.name != dataset.name:
        dataset = dataset.subset(np.arange(dataset.n_samples), name=ref.name)
    if ref.max_rows is not None and dataset.n_samples > ref.max_rows:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(ref.seed)))
        rows = np.sort(rng.permutation(dataset.n_samples)[: ref.max_rows])
        dataset = dataset.subset(rows)
    return dataset


def run_cell(method, dataset, seed, split, mc_passes=30, timing_repeats=5):
    """Execute one (method, dataset, seed) cell; never raises on model errors."""
    task = dataset.task
    if not method.supports(task):
        return ExperimentResult(
            method.id, method.category, dataset.name, seed, task,
            report=None, status="skipped", note=f"method not defined for {task}",
        ), None, None
    try:
        cell_split = SplitSpec(
            test_fraction=split.test_fraction,
            seed=seed,
            stratified=split.stratified and task == "classification",
        )
        train, test, _ = split_and_standardize(dataset, cell_split)
        model = build_estimator(method, task, seed)
        started = time.perf_counter()
        model.fit(train.x, train.y)
        train_seconds = time.perf_counter() - started

        mc_seed = stable_cell_seed(method.id, dataset.name, seed)
        out, variance, timed_predict = evaluate_model(model, test.x, mc_passes, mc_seed)
        if task == "classification":
            report = classification_metrics(check_probabilities(out), test.y)
        else:
            report = regression_metrics(out, test.y)
        report.mean_uncertainty = float(np.mean(variance))
        report.inference_seconds = time_inference(timed_predict, test.x, timing_repeats)

        result = ExperimentResult(
            method.id, method.category, dataset.name, seed, task,
            report=report, train_seconds=train_seconds,
        )
        importances = _importance_rows(method, model, dataset, seed)
        stages = _stage_rows(method, model, dataset, seed, test)
        return result, importances, stages
    except Exception as exc:  # per-cell isolation: record, do not abort
        note = f"{type(exc).__name__}: {exc}"
        return ExperimentResult(
            method.id, method.category, dataset.name, seed, task,
            report=None, status="failed", note=note,
        ), None, None


def _importance_rows(method, model, dataset, seed):
    if method.kind != "tree_baseline":
        return None
    order = np.argsort(-model.feature_importances_)[:5]
    return [
        {
            "method": method.id,
            "dataset": dataset.name,
            "seed": seed,
            "rank": rank + 1,
            "feature": dataset.feature_names[j],
            "importance": repr(float(model.feature_importances_[j])),
        }
        for rank, j in enumerate(order)
    ]


def _stage_rows(method, model, dataset, seed, test):
    if method.kind != "progressive":
        return None
    rows = []
    for stage_idx, student in enumerate(model.stages_, start=1):
        arch = model.stage_archs[stage_idx - 1]
        if test.task == "classification":
            report = classification_metrics(student.predict_proba(test.x), test.y)
            metrics = {"accuracy": report.accuracy, "f1_macro": report.f1_macro,
                       "auc": report.auc}
        else:
            report = regression_metrics(student.predict(test.x), test.y)
            metrics = {"rmse": report.rmse, "r2": report.r2, "mae": report.mae}
        for name, value in metrics.items():
            if value is None:
                continue
            rows.append({
                "method": method.id, "dataset": dataset.name, "seed": seed,
                "stage": stage_idx, "arch": arch, "metric": name,
                "value": repr(float(value)),
            })
    return rows


def run_experiments(config):
    """Run every (method, dataset, seed) cell of the config.

    Datasets are resolved up front (an unresolvable dataset is a config
    error); individual cell failures are recorded without aborting.
    Returns (results, importance_rows, stage_rows).
    """
    datasets = [resolve_dataset(ref) for ref in config.datasets]
    results = []
    importance_rows = []
    stage_rows = []
    for dataset in datasets:
        for method in config.methods:
            for seed in config.seeds:
                result, importances, stages = run_cell(
                    method, dataset, seed, config.split,
                    mc_passes=config.mc_passes,
                    timing_repeats=config.timing_repeats,
                )
                results.append(result)
                if importances:
                    importance_rows.extend(importances)
                if stages:
                    stage_rows.extend(stages)
    results.sort(key=lambda r: (r.dataset, r.method, r.seed))
    importance_rows.sort(key=lambda r: (r["dataset"], r["method"], r["seed"], r["rank"]))
    stage_rows.sort(key=lambda r: (r["dataset"], r["method"], r["seed"], r["stage"], r["metric"]))
    return results, importance_rows, stage_rows


def write_results(results, importance_rows, stage_rows, output_dir):
    """Write results.csv (+ feature_importances.csv, progressive_stages.csv)."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    results_path = output_dir / "results.csv"
    with open(results_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        for result in results:
            writer.writerow(result.row())
    if importance_rows:
        with open(output_dir / "feature_importances.csv", "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=IMPORTANCE_COLUMNS)
            writer.writeheader()
            writer.writerows(importance_rows)
    if stage_rows:
        with open(output_dir / "progressive_stages.csv", "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=STAGE_COLUMNS)
            writer.writeheader()
            writer.writerows(stage_rows)
    return results_path
