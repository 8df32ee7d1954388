"""Report generation: summary, ranking, timing and importance tables.

All outputs are pure functions of the input rows (no timestamps), so
re-running on the same results is byte-identical.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .runner import ExperimentResult

_METRIC_FIELDS = (
    "accuracy", "f1_macro", "auc", "rmse", "r2", "mae",
    "train_seconds", "inference_seconds", "mean_uncertainty",
)


def load_results_csv(path):
    """Read a results.csv back into row dicts with parsed numbers."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for raw in csv.DictReader(fh):
            row = dict(raw)
            row["seed"] = int(row["seed"])
            for key in _METRIC_FIELDS:
                row[key] = float(row[key]) if row[key] else None
            rows.append(row)
    return rows


def load_aux_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return [dict(r) for r in csv.DictReader(fh)]


def _as_rows(results):
    rows = []
    for r in results:
        if isinstance(r, ExperimentResult):
            row = r.row()
            row["seed"] = int(row["seed"])
            for key in _METRIC_FIELDS:
                row[key] = float(row[key]) if row[key] else None
            rows.append(row)
        else:
            rows.append(r)
    return rows


def _mean_std(values):
    values = [v for v in values if v is not None]
    if not values:
        return None, None
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def _fmt(value, digits=4):
    return "" if value is None else f"{value:.{digits}f}"


def _write_csv(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    return path


def _write_md(path, title, header, rows):
    lines = [f"# {title}", ""]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join("---" for _ in header) + "|")
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")
    return path


def _method_order(rows):
    seen = []
    for row in rows:
        if row["method"] not in seen:
            seen.append(row["method"])
    return seen


def method_summary(rows):
    """Per-method mean/std of the primary metrics, split by task."""
    ok = [r for r in rows if r["status"] == "ok"]
    out = []
    for method in _method_order(rows):
        mine = [r for r in ok if r["method"] == method]
        if not mine:
            continue
        category = mine[0]["category"]
        cls = [r for r in mine if r["task"] == "classification"]
        reg = [r for r in mine if r["task"] == "regression"]
        acc_mean, acc_std = _mean_std([r["accuracy"] for r in cls])
        r2_mean, r2_std = _mean_std([r["r2"] for r in reg])
        out.append({
            "method": method,
            "category": category,
            "n_classification": len(cls),
            "accuracy_mean": acc_mean,
            "accuracy_std": acc_std,
            "n_regression": len(reg),
            "r2_mean": r2_mean,
            "r2_std": r2_std,
        })
    out.sort(key=lambda r: (-(r["accuracy_mean"] if r["accuracy_mean"] is not None else -np.inf),
                            r["method"]))
    return out


def task_summary(rows, task):
    """Detailed per-method aggregates for one task."""
    metrics = (
        ("accuracy", "f1_macro", "auc", "mean_uncertainty", "inference_seconds")
        if task == "classification"
        else ("rmse", "r2", "mae", "mean_uncertainty", "inference_seconds")
    )
    ok = [r for r in rows if r["status"] == "ok" and r["task"] == task]
    out = []
    for method in _method_order(rows):
        mine = [r for r in ok if r["method"] == method]
        if not mine:
            continue
        entry = {"method": method, "category": mine[0]["category"], "n": len(mine)}
        for metric in metrics:
            mean, std = _mean_std([r[metric] for r in mine])
            entry[f"{metric}_mean"] = mean
            entry[f"{metric}_std"] = std
        out.append(entry)
    primary = "accuracy_mean" if task == "classification" else "r2_mean"
    out.sort(key=lambda r: (-(r[primary] if r[primary] is not None else -np.inf),
                            r["method"]))
    return out


def top_rows(rows, task, limit=10):
    """Individual (method, dataset) cells ranked by the primary metric."""
    primary = "accuracy" if task == "classification" else "r2"
    ok = [
        r for r in rows
        if r["status"] == "ok" and r["task"] == task and r[primary] is not None
    ]
    ok.sort(key=lambda r: (-r[primary], r["method"], r["dataset"], r["seed"]))
    return ok[:limit]


def category_timing(rows):
    """Mean/std inference seconds per method category."""
    ok = [r for r in rows if r["status"] == "ok" and r["inference_seconds"] is not None]
    out = []
    for category in ("Tree", "Neural", "Cross-Paradigm", "Advanced"):
        mine = [r["inference_seconds"] for r in ok if r["category"] == category]
        if not mine:
            continue
        mean, std = _mean_std(mine)
        out.append({"category": category, "n": len(mine),
                    "inference_mean_seconds": mean, "inference_std_seconds": std})
    return out


def summarize(results, output_dir, importance_rows=None, stage_rows=None):
    """Write all report files for a set of results; returns written paths."""
    rows = _as_rows(results)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []

    summary = method_summary(rows)
    written.append(_write_csv(
        output_dir / "method_summary.csv",
        ("method", "category", "n_classification", "accuracy_mean", "accuracy_std",
         "n_regression", "r2_mean", "r2_std"),
        [{k: ("" if v is None else v) for k, v in r.items()} for r in summary],
    ))
    written.append(_write_md(
        output_dir / "method_summary.md",
        "Method performance summary",
        ("Method", "Class. Acc.", "Std", "Reg. R2", "Category"),
        [
            (r["method"], _fmt(r["accuracy_mean"], 3), _fmt(r["accuracy_std"], 3),
             _fmt(r["r2_mean"], 3), r["category"])
            for r in summary
        ],
    ))

    for task in ("classification", "regression"):
        detail = task_summary(rows, task)
        if not detail:
            continue
        fields = list(detail[0].keys())
        written.append(_write_csv(
            output_dir / f"method_summary_{task}.csv", fields,
            [{k: ("" if v is None else v) for k, v in r.items()} for r in detail],
        ))

    top_cls = top_rows(rows, "classification")
    if top_cls:
        written.append(_write_md(
            output_dir / "top10_classification.md",
            "Top classification cells by accuracy",
            ("Rank", "Method", "Dataset", "Acc.", "F1", "AUC"),
            [
                (i + 1, r["method"], r["dataset"], _fmt(r["accuracy"], 3),
                 _fmt(r["f1_macro"], 3), _fmt(r["auc"], 3))
                for i, r in enumerate(top_cls)
            ],
        ))
    top_reg = top_rows(rows, "regression")
    if top_reg:
        written.append(_write_md(
            output_dir / "top10_regression.md",
            "Top regression cells by R2",
            ("Rank", "Method", "Dataset", "RMSE", "R2", "MAE", "Unc."),
            [
                (i + 1, r["method"], r["dataset"], _fmt(r["rmse"], 3),
                 _fmt(r["r2"], 3), _fmt(r["mae"], 3), _fmt(r["mean_uncertainty"], 3))
                for i, r in enumerate(top_reg)
            ],
        ))

    timing = category_timing(rows)
    if timing:
        written.append(_write_csv(
            output_dir / "category_timing.csv",
            ("category", "n", "inference_mean_seconds", "inference_std_seconds"),
            timing,
        ))
        written.append(_write_md(
            output_dir / "category_timing.md",
            "Inference time by model category",
            ("Model Category", "Mean Time (s)", "Std Dev"),
            [
                (r["category"], _fmt(r["inference_mean_seconds"]),
                 _fmt(r["inference_std_seconds"]))
                for r in timing
            ],
        ))

    if importance_rows:
        lines = ["# Feature importance (tree baselines, top 5 per dataset)", ""]
        datasets = sorted({r["dataset"] for r in importance_rows})
        for dataset in datasets:
            lines.append(f"## {dataset}")
            lines.append("")
            lines.append("| Method | Rank | Feature | Importance |")
            lines.append("|---|---|---|---|")
            mine = [r for r in importance_rows if r["dataset"] == dataset]
            mine.sort(key=lambda r: (r["method"], int(r["seed"]), int(r["rank"])))
            for r in mine:
                imp = float(r["importance"])
                lines.append(
                    f"| {r['method']} | {r['rank']} | {r['feature']} | {imp:.4f} |"
                )
            lines.append("")
        path = output_dir / "feature_importance.md"
        path.write_text("\n".join(lines), encoding="utf-8")
        written.append(path)

    if stage_rows:
        lines = ["# Progressive distillation stages", ""]
        lines.append("| Dataset | Seed | Stage | Arch | Metric | Value |")
        lines.append("|---|---|---|---|---|---|")
        for r in stage_rows:
            value = float(r["value"])
            lines.append(
                f"| {r['dataset']} | {r['seed']} | {r['stage']} | {r['arch']} "
                f"| {r['metric']} | {value:.4f} |"
            )
        lines.append("")
        path = output_dir / "progressive_stages.md"
        path.write_text("\n".join(lines), encoding="utf-8")
        written.append(path)

    return written
