"""Command-line interface.

    xdistill datasets generate --name imbalanced --seed 7 --out data/imbalanced.csv
    xdistill run --config configs/default.json --out results
    xdistill report --results results/results.csv --out results
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .datasets import GENERATORS, save_csv
from .harness import (
    ConfigError,
    ExperimentConfig,
    load_aux_csv,
    load_results_csv,
    run_experiments,
    summarize,
    write_results,
)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="xdistill",
        description="Tree-ensemble <-> neural-network distillation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    datasets = sub.add_parser("datasets", help="dataset utilities")
    datasets_sub = datasets.add_subparsers(dest="datasets_command", required=True)
    generate = datasets_sub.add_parser(
        "generate", help="write a synthetic dataset to CSV"
    )
    generate.add_argument("--name", required=True, choices=sorted(GENERATORS),
                          help="generator name")
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--out", required=True, help="output CSV path")

    run = sub.add_parser("run", help="execute an experiment matrix")
    run.add_argument("--config", required=True, help="experiment config JSON")
    run.add_argument("--out", default=None,
                     help="output directory (defaults to the config's output_dir)")

    report = sub.add_parser("report", help="regenerate reports from results.csv")
    report.add_argument("--results", required=True, help="path to results.csv")
    report.add_argument("--out", required=True, help="report output directory")
    return parser


def _cmd_generate(args):
    dataset = GENERATORS[args.name](args.seed)
    path = save_csv(dataset, args.out)
    print(f"wrote {dataset.n_samples} x {dataset.n_features} rows to {path}")
    return 0


def _cmd_run(args):
    config = ExperimentConfig.load(args.config)
    output_dir = args.out if args.out is not None else config.output_dir
    results, importances, stages = run_experiments(config)
    results_path = write_results(results, importances, stages, output_dir)
    summarize(results, output_dir, importances, stages)
    n_ok = sum(1 for r in results if r.status == "ok")
    n_skip = sum(1 for r in results if r.status == "skipped")
    n_fail = sum(1 for r in results if r.status == "failed")
    print(f"{len(results)} cells: {n_ok} ok, {n_skip} skipped, {n_fail} failed")
    print(f"results: {results_path}")
    return 0


def _cmd_report(args):
    results_path = Path(args.results)
    if not results_path.exists():
        raise ConfigError(f"results file not found: {results_path}")
    rows = load_results_csv(results_path)
    importance_path = results_path.parent / "feature_importances.csv"
    stages_path = results_path.parent / "progressive_stages.csv"
    importances = load_aux_csv(importance_path) if importance_path.exists() else None
    stages = load_aux_csv(stages_path) if stages_path.exists() else None
    written = summarize(rows, args.out, importances, stages)
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "datasets":
            return _cmd_generate(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_report(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
