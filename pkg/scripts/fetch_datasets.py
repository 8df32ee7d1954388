#!/usr/bin/env python3
"""Materialize the benchmark datasets as CSV files under data/.

Breast cancer, wine and digits ship inside scikit-learn and export
offline; California housing is downloaded on first use (network needed).
The engine itself only reads the CSVs, so scikit-learn is a dependency
of this script alone.

Usage: python3 scripts/fetch_datasets.py [--out data/]
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path


def write_csv(path, feature_names, x, y, label_formatter):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + ["target"])
        for row, label in zip(x, y):
            writer.writerow([repr(float(v)) for v in row] + [label_formatter(label)])
    print(f"wrote {path} ({x.shape[0]} rows, {x.shape[1]} features)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data", help="output directory")
    args = parser.parse_args()
    out = Path(args.out)

    from sklearn.datasets import load_breast_cancer, load_digits, load_wine

    as_int = lambda v: str(int(v))
    as_float = lambda v: repr(float(v))

    bundle = load_breast_cancer()
    write_csv(out / "breast_cancer.csv", bundle.feature_names, bundle.data,
              bundle.target, as_int)

    bundle = load_wine()
    write_csv(out / "wine.csv", bundle.feature_names, bundle.data,
              bundle.target, as_int)

    bundle = load_digits()
    names = [f"pixel_{i // 8}_{i % 8}" for i in range(64)]
    write_csv(out / "digits.csv", names, bundle.data, bundle.target, as_int)

    try:
        from sklearn.datasets import fetch_california_housing

        bundle = fetch_california_housing()
        write_csv(out / "california_housing.csv", bundle.feature_names,
                  bundle.data, bundle.target, as_float)
    except Exception as exc:
        print(
            "could not fetch california_housing (network required): "
            f"{type(exc).__name__}: {exc}",
            file=sys.stderr,
        )
        print(
            "re-run this script on a machine with internet access to "
            "materialize data/california_housing.csv",
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
