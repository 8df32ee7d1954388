"""Experiment matrix runner and report generator."""
from .config import (
    ConfigError,
    DatasetRef,
    ExperimentConfig,
    MethodSpec,
    category_of,
    default_config,
    default_datasets,
    default_methods,
)
from .report import load_aux_csv, load_results_csv, summarize
from .runner import (
    ExperimentResult,
    resolve_dataset,
    run_cell,
    run_experiments,
    write_results,
)

__all__ = [
    "ConfigError",
    "DatasetRef",
    "ExperimentConfig",
    "ExperimentResult",
    "MethodSpec",
    "category_of",
    "default_config",
    "default_datasets",
    "default_methods",
    "load_aux_csv",
    "load_results_csv",
    "resolve_dataset",
    "run_cell",
    "run_experiments",
    "summarize",
    "write_results",
]
