"""Budgeted online active learning for imbalanced binary streams."""

import json

from ._core import (
    ConfigError,
    DataError,
    Dataset,
    DimensionError,
    Learner,
    ParseError,
    SingularMatrixError,
    compute_rho,
    generate_synthetic,
    make_learner,
    metrics,
    normalize,
    parse_libsvm,
    permute,
    query_probability,
    run_experiment,
)


def snapshot(learner, full=False):
    """Learner state as a dict."""
    return json.loads(learner.snapshot_json(full))


__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "DimensionError",
    "Learner",
    "ParseError",
    "SingularMatrixError",
    "compute_rho",
    "generate_synthetic",
    "make_learner",
    "metrics",
    "normalize",
    "parse_libsvm",
    "permute",
    "query_probability",
    "run_experiment",
    "snapshot",
]
