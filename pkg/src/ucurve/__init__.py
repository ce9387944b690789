"""U-curve feature selection: branch-and-bound search over the Boolean lattice."""

from .baselines import SffsConfig, exhaustive, sffs
from .cost import (
    EvaluationLedger,
    MceModel,
    PenalizedMceCost,
    TrapCost,
    penalized_mce,
    project_dataset,
    synth_u_instance,
)
from .data import Dataset, DataError, load_dataset, preprocess
from .lattice import ConfigurationError, RestrictionSet, format_subset, parse_subset
from .search import SearchConfig, run_ucurve

__all__ = [
    "ConfigurationError",
    "DataError",
    "Dataset",
    "EvaluationLedger",
    "MceModel",
    "PenalizedMceCost",
    "RestrictionSet",
    "SearchConfig",
    "SffsConfig",
    "TrapCost",
    "exhaustive",
    "format_subset",
    "load_dataset",
    "parse_subset",
    "penalized_mce",
    "preprocess",
    "project_dataset",
    "run_ucurve",
    "sffs",
    "synth_u_instance",
]
