"""Experiments module: configuration, figure registry and the runner."""

from .config import (
    EXPERIMENTS,
    FIGURES,
    SPECTRUM_OPERATORS,
    DESK_DEFAULTS,
    DESK_LIMITS,
    ExperimentConfig,
    build_config,
    cache_key,
    guard_violations,
)
from .figures import FigureData, REGISTRY, get_experiment
from .runner import ExperimentResult, run_experiment

__all__ = [
    "EXPERIMENTS",
    "FIGURES",
    "SPECTRUM_OPERATORS",
    "DESK_DEFAULTS",
    "DESK_LIMITS",
    "ExperimentConfig",
    "build_config",
    "cache_key",
    "guard_violations",
    "FigureData",
    "REGISTRY",
    "get_experiment",
    "ExperimentResult",
    "run_experiment",
]
