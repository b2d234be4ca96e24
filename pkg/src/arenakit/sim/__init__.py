"""Synthetic worlds, environment stepper, and experiment runners."""

from .env import SyntheticTaskEnv
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    ResultRow,
    run_drift_experiment,
    run_ranking_experiment,
)
from .world import WorldSpec, oracle_scores, sample_world, simulate_comparison, synthetic_env_step

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "ResultRow",
    "SyntheticTaskEnv",
    "WorldSpec",
    "oracle_scores",
    "run_drift_experiment",
    "run_ranking_experiment",
    "sample_world",
    "simulate_comparison",
    "synthetic_env_step",
]
