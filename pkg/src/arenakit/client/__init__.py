"""Evaluator-side workflow: session loop and rollout driver."""

from .cli import ClientError, load_script, main, run_session
from .rollout import RolloutTrace, rollout

__all__ = ["ClientError", "RolloutTrace", "load_script", "main", "rollout", "run_session"]
