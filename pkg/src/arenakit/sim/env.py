"""Synthetic task environment for desk-scale rollouts.

Stands in for the physical robot: the state is a point in action space, the
task is to reach the target that ``task_target`` derives from the
instruction, and progress is the fraction of the initial distance covered.
Policies served by ``gateway.synthetic`` pursue the same target, so higher
skill yields higher progress.
"""

from __future__ import annotations

import numpy as np

from ..gateway.protocol import ACTION_DIM, ActionChunk, Observation
from ..gateway.synthetic import task_target


class SyntheticTaskEnv:
    """Deterministic-under-seed point-mass environment."""

    def __init__(self, instruction: str, seed: int = 0, start_noise: float = 0.0):
        if not instruction:
            raise ValueError("instruction must be non-empty")
        self.instruction = instruction
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        self._goal = task_target(instruction)
        self._pos = start_noise * self._rng.standard_normal(ACTION_DIM)
        self._initial_dist = float(np.linalg.norm(self._goal - self._pos))
        self._timestep = 0

    def observe(self) -> Observation:
        return Observation(
            instruction=self.instruction,
            proprio=tuple(self._pos.tolist()),
            timestep=self._timestep,
            images=(("wrist", b"synthetic-frame"),),
        )

    def apply(self, chunk: ActionChunk) -> Observation:
        for action in chunk.actions:
            self._pos = self._pos + np.asarray(action, dtype=np.float64)
            self._timestep += 1
        return self.observe()

    def progress(self) -> float:
        """Fraction of the initial goal distance covered, in [0, 1]."""
        if self._initial_dist < 1e-12:
            return 1.0
        dist = float(np.linalg.norm(self._goal - self._pos))
        return float(np.clip(1.0 - dist / self._initial_dist, 0.0, 1.0))
