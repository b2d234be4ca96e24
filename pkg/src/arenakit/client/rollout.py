"""Rollout loop: observe, query the policy, apply the actions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..gateway import DeadlineExceeded, act


@dataclass
class RolloutTrace:
    observations: list = field(default_factory=list)
    chunks: list = field(default_factory=list)
    step_count: int = 0
    aborted: bool = False
    final_progress: float | None = None

    def to_json(self) -> str:
        return json.dumps({
            "observations": [obs.to_json() for obs in self.observations],
            "chunks": [chunk.to_json() for chunk in self.chunks],
            "step_count": self.step_count,
            "aborted": self.aborted,
            "final_progress": self.final_progress,
        }, indent=2)


def rollout(endpoint: str, env, max_steps: int, timeout_s: float = 10.0,
            session=None) -> RolloutTrace:
    """Drive one policy against the environment for at most ``max_steps``
    inference calls. A deadline failure aborts with the partial trace."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    trace = RolloutTrace()
    obs = env.observe()
    trace.observations.append(obs)
    for _ in range(max_steps):
        try:
            chunk = act(endpoint, obs, timeout_s=timeout_s, session=session)
        except DeadlineExceeded:
            trace.aborted = True
            break
        trace.chunks.append(chunk)
        trace.step_count += 1
        obs = env.apply(chunk)
        trace.observations.append(obs)
    trace.final_progress = env.progress()
    return trace
