"""Wire protocol for policy inference servers.

JSON over HTTP: POST /act takes an observation and returns an action chunk;
GET /healthz reports liveness. Image payloads travel base64-encoded. The
schema is versioned so it can be replaced without breaking old servers.
"""

from __future__ import annotations

import base64
import math
from dataclasses import dataclass, field

PROTOCOL_VERSION = 1
ACTION_DIM = 8  # 7 joint deltas + gripper


@dataclass(frozen=True)
class Observation:
    """Client-side view of the robot state sent to a policy server."""

    instruction: str
    proprio: tuple[float, ...]
    timestep: int
    images: tuple[tuple[str, bytes], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.instruction:
            raise ValueError("instruction must be non-empty")
        if self.timestep < 0:
            raise ValueError("timestep must be >= 0")
        object.__setattr__(self, "proprio", tuple(float(x) for x in self.proprio))
        object.__setattr__(self, "images", tuple((str(n), bytes(b)) for n, b in self.images))

    def to_json(self) -> dict:
        return {
            "version": PROTOCOL_VERSION,
            "instruction": self.instruction,
            "proprio": list(self.proprio),
            "timestep": self.timestep,
            "images": [{"camera_name": name, "data_b64": base64.b64encode(data).decode("ascii")}
                       for name, data in self.images],
        }

    @staticmethod
    def from_json(obj: dict) -> "Observation":
        return Observation(
            instruction=obj["instruction"],
            proprio=tuple(obj["proprio"]),
            timestep=int(obj["timestep"]),
            images=tuple((img["camera_name"], base64.b64decode(img["data_b64"]))
                         for img in obj.get("images", [])),
        )


@dataclass(frozen=True)
class ActionChunk:
    """A horizon of fixed-dimension actions predicted in one inference call."""

    actions: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        actions = tuple(tuple(float(x) for x in row) for row in self.actions)
        if len(actions) < 1:
            raise ValueError("action chunk must contain at least one action")
        for row in actions:
            if len(row) != ACTION_DIM:
                raise ValueError(f"action dimension {len(row)} != {ACTION_DIM}")
            if not all(math.isfinite(x) for x in row):
                raise ValueError("actions must be finite")
        object.__setattr__(self, "actions", actions)

    @property
    def horizon(self) -> int:
        return len(self.actions)

    def to_json(self) -> dict:
        return {"version": PROTOCOL_VERSION, "actions": [list(row) for row in self.actions],
                "horizon": self.horizon}

    @staticmethod
    def from_json(obj: dict) -> "ActionChunk":
        chunk = ActionChunk(actions=tuple(tuple(row) for row in obj["actions"]))
        if "horizon" in obj and int(obj["horizon"]) != chunk.horizon:
            raise ValueError(f"declared horizon {obj['horizon']} != {chunk.horizon} actions")
        return chunk


def canonical_observation() -> Observation:
    """Fixture observation used by the conformance probe."""
    return Observation(
        instruction="conformance probe: touch the marker",
        proprio=tuple(0.0 for _ in range(ACTION_DIM)),
        timestep=0,
        images=(("wrist", b"\x89PNG-probe"),),
    )
