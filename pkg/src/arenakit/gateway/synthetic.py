"""Synthetic reference policy servers.

Each server controls a point in the action space that moves toward a task
target derived from the instruction text. The ``skill`` knob blends the
true direction with deterministic pseudo-random drift, so higher skill
means more direct task progress. Responses are a pure function of
(spec, observation, seed): no call history is kept.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .protocol import ACTION_DIM, ActionChunk, Observation

DEFAULT_HORIZON = 2
MAX_STEP = 0.25


@dataclass(frozen=True)
class SyntheticPolicySpec:
    policy_id: str
    skill: float
    latency_ms: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.skill <= 1.0:
            raise ValueError(f"skill={self.skill} outside [0, 1]")


def _hash_unit(*parts) -> np.ndarray:
    """Deterministic unit vector from the hash of the given parts."""
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
    vec = rng.standard_normal(ACTION_DIM)
    return vec / np.linalg.norm(vec)


def task_target(instruction: str) -> np.ndarray:
    """Goal point for an instruction; shared by policies and the synthetic env."""
    return _hash_unit("task-target", instruction)


def synthetic_chunk(spec: SyntheticPolicySpec, obs: Observation,
                    horizon: int = DEFAULT_HORIZON) -> ActionChunk:
    goal = task_target(obs.instruction)
    pos = np.asarray(obs.proprio, dtype=np.float64)
    actions = []
    for k in range(horizon):
        offset = goal - pos
        dist = float(np.linalg.norm(offset))
        if dist < 1e-12:
            actions.append(tuple(0.0 for _ in range(ACTION_DIM)))
            continue
        direction = offset / dist
        drift = _hash_unit("drift", spec.seed, spec.policy_id, obs.instruction, obs.timestep + k)
        blended = spec.skill * direction + (1.0 - spec.skill) * drift
        norm = float(np.linalg.norm(blended))
        if norm < 1e-12:
            blended, norm = direction, 1.0
        step = (blended / norm) * min(MAX_STEP, dist)
        pos = pos + step
        actions.append(tuple(step.tolist()))
    return ActionChunk(actions=tuple(actions))


class _Handler(BaseHTTPRequestHandler):
    server_version = "SyntheticPolicy/1"

    def log_message(self, fmt, *args):  # keep test output clean
        pass

    def do_GET(self):
        if self.path == "/healthz":
            self._reply(200, {"status": "ok"})
        else:
            self._reply(404, {"error": "not found"})

    def do_POST(self):
        if self.path != "/act":
            self._reply(404, {"error": "not found"})
            return
        spec: SyntheticPolicySpec = self.server.spec  # type: ignore[attr-defined]
        if spec.latency_ms > 0:
            time.sleep(spec.latency_ms / 1000.0)
        try:
            length = int(self.headers.get("Content-Length", "0"))
            obs = Observation.from_json(json.loads(self.rfile.read(length)))
        except (ValueError, KeyError, TypeError) as exc:
            self._reply(400, {"error": f"bad observation: {exc}"})
            return
        chunk = synthetic_chunk(spec, obs)
        self._reply(200, chunk.to_json())

    def _reply(self, status: int, payload: dict):
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        try:
            self.wfile.write(body)
        except BrokenPipeError:
            pass


class SyntheticServerHandle:
    """A running synthetic policy server; stop() tears it down."""

    def __init__(self, spec: SyntheticPolicySpec, host: str = "127.0.0.1", port: int = 0):
        self.spec = spec
        self._server = ThreadingHTTPServer((host, port), _Handler)
        self._server.daemon_threads = True
        self._server.spec = spec  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True,
                                        name=f"synthetic-policy-{spec.policy_id}")
        self._thread.start()

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def endpoint(self) -> str:
        host = self._server.server_address[0]
        return f"http://{host}:{self.port}"

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.stop()


def serve_synthetic(spec: SyntheticPolicySpec, host: str = "127.0.0.1",
                    port: int = 0) -> SyntheticServerHandle:
    """Start a policy server; ``port=0`` binds an ephemeral port."""
    return SyntheticServerHandle(spec, host=host, port=port)
