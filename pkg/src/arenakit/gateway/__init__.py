"""Policy inference wire protocol, client, prober, and synthetic servers."""

from .client import (
    ConformanceReport,
    DeadlineExceeded,
    MalformedResponse,
    PolicyClientError,
    TransportError,
    act,
    healthz,
    probe_conformance,
)
from .protocol import ACTION_DIM, PROTOCOL_VERSION, ActionChunk, Observation, canonical_observation
from .synthetic import (
    SyntheticPolicySpec,
    SyntheticServerHandle,
    serve_synthetic,
    synthetic_chunk,
    task_target,
)

__all__ = [
    "ACTION_DIM",
    "PROTOCOL_VERSION",
    "ActionChunk",
    "ConformanceReport",
    "DeadlineExceeded",
    "MalformedResponse",
    "Observation",
    "PolicyClientError",
    "SyntheticPolicySpec",
    "SyntheticServerHandle",
    "TransportError",
    "act",
    "canonical_observation",
    "healthz",
    "probe_conformance",
    "serve_synthetic",
    "synthetic_chunk",
    "task_target",
]
