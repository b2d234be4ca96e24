"""HTTP client for policy servers plus the registration conformance probe."""

from __future__ import annotations

import time
from dataclasses import dataclass

import requests

from .protocol import ActionChunk, Observation, canonical_observation


class PolicyClientError(Exception):
    """Base class for policy call failures."""


class DeadlineExceeded(PolicyClientError):
    pass


class TransportError(PolicyClientError):
    pass


class MalformedResponse(PolicyClientError):
    pass


@dataclass(frozen=True)
class ConformanceReport:
    schema_ok: bool
    latency_ms: float
    error_kind: str | None = None  # "timeout" | "transport" | "malformed"
    error: str | None = None


def act(endpoint: str, observation: Observation, timeout_s: float = 10.0,
        session: requests.Session | None = None) -> ActionChunk:
    """One inference call; enforces the per-call deadline client-side."""
    url = endpoint.rstrip("/") + "/act"
    post = (session or requests).post
    try:
        resp = post(url, json=observation.to_json(), timeout=timeout_s)
    except requests.exceptions.Timeout as exc:
        raise DeadlineExceeded(f"{url}: no response within {timeout_s}s") from exc
    except requests.exceptions.RequestException as exc:
        raise TransportError(f"{url}: {exc}") from exc
    if resp.status_code != 200:
        raise TransportError(f"{url}: HTTP {resp.status_code}")
    try:
        return ActionChunk.from_json(resp.json())
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedResponse(f"{url}: {exc}") from exc


def probe_conformance(endpoint: str, timeout_s: float = 5.0) -> ConformanceReport:
    """Send the canonical observation and validate the response schema."""
    started = time.monotonic()
    try:
        act(endpoint, canonical_observation(), timeout_s=timeout_s)
    except DeadlineExceeded as exc:
        return ConformanceReport(schema_ok=False, latency_ms=_ms(started), error_kind="timeout", error=str(exc))
    except TransportError as exc:
        return ConformanceReport(schema_ok=False, latency_ms=_ms(started), error_kind="transport", error=str(exc))
    except MalformedResponse as exc:
        return ConformanceReport(schema_ok=False, latency_ms=_ms(started), error_kind="malformed", error=str(exc))
    return ConformanceReport(schema_ok=True, latency_ms=_ms(started))


def healthz(endpoint: str, timeout_s: float = 2.0) -> bool:
    try:
        resp = requests.get(endpoint.rstrip("/") + "/healthz", timeout=timeout_s)
    except requests.exceptions.RequestException:
        return False
    return resp.status_code == 200


def _ms(started: float) -> float:
    return (time.monotonic() - started) * 1000.0
