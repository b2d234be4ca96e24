"""Machine-readable error codes for the arena HTTP API."""

from __future__ import annotations


class ArenaError(Exception):
    """Service-level failure carrying a stable error code and HTTP status."""

    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status

    def payload(self) -> dict:
        return {"error": {"code": self.code, "message": self.message}}


def unknown_evaluator(evaluator_id: str) -> ArenaError:
    return ArenaError("unknown_evaluator", f"evaluator {evaluator_id!r} is not registered", 404)


def duplicate_evaluator(evaluator_id: str) -> ArenaError:
    return ArenaError("duplicate_evaluator", f"evaluator {evaluator_id!r} already registered", 409)


def policy_not_found(policy_id: str) -> ArenaError:
    return ArenaError("policy_not_found", f"no policy with id {policy_id!r}", 404)


def policy_not_active(policy_id: str) -> ArenaError:
    return ArenaError("policy_not_active", f"policy {policy_id!r} is not active", 409)


def not_policy_owner(policy_id: str, evaluator_id: str) -> ArenaError:
    return ArenaError("not_policy_owner", f"policy {policy_id!r} is not owned by {evaluator_id!r}", 403)


def unreachable_endpoint(endpoint: str, detail: str) -> ArenaError:
    return ArenaError("unreachable_endpoint", f"endpoint {endpoint!r} did not respond: {detail}", 422)


def endpoint_nonconformant(endpoint: str, detail: str) -> ArenaError:
    return ArenaError("endpoint_nonconformant", f"endpoint {endpoint!r} violates the protocol: {detail}", 422)


def too_few_active_policies() -> ArenaError:
    return ArenaError("too_few_active_policies", "need at least 2 active policies to assign a session", 409)


def too_many_open_sessions(limit: int) -> ArenaError:
    return ArenaError("too_many_open_sessions", f"evaluator already holds {limit} open sessions", 429)


def insufficient_credit(balance: int) -> ArenaError:
    return ArenaError("insufficient_credit", f"own-policy evaluation needs 1 credit, balance is {balance}", 402)


def session_not_found(session_id: str) -> ArenaError:
    return ArenaError("session_not_found", f"no session with id {session_id!r}", 404)


def session_expired(session_id: str) -> ArenaError:
    return ArenaError("session_expired", f"session {session_id!r} is past its deadline", 410)


def session_closed(session_id: str, state: str) -> ArenaError:
    return ArenaError("session_closed", f"session {session_id!r} is already {state}", 409)


def validation_failed(detail: str) -> ArenaError:
    return ArenaError("validation_failed", detail, 400)


def insufficient_data(detail: str) -> ArenaError:
    return ArenaError("insufficient_data", detail, 409)


def unknown_token(token: str) -> ArenaError:
    return ArenaError("unknown_token", f"no live session endpoint for token {token!r}", 404)


def bad_status(value: str) -> ArenaError:
    return ArenaError("validation_failed", f"unknown policy status {value!r}", 400)
