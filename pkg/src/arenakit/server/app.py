"""HTTP layer over the arena service.

Routes mirror the service operations one-to-one; error responses carry
machine-readable codes as ``{"error": {"code", "message"}}``.
"""

from __future__ import annotations

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..gateway import DeadlineExceeded, MalformedResponse, TransportError
from .core import ArenaConfig, ArenaService
from .errors import ArenaError
from .storage import Storage


class PolicyIn(BaseModel):
    display_name: str
    endpoint: str
    open_source: bool = False
    owner: str


class StatusIn(BaseModel):
    status: str


class EvaluatorIn(BaseModel):
    evaluator_id: str


class SessionIn(BaseModel):
    evaluator_id: str
    policy_id: str | None = None  # set to request an own-policy evaluation


class FeedbackIn(BaseModel):
    instruction: str
    progress_a: int
    progress_b: int
    preference: str
    explanation: str
    media_refs: list[str] = Field(default_factory=list)


def create_app(service: ArenaService) -> FastAPI:
    app = FastAPI(title="arenakit arena server")
    app.state.service = service

    @app.exception_handler(ArenaError)
    async def arena_error_handler(request: Request, exc: ArenaError):
        return JSONResponse(status_code=exc.status, content=exc.payload())

    @app.get("/healthz")
    def health():
        return {"status": "ok"}

    @app.post("/policies", status_code=201)
    def register_policy(body: PolicyIn):
        return service.register_policy(body.display_name, body.endpoint, body.open_source, body.owner)

    @app.patch("/policies/{policy_id}/status")
    def set_policy_status(policy_id: str, body: StatusIn):
        return service.set_policy_status(policy_id, body.status)

    @app.post("/evaluators", status_code=201)
    def register_evaluator(body: EvaluatorIn):
        return service.register_evaluator(body.evaluator_id)

    @app.get("/evaluators/{evaluator_id}")
    def get_evaluator(evaluator_id: str):
        return service.get_evaluator(evaluator_id)

    @app.post("/sessions", status_code=201)
    def request_session(body: SessionIn):
        return service.request_session(body.evaluator_id, own_policy_id=body.policy_id)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return service.get_session(session_id)

    @app.post("/sessions/{session_id}/feedback")
    def submit_feedback(session_id: str, body: FeedbackIn,
                        idempotency_key: str | None = Header(default=None)):
        return service.submit_feedback(session_id, body.model_dump(), idempotency_key=idempotency_key)

    @app.post("/admin/cancel-expired")
    def cancel_expired():
        return {"cancelled": service.cancel_expired_sessions()}

    @app.get("/leaderboard")
    def leaderboard(method: str = "task_em", filter: str = "all"):
        return service.leaderboard(method=method, filter=filter)

    @app.get("/export")
    def export(since: str | None = None, until: str | None = None):
        return service.export_records(since=since, until=until)

    @app.post("/proxy/{token}/act")
    async def proxy_act(token: str, request: Request):
        observation = await request.json()
        try:
            return service.proxy_act(token, observation)
        except DeadlineExceeded as exc:
            return JSONResponse(status_code=504, content={"error": {"code": "policy_deadline", "message": str(exc)}})
        except MalformedResponse as exc:
            return JSONResponse(status_code=502, content={"error": {"code": "policy_malformed", "message": str(exc)}})
        except TransportError as exc:
            return JSONResponse(status_code=502, content={"error": {"code": "policy_transport", "message": str(exc)}})

    return app


def build_service(db_path: str = ":memory:", config: ArenaConfig | None = None, **kwargs) -> ArenaService:
    return ArenaService(Storage(db_path), config=config, **kwargs)
