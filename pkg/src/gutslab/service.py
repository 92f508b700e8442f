"""HTTP front end for live guts sessions.

JSON API:
  POST   /sessions                 {n, mesh, rule, seed} -> {session_id, state}
  GET    /sessions/{id}[?coach=1]  -> {state}
  POST   /sessions/{id}/decision   {action: hold|drop} -> {resolution, state}
  DELETE /sessions/{id}            -> 204
  GET    /health                   -> {status}

Errors come back as {code, message}.  Requests to one session serialize on
its lock; distinct sessions proceed in parallel.  `n` counts coalition
members (the bots), so a session has n+1 players.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .core import GutslabError
from .payoff import RuleVariant
from .session import (
    GameSession,
    PolicyStore,
    PolicyUnavailableError,
    SessionStateError,
)


class NewSessionRequest(BaseModel):
    n: int = Field(default=2, ge=1, description="coalition size (number of bots)")
    mesh: int = Field(default=101, ge=2)
    rule: str = Field(default="standard")
    seed: Optional[int] = None
    transcript: bool = False


class DecisionRequest(BaseModel):
    action: str


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message


def create_app(store: PolicyStore, transcript_dir=None) -> FastAPI:
    app = FastAPI(title="gutslab bot service")
    sessions: dict[str, GameSession] = {}
    registry_lock = threading.Lock()

    @app.exception_handler(_ApiError)
    async def api_error_handler(request: Request, exc: _ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    def _get_session(session_id: str) -> GameSession:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise _ApiError(404, "not_found", f"unknown session {session_id}")
        return session

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session(body: NewSessionRequest):
        try:
            rule = RuleVariant(body.rule)
        except ValueError:
            raise _ApiError(422, "invalid", f"unknown rule {body.rule!r}")
        try:
            policy = store.get(body.n + 1, body.mesh, rule)
        except PolicyUnavailableError as exc:
            raise _ApiError(409, "policy_unavailable", str(exc))
        session = GameSession(policy, seed=body.seed)
        if body.transcript and transcript_dir is not None:
            session._transcript_path = (
                Path(transcript_dir) / f"session-{session.session_id}.jsonl"
            )
        with registry_lock:
            sessions[session.session_id] = session
        return {"session_id": session.session_id, "state": session.public_state()}

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str, coach: bool = False):
        session = _get_session(session_id)
        with session.lock:
            return {"state": session.public_state(coach=coach)}

    @app.post("/sessions/{session_id}/decision")
    def submit_decision(session_id: str, body: DecisionRequest):
        session = _get_session(session_id)
        try:
            with session.lock:
                resolution = session.submit_decision(body.action)
                state = session.public_state()
        except SessionStateError as exc:
            raise _ApiError(409, "state", str(exc))
        except GutslabError as exc:
            raise _ApiError(422, "invalid", str(exc))
        return {"resolution": resolution.to_jsonable(), "state": state}

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        with registry_lock:
            if session_id not in sessions:
                raise _ApiError(404, "not_found", f"unknown session {session_id}")
            del sessions[session_id]
        return Response(status_code=204)

    return app


def serve(store: PolicyStore, host: str = "127.0.0.1", port: int = 8000, transcript_dir=None):
    """Blocking uvicorn server hosting the session API."""
    import uvicorn

    app = create_app(store, transcript_dir=transcript_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
