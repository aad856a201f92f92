"""The versioned JSON session protocol served over HTTP.

One prover session per session id; all state lives server-side.  The
message envelope is documented in docs/protocol.md: requests carry
{v, id, cmd, payload} and responses echo the id with either the current
subgoal rendering or a diagnostic.
"""

from __future__ import annotations

import json
import uuid

from .errors import ProverError
from .session import Session
from .surface import parse_tactic_text

try:  # the protocol hub works without fastapi; serving requires it
    from fastapi import FastAPI, Request
except ImportError:  # pragma: no cover
    FastAPI = Request = None

PROTOCOL_VERSION = 1
MAX_PAYLOAD = 1 << 20


class ProtocolSessions:
    """Transport-independent implementation of the message protocol."""

    def __init__(self, base_dir: str = "."):
        self.base_dir = base_dir
        self.sessions: dict = {}

    def open_session(self) -> str:
        sid = uuid.uuid4().hex[:12]
        self.sessions[sid] = Session(base_dir=self.base_dir)
        return sid

    def handle(self, sid: str, raw: bytes) -> dict:
        if len(raw) > MAX_PAYLOAD:
            return {"v": PROTOCOL_VERSION, "id": None, "status": "error",
                    "diagnostic": "payload too large"}
        try:
            msg = json.loads(raw)
            assert isinstance(msg, dict)
        except Exception:
            return {"v": PROTOCOL_VERSION, "id": None, "status": "error",
                    "diagnostic": "malformed JSON"}
        mid = msg.get("id")
        session = self.sessions.get(sid)
        if session is None:
            return self._err(mid, f"unknown session {sid}")
        cmd = msg.get("cmd")
        payload = msg.get("payload") or {}
        try:
            if cmd == "load":
                session.load_text(payload.get("text", ""), interactive=True)
                return self._ok(mid, session)
            if cmd == "tactic":
                session.run_tactic(parse_tactic_text(payload.get("text", "")))
                done = None
                if session.proof is not None and session.proof.state.complete:
                    done = session.proof.name
                    session.qed()
                out = self._ok(mid, session)
                if done:
                    out["proof_completed"] = done
                return out
            if cmd == "undo":
                session.undo()
                return self._ok(mid, session)
            if cmd == "state":
                return self._ok(mid, session)
            if cmd == "theorems":
                return {
                    "v": PROTOCOL_VERSION, "id": mid, "status": "ok",
                    "theorems": [t.name for t in session.theorems],
                    "open": session.proof.name if session.proof else None,
                }
            if cmd == "check":
                fresh = Session(base_dir=self.base_dir)
                fresh.load_text(payload.get("text", ""))
                return {
                    "v": PROTOCOL_VERSION, "id": mid, "status": "ok",
                    "theorems": [t.name for t in fresh.theorems],
                }
            return self._err(mid, f"unknown command {cmd!r}")
        except ProverError as e:
            return self._err(mid, str(e), code=getattr(e, "code", "error"))

    def _ok(self, mid, session: Session) -> dict:
        out = {"v": PROTOCOL_VERSION, "id": mid, "status": "ok"}
        out.update(session.subgoal_payload())
        return out

    def _err(self, mid, diagnostic: str, code: str = "error") -> dict:
        return {
            "v": PROTOCOL_VERSION, "id": mid, "status": "error",
            "code": code, "diagnostic": diagnostic,
        }


def create_app(base_dir: str = ".", static_dir: str = ""):
    """FastAPI application exposing the protocol plus optional static UI."""
    if FastAPI is None:
        raise RuntimeError("serving requires the fastapi package")
    app = FastAPI(title="polyprove session protocol")
    hub = ProtocolSessions(base_dir)
    app.state.hub = hub

    @app.post("/api/session")
    def open_session():
        return {"v": PROTOCOL_VERSION, "session": hub.open_session()}

    @app.post("/api/session/{sid}")
    async def message(sid: str, request: Request):
        raw = await request.body()
        return hub.handle(sid, raw)

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def serve(port: int, base_dir: str = ".", static_dir: str = "", host: str = "127.0.0.1"):
    import uvicorn

    uvicorn.run(create_app(base_dir, static_dir), host=host, port=port, log_level="warning")
