"""HTTP/JSON interface exposing editing sessions.

Sessions live in memory and expire after an idle period.  Operations on
one session are serialized through a per-session lock, so concurrent
requests never interleave edits; distinct sessions run independently.
Every command response carries the full score snapshot and flat event
list, so clients never need a second fetch to redraw.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import ingest, scorejson
from .errors import IngestError, ModelError
from .midi import export_midi
from .session import Session, outcome_to_json


class CommandBody(BaseModel):
    text: str


class ResolveBody(BaseModel):
    index: int


@dataclass
class _Entry:
    session: Session
    lock: threading.Lock
    last_access: float


def _pick_format(request: Request) -> str:
    header = request.headers.get("x-score-format", "").lower()
    if header in ingest.FORMATS:
        return header
    content_type = request.headers.get("content-type", "").lower()
    if "midi" in content_type:
        return "midi"
    if "xml" in content_type:
        return "musicxml"
    if "json" in content_type:
        return "json"
    raise HTTPException(422, "unknown score format; set X-Score-Format to midi, musicxml, or json")


def create_app(*, session_ttl: float = 3600.0, cors_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    app = FastAPI(title="scoretalk service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions: dict[str, _Entry] = {}
    registry_lock = threading.Lock()

    def _entry(session_id: str) -> _Entry:
        now = time.monotonic()
        with registry_lock:
            expired = [sid for sid, e in sessions.items() if now - e.last_access > session_ttl]
            for sid in expired:
                del sessions[sid]
            entry = sessions.get(session_id)
            if entry is None:
                raise HTTPException(404, "unknown session")
            entry.last_access = now
            return entry

    def _snapshot(session: Session) -> dict:
        score = scorejson.music_to_dict(session.score) if session.score is not None else None
        return {
            "score": score,
            "events": [scorejson.timed_event_to_dict(e) for e in session.events()],
            "meta": scorejson.meta_to_dict(session.meta),
            "version": session.version,
        }

    @app.post("/sessions", status_code=201)
    def create_session():
        session = Session()
        with registry_lock:
            sessions[session.id] = _Entry(session, threading.Lock(), time.monotonic())
        return {"sessionId": session.id}

    @app.post("/sessions/{session_id}/score")
    def upload_score(session_id: str, request: Request, body: bytes = Body(default=b"")):
        entry = _entry(session_id)
        fmt = _pick_format(request)
        with entry.lock:
            try:
                music, meta, report = ingest.load_bytes(body, fmt)
            except (IngestError, ModelError) as exc:
                raise HTTPException(422, str(exc)) from None
            entry.session.load(music, meta)
            return {"report": report.to_json(), **_snapshot(entry.session)}

    @app.post("/sessions/{session_id}/command")
    def run_command(session_id: str, body: CommandBody):
        entry = _entry(session_id)
        with entry.lock:
            outcome = entry.session.apply_command(body.text)
            if outcome.status == "error" and outcome.message == "resolve pending ambiguity first":
                raise HTTPException(409, outcome.message)
            return {
                "outcome": outcome_to_json(outcome),
                "echo": outcome.echo,
                "program": outcome.program,
                **_snapshot(entry.session),
            }

    @app.post("/sessions/{session_id}/resolve")
    def resolve(session_id: str, body: ResolveBody):
        entry = _entry(session_id)
        with entry.lock:
            if entry.session.pending is None:
                raise HTTPException(409, "no pending ambiguity")
            outcome = entry.session.resolve_choice(body.index)
            if outcome.status == "error" and outcome.message == "choice out of range":
                raise HTTPException(400, outcome.message)
            return {
                "outcome": outcome_to_json(outcome),
                "echo": outcome.echo,
                "program": outcome.program,
                **_snapshot(entry.session),
            }

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        entry = _entry(session_id)
        with entry.lock:
            outcome = entry.session.apply_command("undo")
            return {
                "outcome": outcome_to_json(outcome),
                "echo": outcome.echo,
                **_snapshot(entry.session),
            }

    @app.get("/sessions/{session_id}/score")
    def get_score(session_id: str):
        entry = _entry(session_id)
        with entry.lock:
            return _snapshot(entry.session)

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        entry = _entry(session_id)
        with entry.lock:
            return {
                "history": [
                    {"text": h.text, "status": h.status, "message": h.message}
                    for h in entry.session.history
                ]
            }

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, format: str = "json"):
        entry = _entry(session_id)
        with entry.lock:
            if entry.session.score is None:
                raise HTTPException(409, "no score loaded")
            if format == "json":
                text = scorejson.export_json(entry.session.score, entry.session.meta)
                return Response(text, media_type="application/json")
            if format == "midi":
                try:
                    data = export_midi(entry.session.score, entry.session.meta)
                except IngestError as exc:
                    raise HTTPException(422, str(exc)) from None
                return Response(data, media_type="audio/midi")
            raise HTTPException(400, "format must be json or midi")

    return app


app = create_app()
