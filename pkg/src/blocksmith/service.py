"""Long-running service: sessions over HTTP with a server-sent event stream."""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterator, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .persistence import load_repository, save_repository
from .planner import Repository
from .session import Session, SessionBusyError
from .world import DEFAULT_DIMS, World


class BuilderService:
    """Owns the shared repository and all live sessions."""

    def __init__(self, repo_file: Optional[str | Path] = None,
                 transcript_dir: Optional[str | Path] = None):
        self.repo_file = Path(repo_file) if repo_file else None
        self.transcript_dir = Path(transcript_dir) if transcript_dir else None
        self.repo: Repository = (load_repository(self.repo_file)
                                 if self.repo_file else Repository())
        self.sessions: dict[str, Session] = {}
        self._counter = 0
        self._repo_lock = threading.Lock()

    def create_session(self, dims: tuple[int, int, int] = DEFAULT_DIMS,
                       target: Optional[list[dict]] = None) -> Session:
        if any(d <= 0 for d in dims):
            raise ValueError(f"region dimensions must be positive, got {dims}")
        self._counter += 1
        session_id = f"s{self._counter}"
        transcript = None
        if self.transcript_dir:
            self.transcript_dir.mkdir(parents=True, exist_ok=True)
            transcript = self.transcript_dir / f"{session_id}.jsonl"
        session = Session(
            session_id,
            World(*dims),
            self.repo,
            transcript_path=transcript,
            target=target,
            on_repository_change=self._persist_repo,
        )
        self.sessions[session_id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def _persist_repo(self, _name: str) -> None:
        if self.repo_file is None:
            return
        with self._repo_lock:
            save_repository(self.repo, self.repo_file)


class CreateSessionBody(BaseModel):
    dims: Optional[list[int]] = None
    target: Optional[list[dict]] = None


class MessageBody(BaseModel):
    text: str


def create_app(service: BuilderService,
               ui_dir: Optional[str | Path] = None) -> FastAPI:
    app = FastAPI(title="blocksmith", version="0.1.0")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        dims = tuple(body.dims) if body.dims else DEFAULT_DIMS
        if len(dims) != 3:
            raise HTTPException(status_code=400, detail="dims must be [W, H, D]")
        try:
            session = service.create_session(dims, body.target)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"id": session.id}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        session = _lookup(session_id)
        if not body.text.strip():
            raise HTTPException(status_code=400, detail="empty message")
        try:
            return session.post_message(body.text)
        except SessionBusyError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        return _lookup(session_id).state_payload(service.repo)

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, since: int = 0, wait: int = 1):
        session = _lookup(session_id)
        return StreamingResponse(
            _event_stream(session, since, bool(wait)),
            media_type="text/event-stream",
        )

    @app.get("/repository")
    def get_repository():
        return {
            "kinds": list(service.repo.kinds()),
            "concepts": [d.to_record() for d in service.repo.learned()],
        }

    def _lookup(session_id: str) -> Session:
        try:
            return service.get_session(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")

    return app


def _event_stream(session: Session, since: int, keep_open: bool) -> Iterator[str]:
    seq = since
    while True:
        events = (session.events.wait_for(seq, timeout=10.0)
                  if keep_open else session.events.since(seq))
        for event in events:
            seq = event["seq"]
            yield f"data: {json.dumps(event)}\n\n"
        if not keep_open:
            return
        if not events:
            yield ": keep-alive\n\n"
