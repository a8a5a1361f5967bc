"""Sessions: one world + dialogue machine each, with an ordered event log.

Events are the single source of truth for clients; replaying a session's world
events from an empty grid reconstructs the server snapshot exactly.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Callable, Optional

from .dialogue import (
    DialogueManager,
    Effect,
    RepositoryChanged,
    Say,
    StateChanged,
    WorldChanged,
)
from .planner import InstanceRegistry, Repository
from .world import Color, Position, World


class SessionBusyError(Exception):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id} is already processing a message")


class EventLog:
    """Append-only, thread-safe event buffer with monotone sequence numbers."""

    def __init__(self):
        self._events: list[dict] = []
        self._cond = threading.Condition()

    def append(self, event: dict) -> dict:
        with self._cond:
            event = {"seq": len(self._events) + 1, **event}
            self._events.append(event)
            self._cond.notify_all()
            return event

    def since(self, seq: int) -> list[dict]:
        with self._cond:
            return self._events[seq:]

    def wait_for(self, seq: int, timeout: float) -> list[dict]:
        with self._cond:
            self._cond.wait_for(lambda: len(self._events) > seq, timeout=timeout)
            return self._events[seq:]

    def __len__(self) -> int:
        with self._cond:
            return len(self._events)


def _blocks_payload(blocks: tuple[tuple[Position, Color], ...]) -> list[dict]:
    return [
        {"x": pos.x, "y": pos.y, "z": pos.z, "color": color.value}
        for pos, color in blocks
    ]


class Session:
    """A single architect/builder conversation over one world."""

    def __init__(self, session_id: str, world: World, repo: Repository,
                 transcript_path: Optional[Path] = None,
                 target: Optional[list[dict]] = None,
                 on_repository_change: Optional[Callable[[str], None]] = None):
        self.id = session_id
        self.world = world
        self.registry = InstanceRegistry()
        self.manager = DialogueManager(world, repo, self.registry)
        self.events = EventLog()
        self.transcript_path = Path(transcript_path) if transcript_path else None
        self.target = target
        self._on_repository_change = on_repository_change
        self._lock = threading.Lock()
        self._turn = 0
        greeting = self.manager.greet()
        self._record_effects(greeting)

    @property
    def state_tag(self) -> str:
        return self.manager.state.tag

    def post_message(self, text: str) -> dict:
        """Handle one architect message; rejects overlapping messages."""
        if not self._lock.acquire(blocking=False):
            raise SessionBusyError(self.id)
        try:
            self._turn += 1
            self._append_transcript("architect", text, [])
            self.events.append({"type": "architect", "text": text})
            effects = self.manager.handle_message(text)
            replies = self._record_effects(effects)
            return {
                "replies": replies,
                "state": self.state_tag,
                "effects": [serialize_effect(e) for e in effects],
            }
        finally:
            self._lock.release()

    def state_payload(self, repo: Repository) -> dict:
        return {
            "id": self.id,
            "dims": list(self.world.dims),
            "snapshot": self.world.snapshot_records(),
            "state": self.state_tag,
            "repository": list(repo.kinds()),
            "target": self.target,
        }

    def _record_effects(self, effects: list[Effect]) -> list[str]:
        replies = []
        for effect in effects:
            if isinstance(effect, Say):
                replies.append(effect.text)
                self.events.append({"type": "say", "text": effect.text})
            elif isinstance(effect, WorldChanged):
                self.events.append({
                    "type": "world",
                    "placed": _blocks_payload(effect.placed),
                    "removed": _blocks_payload(effect.removed),
                })
            elif isinstance(effect, RepositoryChanged):
                self.events.append({"type": "repository", "name": effect.name})
                if self._on_repository_change:
                    self._on_repository_change(effect.name)
            elif isinstance(effect, StateChanged):
                self.events.append({"type": "state", "state": effect.state})
        self._turn += 1
        self._append_transcript("builder", "\n".join(replies), effects)
        return replies

    def _append_transcript(self, speaker: str, text: str, effects: list[Effect]) -> None:
        if self.transcript_path is None:
            return
        record = {
            "turn": self._turn,
            "speaker": speaker,
            "text": text,
            "state": self.state_tag if self.manager.state else "new",
            "effects": [serialize_effect(e) for e in effects],
        }
        with self.transcript_path.open("a") as handle:
            handle.write(json.dumps(record) + "\n")


def serialize_effect(effect: Effect) -> dict:
    if isinstance(effect, Say):
        return {"effect": "say", "text": effect.text}
    if isinstance(effect, WorldChanged):
        return {
            "effect": "world-changed",
            "placed": _blocks_payload(effect.placed),
            "removed": _blocks_payload(effect.removed),
        }
    if isinstance(effect, RepositoryChanged):
        return {"effect": "repository-changed", "name": effect.name}
    return {"effect": "state-changed", "state": effect.state}
