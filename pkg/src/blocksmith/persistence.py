"""Repository persistence: versioned JSON files, written atomically."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .concepts import definition_from_record
from .planner import Repository

REPOSITORY_VERSION = 1


def repository_to_text(repo: Repository) -> str:
    """Canonical serialization; identical repositories give identical bytes."""
    payload = {
        "version": REPOSITORY_VERSION,
        "concepts": [definition.to_record() for definition in repo.learned()],
    }
    return json.dumps(payload, indent=2) + "\n"


def repository_from_text(text: str) -> Repository:
    payload = json.loads(text)
    version = payload.get("version")
    if version != REPOSITORY_VERSION:
        raise ValueError(f"unsupported repository version: {version!r}")
    repo = Repository()
    for record in payload.get("concepts", []):
        repo.add(definition_from_record(record))
    return repo


def save_repository(repo: Repository, path: str | Path) -> None:
    """Write-new-then-rename so a crash can never leave a half-written file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = repository_to_text(repo)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_repository(path: str | Path) -> Repository:
    path = Path(path)
    if not path.exists():
        return Repository()
    return repository_from_text(path.read_text())
