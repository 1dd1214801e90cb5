"""Append-only, line-delimited event logs for the screening service.

One JSONL file per entity family; the service replays them at startup to
rebuild its in-memory state. Events are written before memory is mutated,
so a failed write leaves the service state untouched.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import StorageError

FAMILIES = ("corpus", "labels", "triage", "runs")


class EventStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create state directory {self.root}: {exc}") from exc

    def _path(self, family: str) -> Path:
        if family not in FAMILIES:
            raise ValueError(f"unknown event family {family!r}")
        return self.root / f"{family}.jsonl"

    def append(self, family: str, event: dict) -> None:
        line = json.dumps(event, ensure_ascii=False)
        try:
            with open(self._path(family), "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
        except OSError as exc:
            raise StorageError(f"cannot append to {family} log: {exc}") from exc

    def read_all(self, family: str) -> list[dict]:
        path = self._path(family)
        if not path.exists():
            return []
        events = []
        try:
            with open(path, "r", encoding="utf-8") as handle:
                for lineno, line in enumerate(handle, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        events.append(json.loads(line))
                    except json.JSONDecodeError as exc:
                        raise StorageError(
                            f"{path} line {lineno}: corrupt event ({exc})"
                        ) from exc
        except OSError as exc:
            raise StorageError(f"cannot read {family} log: {exc}") from exc
        return events
