"""JSON-lines run logs: a config header line, then tagged records.

Field names and ordering are part of the determinism contract; identical
runs must produce byte-identical files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator

from .config import SimConfig

# The kinds that are persisted. step_tick also emits "move" events for live
# broadcast, but per-tick positions would bloat the file; snapshots carry them.
LOGGED_KINDS = ("snapshot", "spawn", "collect", "switch", "warning")


class LogFormatError(ValueError):
    """A log file does not follow the expected line schema."""


def dumps_record(record: dict[str, Any]) -> str:
    return json.dumps(record, separators=(",", ":"))


class LogWriter:
    """Append-only writer; pass path=None to collect records in memory only."""

    def __init__(self, path: str | Path | None, keep_records: bool = False):
        self.path = Path(path) if path is not None else None
        self.records: list[dict] = []
        self._keep = keep_records or self.path is None
        self._fh = None
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open("w", encoding="utf-8")

    def write_config(self, cfg: SimConfig) -> None:
        self.write({"kind": "config", **cfg.to_dict()})

    def write_warning(self, message: str, tick: int, t: float) -> None:
        self.write({"kind": "warning", "tick": tick, "t": t, "message": message})

    def write(self, record: dict[str, Any]) -> None:
        if self._fh is not None:
            self._fh.write(dumps_record(record))
            self._fh.write("\n")
        if self._keep:
            self.records.append(record)

    def write_events(self, events: Iterable[dict[str, Any]]) -> None:
        for ev in events:
            if ev["kind"] in LOGGED_KINDS:
                self.write(ev)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "LogWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass
class LogData:
    """A parsed run log: the resolved config plus its tagged records."""

    config: SimConfig
    records: list[dict]

    def of_kind(self, kind: str) -> Iterator[dict]:
        return (r for r in self.records if r["kind"] == kind)

    @property
    def snapshots(self) -> list[dict]:
        return [r for r in self.records if r["kind"] == "snapshot"]

    def switch_event(self) -> dict | None:
        return next(self.of_kind("switch"), None)


def parse_records(lines: Iterable[str], source: str = "<log>") -> LogData:
    config = None
    records = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise LogFormatError(f"{source}:{lineno}: not valid JSON ({e})") from e
        if not isinstance(rec, dict) or "kind" not in rec:
            raise LogFormatError(f"{source}:{lineno}: record without a kind tag")
        if lineno == 1:
            if rec["kind"] != "config":
                raise LogFormatError(f"{source}: first line must be the config record")
            try:
                config = SimConfig.from_dict(rec)
            except (KeyError, TypeError, ValueError) as e:
                raise LogFormatError(f"{source}: bad config line ({e})") from e
            continue
        if rec["kind"] not in LOGGED_KINDS:
            raise LogFormatError(f"{source}:{lineno}: unknown kind {rec['kind']!r}")
        if not isinstance(rec.get("tick"), int):
            raise LogFormatError(f"{source}:{lineno}: record missing integer tick")
        records.append(rec)
    if config is None:
        raise LogFormatError(f"{source}: empty log")
    return LogData(config=config, records=records)


def read_log(path: str | Path) -> LogData:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return parse_records(fh, source=str(path))
