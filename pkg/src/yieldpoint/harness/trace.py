# File: yieldpoint/harness/trace.py
"""Trace records, JSON-lines files and trace comparison."""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from yieldpoint.errors import TraceError
from yieldpoint.runtime.machine import Transition
from yieldpoint.values import Address, is_value, to_jsonable

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Rules whose events a program's environment can observe.
OBSERVABLE_RULES = frozenset({"send", "output"})


@dataclass(frozen=True)
class TraceEvent:
    step: int
    rule: str
    process: Optional[str]
    payload: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"step": self.step, "rule": self.rule, "process": self.process, "payload": self.payload}

    @classmethod
    def from_json(cls, data: dict) -> "TraceEvent":
        try:
            return cls(int(data["step"]), str(data["rule"]), data.get("process"), dict(data.get("payload") or {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceError(f"malformed trace event {data!r}") from exc


def payload_json(payload: Dict[str, Any], tags: Tuple[str, ...]) -> Dict[str, Any]:
    out = {}
    for k, v in payload.items():
        if v is None or isinstance(v, str):
            out[k] = v
        elif is_value(v):
            out[k] = to_jsonable(v, tags)
        else:
            out[k] = str(v)
    return out


def program_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass
class Trace:
    header: Dict[str, Any] = field(default_factory=dict)
    events: List[TraceEvent] = field(default_factory=list)

    def record(self, t: Transition, tags: Tuple[str, ...]) -> TraceEvent:
        ev = TraceEvent(len(self.events), t.rule, str(t.process) if isinstance(t.process, Address) else None,
                        payload_json(t.payload, tags))
        self.events.append(ev)
        return ev

    # -- files ------------------------------------------------------------#
    def to_jsonl(self) -> str:
        lines = [json.dumps({"schema": SCHEMA_VERSION, **self.header}, sort_keys=True)]
        lines.extend(json.dumps(e.to_json(), sort_keys=True) for e in self.events)
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        lines = [l for l in text.splitlines() if l.strip()]
        if not lines:
            raise TraceError("empty trace")
        try:
            records = [json.loads(l) for l in lines]
        except json.JSONDecodeError as exc:
            raise TraceError(f"trace is not JSON lines: {exc}") from exc
        header = records[0]
        if not isinstance(header, dict) or header.get("schema") != SCHEMA_VERSION:
            raise TraceError(f"unsupported trace schema {header.get('schema') if isinstance(header, dict) else None!r}")
        events = [TraceEvent.from_json(r) for r in records[1:]]
        for i, e in enumerate(events):
            if e.step != i:
                raise TraceError(f"trace steps are not dense at line {i + 2}")
        header = {k: v for k, v in header.items() if k != "schema"}
        return cls(header, events)

    @classmethod
    def read(cls, path: str | Path) -> "Trace":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise TraceError(f"cannot read trace {path}: {exc}") from exc
        return cls.from_jsonl(text)

    # -- views ------------------------------------------------------------#
    def outputs(self) -> List[TraceEvent]:
        return [e for e in self.events if e.rule == "output"]

    def sends(self) -> List[TraceEvent]:
        return [e for e in self.events if e.rule == "send"]


# ---------------------------------------------------------------------------#
# Comparison

def _observable(events: Iterable[TraceEvent]) -> List[tuple]:
    return [(e.rule, e.process, json.dumps(e.payload, sort_keys=True))
            for e in events if e.rule in OBSERVABLE_RULES]


def _outputs(events: Iterable[TraceEvent]) -> List[tuple]:
    return [(e.process, json.dumps(e.payload, sort_keys=True)) for e in events if e.rule == "output"]


def _everything(events: Iterable[TraceEvent]) -> List[tuple]:
    return [(e.rule, e.process, json.dumps(e.payload, sort_keys=True)) for e in events]


PROJECTIONS = {"observable": _observable, "outputs": _outputs, "all": _everything}


@dataclass(frozen=True)
class TraceDiff:
    equal: bool
    index: Optional[int] = None
    left: Optional[tuple] = None
    right: Optional[tuple] = None

    def describe(self) -> str:
        if self.equal:
            return "traces are equal"
        return f"first divergence at projected event {self.index}: {self.left} != {self.right}"


def diff_traces(t1: Trace, t2: Trace, projection: str = "observable") -> TraceDiff:
    """Compare two traces under a named projection."""
    try:
        project = PROJECTIONS[projection]
    except KeyError:
        raise TraceError(f"unknown projection {projection!r}; expected one of {sorted(PROJECTIONS)}") from None
    a, b = project(t1.events), project(t2.events)
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return TraceDiff(False, i, x, y)
    if len(a) != len(b):
        i = min(len(a), len(b))
        return TraceDiff(False, i, a[i] if i < len(a) else None, b[i] if i < len(b) else None)
    return TraceDiff(True)
