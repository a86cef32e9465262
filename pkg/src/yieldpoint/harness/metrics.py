# File: yieldpoint/harness/metrics.py
"""Run metrics and the mutual-exclusion checks over traces.

Critical sections are recognised from ``output`` events whose value is
``('enter', c, p)`` or ``('exit', c, p)``; messages from ``send`` events.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from yieldpoint.errors import TraceError
from yieldpoint.harness.trace import SCHEMA_VERSION, Trace, TraceEvent

logger = logging.getLogger(__name__)

# Message kinds that serve one critical-section request.
REQUEST_TAGS = ("request", "ack", "release")


@dataclass
class Metrics:
    messages_by_tag: Dict[str, int] = field(default_factory=dict)
    sent_by_process: Dict[str, int] = field(default_factory=dict)
    received_by_process: Dict[str, int] = field(default_factory=dict)
    max_received_length: int = 0
    max_sent_length: int = 0
    await_evaluations: int = 0
    max_inspections: int = 0
    total_inspections: int = 0
    stored_state: int = 0
    cs_entries: int = 0
    transitions: int = 0

    def note_send(self, process: str, message) -> None:
        tag = message[0] if isinstance(message, list) and message and isinstance(message[0], str) else "untagged"
        self.messages_by_tag[tag] = self.messages_by_tag.get(tag, 0) + 1
        self.sent_by_process[process] = self.sent_by_process.get(process, 0) + 1

    def note_handle(self, process: str) -> None:
        self.received_by_process[process] = self.received_by_process.get(process, 0) + 1

    def note_await(self, inspections: int) -> None:
        self.await_evaluations += 1
        self.total_inspections += inspections
        self.max_inspections = max(self.max_inspections, inspections)

    def to_json(self, outcome: Optional[dict] = None) -> str:
        doc = {"schema": SCHEMA_VERSION, **asdict(self)}
        if outcome is not None:
            doc["outcome"] = outcome
        return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------#
# Critical sections

def _marker(e: TraceEvent) -> Optional[Tuple[str, int, str]]:
    v = e.payload.get("value")
    if e.rule != "output" or not isinstance(v, list) or len(v) != 3 or v[0] not in ("enter", "exit"):
        return None
    return v[0], v[1], v[2]


def _pid(p: str) -> int:
    return int(p.lstrip("@p"))


def cs_entries(trace: Trace) -> List[Tuple[int, str]]:
    return [(m[1], m[2]) for m in map(_marker, trace.events) if m is not None and m[0] == "enter"]


@dataclass
class SafetyFairnessReport:
    entries: int = 0
    safety_violations: List[str] = field(default_factory=list)
    fairness_violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.safety_violations and not self.fairness_violations


def check_safety_fairness(trace: Trace) -> SafetyFairnessReport:
    """At most one process inside a critical section; entries in (timestamp, pid) order."""
    report = SafetyFairnessReport()
    holder: Optional[Tuple[int, str]] = None
    last: Optional[Tuple[int, int]] = None
    for e in trace.events:
        m = _marker(e)
        if m is None:
            continue
        kind, c, p = m
        if kind == "enter":
            report.entries += 1
            if holder is not None:
                report.safety_violations.append(
                    f"step {e.step}: {p} enters while {holder[1]} is inside (request {holder[0]})")
            holder = (c, p)
            key = (c, _pid(p))
            if last is not None and key < last:
                report.fairness_violations.append(
                    f"step {e.step}: request ({c}, {p}) served after a later request {last}")
            last = key if last is None or key > last else last
        elif holder is not None and holder[1] == p:
            holder = None
    return report


# ---------------------------------------------------------------------------#
# Message complexity

@dataclass
class MessageComplexity:
    per_request: Dict[Tuple[int, str], int] = field(default_factory=dict)
    by_tag: Dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.by_tag.values())

    def counts(self) -> List[int]:
        return [self.per_request[k] for k in sorted(self.per_request, key=lambda k: (k[0], _pid(k[1])))]


def measure_message_complexity(trace: Trace, per_request: bool = True) -> MessageComplexity:
    """Count request, ack and release messages, attributed to the request they serve.

    A request message names its own request; an ack belongs to the latest
    request of its receiver, a release to the latest request of its sender.
    """
    entries = cs_entries(trace)
    if not entries:
        raise TraceError("trace has no critical-section markers")
    out = MessageComplexity()
    if per_request:
        out.per_request = {(c, p): 0 for c, p in entries}
    current: Dict[str, Tuple[int, str]] = {}
    for e in trace.sends():
        msg = e.payload.get("message")
        if not isinstance(msg, list) or not msg or msg[0] not in REQUEST_TAGS:
            continue
        tag = msg[0]
        out.by_tag[tag] = out.by_tag.get(tag, 0) + 1
        if not per_request:
            continue
        if tag == "request":
            key = (msg[1], msg[2])
            current[e.process] = key
        elif tag == "ack":
            key = current.get(e.payload.get("to"))
        else:
            key = current.get(e.process)
        if key is not None:
            out.per_request[key] = out.per_request.get(key, 0) + 1
    return out
