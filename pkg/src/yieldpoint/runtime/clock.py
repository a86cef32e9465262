# File: yieldpoint/runtime/clock.py
"""Lamport logical clocks.

Every process owns a hidden counter. `logical_clock()` advances it and
returns the new value; handling a message whose kind is listed in the
configuration's `stamps` manifest moves it past the carried timestamp.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from yieldpoint.errors import StuckError
from yieldpoint.runtime.state import GlobalState
from yieldpoint.syntax import Configuration
from yieldpoint.values import Address, Value, tag_value


@dataclass(frozen=True)
class ClockEvent:
    """`read` is a logical_clock() call, `receive` the handling of a message."""
    kind: str
    process: Address
    stamp: Optional[int] = None
    value: Optional[int] = None


def stamp_positions(conf: Configuration, tags: Iterable[str]) -> Dict[int, int]:
    """Interned tag -> 1-based component carrying the timestamp."""
    tags = tuple(tags)
    out: Dict[int, int] = {}
    for name, pos in conf.stamps:
        if name in tags:
            out[tag_value(tags.index(name))] = pos
    return out


def message_stamp(m: Value, positions: Dict[int, int]) -> Optional[int]:
    if not isinstance(m, tuple) or not m:
        return None
    pos = positions.get(m[0]) if isinstance(m[0], int) and not isinstance(m[0], bool) else None
    if pos is None or pos > len(m):
        return None
    ts = m[pos - 1]
    if isinstance(ts, bool) or not isinstance(ts, int):
        return None
    return ts


def logical_clock_ops(state: GlobalState, event: ClockEvent, enabled: bool = True) -> Optional[int]:
    """Apply one clock event to `state`; a read returns the new clock value."""
    if not enabled:
        raise StuckError("logical_clock() needs 'lamport' in the configuration")
    a = event.process
    cur = state.clocks.get(a, 0)
    if event.kind == "read":
        state.clocks[a] = cur + 1
        return cur + 1
    if event.kind == "receive":
        if event.stamp is not None:
            state.clocks[a] = max(cur, event.stamp) + 1
        return None
    raise ValueError(f"unknown clock event {event.kind}")


def check_clock_recurrence(events: Iterable[ClockEvent]) -> List[str]:
    """Replay clock events and report every read that breaks the Lamport recurrence.

    Reads must carry the value they returned; an empty list means the
    recurrence held throughout.
    """
    model: Dict[Address, int] = {}
    problems: List[str] = []
    for i, ev in enumerate(events):
        cur = model.get(ev.process, 0)
        if ev.kind == "read":
            expected = cur + 1
            if ev.value != expected:
                problems.append(f"event {i}: {ev.process} read {ev.value}, expected {expected}")
            model[ev.process] = expected
        elif ev.kind == "receive" and ev.stamp is not None:
            model[ev.process] = max(cur, ev.stamp) + 1
    return problems
