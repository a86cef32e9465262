# File: yieldpoint/runtime/audit.py
"""Assertion-mode checks run by the harness after transitions."""
from __future__ import annotations

import logging
from typing import Iterable, List, Protocol

from yieldpoint.errors import StuckError
from yieldpoint.runtime.classes import ClassTable
from yieldpoint.runtime.copying import addrs
from yieldpoint.runtime.evaluator import Evaluator, TempSet
from yieldpoint.runtime.machine import split
from yieldpoint.runtime.objects import FieldObj
from yieldpoint.runtime.state import GlobalState
from yieldpoint.syntax import Await, Expr
from yieldpoint.values import Address, addresses_in, value_key, values_equal

logger = logging.getLogger(__name__)


class StoredInvariant(Protocol):
    """What the invariant check needs from a ledger entry."""
    cls: str
    field: str
    query: Expr


def audit_heaps(state: GlobalState) -> List[str]:
    """Heap isolation and heap-type coverage; an empty list means the state is sound."""
    problems: List[str] = []
    owner = {}
    for p, heap in state.heaps.items():
        for a in heap:
            if a.process:
                continue
            if a in owner:
                problems.append(f"{a} is in the heaps of both {owner[a]} and {p}")
            owner[a] = p
    for p, heap in state.heaps.items():
        for a in addrs(tuple(heap), heap):
            if a not in state.heap_type:
                problems.append(f"{a} (reachable from {p}) has no heap type")
            if not a.process and owner.get(a) != p:
                problems.append(f"{a} is reachable from {p} but lives in another heap")
    for q in list(state.channels.values()) + [[m for m, _ in q] for q in state.mq.values()]:
        for m in q:
            for a in addresses_in(m):
                if a not in state.heap_type:
                    problems.append(f"{a} in a message has no heap type")
    return problems


def _same(ev: Evaluator, stored, recomputed) -> bool:
    if isinstance(recomputed, TempSet):
        try:
            mine = ev.collection(stored).linearize()
        except StuckError:
            return False
        return {value_key(x) for x in mine} == {value_key(x) for x in recomputed.obj.linearize()}
    return values_equal(stored, recomputed)


def check_invariants(state: GlobalState, classes: ClassTable,
                     invariants: Iterable[StoredInvariant]) -> List[str]:
    """Recompute every stored result of every process waiting at a yield point.

    Results whose field is not yet assigned, and queries that cannot be
    evaluated yet, are skipped.
    """
    invariants = list(invariants)
    problems: List[str] = []
    for a in state.processes():
        head, _ = split(state.residual[a])
        if not isinstance(head, Await) or a not in state.heaps:
            continue
        heap = state.heaps[a]
        me = heap.get(a)
        if not isinstance(me, FieldObj):
            continue
        for inv in invariants:
            if not classes.extends(state.heap_type[a], inv.cls) or inv.field not in me.fields:
                continue
            ev = Evaluator(classes, state.heap_type, heap)
            try:
                expected = ev.eval(inv.query, {"self": a})
            except StuckError:
                continue
            if not _same(ev, me.fields[inv.field], expected):
                problems.append(f"{a}.{inv.field} at {head.label} differs from its definition")
    return problems


def process_object_size(state: GlobalState, a: Address, skip: Iterable[str] = ()) -> int:
    """Collection elements reachable from the object of process `a`.

    Fields named in `skip` are not followed from the process object.
    """
    heap = state.heaps[a]
    me = heap[a]
    assert isinstance(me, FieldObj)
    skipped = set(skip)
    roots = tuple(v for k, v in sorted(me.fields.items()) if k not in skipped)
    total = 0
    for x in addrs(roots, heap):
        o = heap.get(x)
        if o is not None and not isinstance(o, FieldObj):
            total += o.size()
    return total
