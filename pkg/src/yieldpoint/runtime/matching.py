# File: yieldpoint/runtime/matching.py
"""Matching a handled message against the receive definitions of a class."""
from __future__ import annotations

import logging
from typing import List, Optional

from yieldpoint.astutil import substitute
from yieldpoint.runtime.classes import ClassTable
from yieldpoint.runtime.evaluator import Evaluator
from yieldpoint.runtime.state import HeapType, LocalHeap
from yieldpoint.syntax import Lit, ReceiveDef, Skip, Stmt, seq
from yieldpoint.values import Address, Value

logger = logging.getLogger(__name__)


def match_rcv_def(m: Value, sender: Address, label: str, d: ReceiveDef,
                  ev: Evaluator, self_addr: Address) -> Optional[Stmt]:
    """The body of `d` instantiated by the first of its patterns `m` matches, or None.

    `=x` pattern elements compare against the current value of `x` in the
    receiving process.
    """
    if d.labels is not None and label not in d.labels:
        return None
    env = {"self": self_addr}
    for rp in d.patterns:
        theta = ev.match(rp.pattern, m, env)
        if theta is None:
            continue
        mapping = {k: Lit(v) for k, v in theta.items()}
        if rp.sender:
            mapping[rp.sender] = Lit(sender)
        return substitute(d.body, mapping)
    return None


def receive_at_label(m: Value, sender: Address, label: str, cls: str, h: LocalHeap,
                     ht: HeapType, classes: ClassTable, self_addr: Address) -> List[Stmt]:
    """Instantiated bodies of every receive definition of `cls` that matches, in handler order."""
    ev = Evaluator(classes, ht, h)
    bodies = []
    for d in classes.receive_defs(cls):
        body = match_rcv_def(m, sender, label, d, ev, self_addr)
        if body is not None:
            bodies.append(body)
    return bodies


def match_receive(m: Value, sender: Address, label: str, cls: str, h: LocalHeap,
                  ht: HeapType, classes: ClassTable, self_addr: Address) -> Stmt:
    """The statement to run for `m` at `label`: the handler bodies in sequence, or skip."""
    bodies = receive_at_label(m, sender, label, cls, h, ht, classes, self_addr)
    if not bodies:
        logger.debug("no handler for %r at %s in %s", m, label, cls)
        return Skip()
    return seq(*bodies)
