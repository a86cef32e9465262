# File: yieldpoint/wellformed.py
"""Static well-formedness checks run after parsing."""
from __future__ import annotations

import logging
from typing import List, Set

from yieldpoint.astutil import walk
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import WellFormednessError
from yieldpoint.syntax import (
    PREDEFINED_CLASSES,
    Await,
    Call,
    CallStmt,
    Labeled,
    Method,
    ProcessClass,
    Program,
)

logger = logging.getLogger(__name__)

# Methods of the predefined classes, callable in either position.
PREDEFINED_METHODS = frozenset({
    "add", "del", "contains", "size", "min", "max", "length", "start", "is_empty",
})


def _labels_in(c: ProcessClass) -> Set[str]:
    out: Set[str] = set()
    for m in c.methods:
        for n in walk(m):
            if isinstance(n, Await) and n.label:
                out.add(n.label)
            elif isinstance(n, Labeled):
                out.add(n.label)
    return out


def _methods(p: Program) -> List[Method]:
    return [m for c in p.classes for m in c.methods] + [p.main]


def check_well_formed(p: Program) -> List[Diagnostic]:
    """Every violated rule yields one diagnostic; an empty list means well formed."""
    diags: List[Diagnostic] = []

    if p.main.name != "main":
        diags.append(Diagnostic.at(p.main.span, "wf1",
                                   f"rule 1: the top-level method must be named main, not {p.main.name}"))

    seen: Set[str] = set()
    for c in p.classes:
        if c.name in PREDEFINED_CLASSES:
            diags.append(Diagnostic.at(c.span, "wf-predefined",
                                       f"class {c.name} is predefined and may not be redefined"))
        if c.name in seen:
            diags.append(Diagnostic.at(c.span, "wf-duplicate", f"class {c.name} is defined twice"))
        seen.add(c.name)
    known = seen | set(PREDEFINED_CLASSES)
    for c in p.classes:
        if c.superclass not in known:
            diags.append(Diagnostic.at(c.span, "wf-superclass",
                                       f"class {c.name} extends unknown class {c.superclass}"))

    for c in p.classes:
        labels = _labels_in(c)
        for r in c.receives:
            for label in r.labels or ():
                if label not in labels:
                    diags.append(Diagnostic.at(
                        r.span, "wf2",
                        f"rule 2: label {label} in 'at' clause labels no statement of class {c.name}"))

    defs = {m.name for m in _methods(p) if m.kind == "def"}
    defuns = {m.name for m in _methods(p) if m.kind == "defun"}
    for m in _methods(p):
        for n in walk(m):
            if isinstance(n, CallStmt) and n.method in defuns - defs - PREDEFINED_METHODS:
                diags.append(Diagnostic.at(n.span, "wf3",
                                           f"rule 3: defun method {n.method} invoked as a statement"))
            elif isinstance(n, Call) and n.method in defs - defuns - PREDEFINED_METHODS:
                diags.append(Diagnostic.at(n.span, "wf3",
                                           f"rule 3: def method {n.method} invoked inside an expression"))

    if diags:
        logger.info("well-formedness: %d violation(s)", len(diags))
    return diags


def require_well_formed(p: Program) -> Program:
    """Raise WellFormednessError unless check_well_formed() is empty."""
    diags = check_well_formed(p)
    if any(d.severity == "error" for d in diags):
        raise WellFormednessError(diags)
    return p
