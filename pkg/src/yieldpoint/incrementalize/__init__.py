# File: yieldpoint/incrementalize/__init__.py
"""Turning expensive await conditions into stored results kept up to date.

`incrementalize_with_ledger` converts every quantified or aggregate await
conjunct, stores the aggregates it needs in fresh fields of the process,
inserts code maintaining them at every update of what they read, and
stops recording histories nothing reads afterwards. A conjunct whose
conversion or maintenance fails is left as written and reported in the
ledger's diagnostics.
"""
from __future__ import annotations

import dataclasses
import logging
from typing import Dict, List, Optional, Tuple

from yieldpoint.desugar import desugar_structure
from yieldpoint.desugar.fresh import FreshNames
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import IncrementalizationAborted, UnsupportedQueryError
from yieldpoint.incrementalize.analysis import (
    ClassFacts,
    build_profile,
    find_expensive_queries,
    find_updates,
    site_order,
)
from yieldpoint.incrementalize.history import eliminate_dead_history
from yieldpoint.incrementalize.maintain import apply_clock_rules, apply_table5, maintain, static_match
from yieldpoint.incrementalize.model import InvariantDef, Ledger, MaintenanceSnippet, UpdateSite
from yieldpoint.incrementalize.plan import InvariantKey, plan_query
from yieldpoint.incrementalize.rewrite import Edits, apply_edits
from yieldpoint.printer import pattern_to_str
from yieldpoint.qrewrite import select_conversion
from yieldpoint.syntax import TRUE, Comprehension, Iterator, Program, PVar

logger = logging.getLogger(__name__)


def incrementalize_with_ledger(p: Program, fresh: Optional[FreshNames] = None) -> Tuple[Program, Ledger]:
    """The incrementalized program and a record of what was stored, where it is maintained and why."""
    original = p
    fresh = fresh or FreshNames.for_program(p)
    p = desugar_structure(p, fresh)
    ledger = Ledger()
    edits = Edits()
    stored: Dict[str, Dict[InvariantKey, InvariantDef]] = {}
    handlers: Dict[str, int] = {}

    for q in find_expensive_queries(p):
        c = p.cls(q.cls)
        facts = ClassFacts.of(p, c)
        profile = build_profile(p, c)
        try:
            choice = select_conversion(q, profile)
        except UnsupportedQueryError as exc:
            ledger.diagnostics.append(Diagnostic.at(q.expr.span, "inc-convert", str(exc), severity="warning"))
            logger.warning("left %s unchanged: %s", q, exc)
            continue
        ledger.conversions.append(choice.to_json())
        try:
            planned = plan_query(q, choice.result, facts, profile, fresh, stored.get(c.name, {}))
            sites = sorted(find_updates(p, q), key=site_order) if planned.new else []
            base = len(c.receives) + handlers.get(c.name, 0)
            mplan = maintain(facts, fresh, sites, planned.new, edits.hoists, base)
        except IncrementalizationAborted as exc:
            ledger.diagnostics.append(exc.diagnostic or Diagnostic.at(q.expr.span, "inc-abort", str(exc),
                                                                      severity="warning"))
            logger.warning("left %s unchanged: %s", q, exc)
            continue

        stored[c.name] = planned.planned
        ledger.invariants.extend(planned.new)
        names = {i.field: i for i in planned.new}
        ledger.sites.extend(dataclasses.replace(s, invariants=tuple(f for f, i in names.items() if s.field in i.deps))
                            for s in sites)
        _commit(c.name, mplan, edits, ledger)
        handlers[c.name] = handlers.get(c.name, 0) + len(mplan.handlers)
        edits.replace_conjunct((c.name,) + tuple(q.path), q.clause, q.index, planned.replacement)

    if not ledger.invariants:
        logger.info("nothing to incrementalize")
        return original, ledger
    out = apply_edits(p, edits)
    out, ledger.eliminated = eliminate_dead_history(out)
    logger.info("stored %d result(s) maintained at %d site(s)", len(ledger.invariants), len(ledger.snippets))
    return out, ledger


def _commit(cls: str, mplan, edits: Edits, ledger: Ledger) -> None:
    for snip in mplan.snippets:
        ledger.snippets.append(snip)
        if snip.site.kind != "receive-append":
            edits.insert((cls,) + tuple(snip.site.path), snip.before, snip.after)
    for owner, handler in mplan.handlers:
        edits.handlers.setdefault(owner, []).append(handler)
        pats = ", ".join(pattern_to_str(rp.pattern) for rp in handler.patterns)
        ledger.handlers.append(f"{owner}: receive {pats}")
    edits.hoists.update(mplan.hoists)


def incrementalize(p: Program, fresh: Optional[FreshNames] = None) -> Program:
    return incrementalize_with_ledger(p, fresh)[0]


def stored_invariants(ledger: Ledger) -> List[InvariantDef]:
    """Ledger entries in the form the assertion-mode check compares against."""
    out = []
    for inv in ledger.invariants:
        if inv.kind == "ds" and not isinstance(inv.query, Comprehension):
            elements = Comprehension(None, (Iterator(PVar("__e0"), inv.query),), TRUE)
            inv = dataclasses.replace(inv, query=elements)
        out.append(inv)
    return out


__all__ = [
    "ClassFacts",
    "Edits",
    "InvariantDef",
    "Ledger",
    "MaintenanceSnippet",
    "UpdateSite",
    "apply_clock_rules",
    "apply_edits",
    "apply_table5",
    "build_profile",
    "eliminate_dead_history",
    "find_expensive_queries",
    "find_updates",
    "incrementalize",
    "incrementalize_with_ledger",
    "maintain",
    "static_match",
    "stored_invariants",
]
