# File: yieldpoint/incrementalize/plan.py
"""Choosing the stored results that replace the aggregates of a converted conjunct."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

from yieldpoint.astutil import self_fields_read, walk
from yieldpoint.desugar.fresh import FreshNames
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import IncrementalizationAborted
from yieldpoint.incrementalize.analysis import ClassFacts, class_statements, is_self_field
from yieldpoint.incrementalize.model import InvariantDef
from yieldpoint.printer import expr_to_str
from yieldpoint.qrewrite import QueryExpr, UpdateProfile
from yieldpoint.syntax import (
    HISTORIES,
    TRUE,
    Aggregate,
    Assign,
    Binary,
    Call,
    Comprehension,
    EmptySet,
    Expr,
    Iterator,
    Lit,
    NewAssign,
    Unary,
    and_,
    not_,
    self_field,
)

logger = logging.getLogger(__name__)

InvariantKey = Tuple[str, Expr]


def flatten_domains(c: Comprehension) -> Comprehension:
    """Merge a filter-form domain `{P in s | e}` iterated with the same pattern P into the outer comprehension."""
    its: List[Iterator] = []
    conds: List[Expr] = []
    for it in c.iterators:
        d = it.domain
        if isinstance(d, Comprehension):
            d = flatten_domains(d)
            if not (d.elem is None and len(d.iterators) == 1 and d.iterators[0].pattern == it.pattern):
                raise _unsupported(c, f"comprehension domain {expr_to_str(d)} cannot be maintained")
            its.append(d.iterators[0])
            if d.cond != TRUE:
                conds.append(d.cond)
        else:
            its.append(it)
    if not conds:
        return c
    cond = and_(*conds) if c.cond == TRUE else and_(*conds, c.cond)
    return Comprehension(c.elem, tuple(its), cond, span=c.span)


def _unsupported(e: Expr, message: str) -> IncrementalizationAborted:
    return IncrementalizationAborted(message, Diagnostic.at(e.span, "inc-unsupported", message, severity="warning"))


@dataclass
class PlannedQuery:
    """A converted conjunct with its aggregates replaced by stored fields."""
    query: QueryExpr
    converted: Expr
    replacement: Expr
    new: List[InvariantDef] = field(default_factory=list)
    planned: Dict[InvariantKey, InvariantDef] = field(default_factory=dict)


class InvariantPlanner:
    """Plans one conjunct, reusing results already stored for the same class."""

    def __init__(self, facts: ClassFacts, profile: UpdateProfile, fresh: FreshNames,
                 existing: Dict[InvariantKey, InvariantDef]):
        self.facts = facts
        self.profile = profile
        self.fresh = fresh
        self.known = dict(existing)
        self.new: List[InvariantDef] = []

    @property
    def cls(self) -> str:
        return self.facts.cls.name

    def _get(self, kind: str, query: Expr, make: Callable[[], InvariantDef]) -> InvariantDef:
        key = (kind, query)
        if key not in self.known:
            inv = make()
            self.known[key] = inv
            self.new.append(inv)
        return self.known[key]

    def _define(self, kind: str, name: str, query: Expr, **kw) -> InvariantDef:
        return InvariantDef(self.cls, name, kind, query, frozenset(self_fields_read(query)), **kw)

    # -- the stored kinds ------------------------------------------------#
    def stored_set(self, c: Comprehension) -> InvariantDef:
        def make() -> InvariantDef:
            r, k = self.fresh("res"), self.fresh("count")
            inv = self._define("set", r, c, count=k)
            self.known[("set", c)] = inv
            self.new.append(inv)
            self._get("count", Aggregate("size", c), lambda: self._define("count", k, Aggregate("size", c), source=r))
            return inv
        key = ("set", c)
        return self.known[key] if key in self.known else make()

    def count_of(self, x: Expr) -> Expr:
        if isinstance(x, Comprehension):
            return self_field(self.stored_set(flatten_domains(x)).count)
        self._require_field(x)
        query = Aggregate("size", x)
        return self_field(self._get("count", query, lambda: self._define("count", self.fresh("count"), query)).field)

    def ordered(self, x: Expr, op: str) -> InvariantDef:
        if isinstance(x, Comprehension):
            x = flatten_domains(x)
            if len(x.iterators) != 1:
                raise _unsupported(x, f"{op} over a join {expr_to_str(x)} cannot be maintained")
        else:
            self._require_field(x)
        return self._get("ds", x, lambda: self._define("ds", self.fresh("ds"), x, op=op))

    def extreme(self, x: Expr, op: str) -> Expr:
        query = Aggregate(op, x)
        inv = self._get("extreme", query, lambda: self._define("extreme", self.fresh(op), query, op=op))
        return self_field(inv.field)

    def total(self, x: Expr) -> Expr:
        if isinstance(x, Comprehension) or (is_self_field(x) and x.name in HISTORIES):
            raise _unsupported(x, f"sum over {expr_to_str(x)} cannot be maintained")
        self._require_field(x)
        query = Aggregate("sum", x)
        return self_field(self._get("sum", query, lambda: self._define("sum", self.fresh("sum"), query)).field)

    def _require_field(self, x: Expr) -> None:
        if not is_self_field(x):
            raise _unsupported(x, f"aggregate over {expr_to_str(x)}, which is not a field of the process")

    # -- deciding ---------------------------------------------------------#
    def additions_only(self, x: Expr) -> bool:
        """`x` is a field that only grows and is only ever created empty before start."""
        if not is_self_field(x) or self.profile.updates(x).may_delete:
            return False
        for path, s in class_statements(self.facts.cls):
            if isinstance(s, (Assign, NewAssign)) and is_self_field(s.target, x.name):
                if isinstance(s, Assign) or not self.facts.in_prestart(path):
                    return False
        return True

    def uses_ds(self, e: Expr) -> Dict[Expr, str]:
        """Arguments of the max and min aggregates that need an ordered multiset, with the aggregate."""
        return {n.arg: n.op for n in walk(e)
                if isinstance(n, Aggregate) and n.op in ("max", "min") and not self.additions_only(n.arg)}

    def replace(self, e: Expr) -> Expr:
        ds_args = self.uses_ds(e)

        def go(x: Expr) -> Expr:
            if isinstance(x, Binary) and x.op in ("is", "ne") and EmptySet() in (x.left, x.right):
                coll = x.left if isinstance(x.right, EmptySet) else x.right
                if coll in ds_args:
                    test = Call(self_field(self.ordered(coll, ds_args[coll]).field), "is_empty", ())
                    return test if x.op == "is" else not_(test)
                return Binary(x.op, self.count_of(coll), Lit(0))
            if isinstance(x, Aggregate):
                if any(isinstance(n, Aggregate) for n in walk(x.arg)):
                    raise _unsupported(x, f"nested aggregate in {expr_to_str(x)}")
                if x.op == "size":
                    return self.count_of(x.arg)
                if x.op == "sum":
                    return self.total(x.arg)
                if x.arg in ds_args:
                    return Call(self_field(self.ordered(x.arg, x.op).field), x.op, ())
                return self.extreme(x.arg, x.op)
            if isinstance(x, Binary):
                return Binary(x.op, go(x.left), go(x.right), span=x.span)
            if isinstance(x, Unary):
                return Unary(x.op, go(x.operand), span=x.span)
            return x

        return go(e)


def plan_query(q: QueryExpr, converted: Expr, facts: ClassFacts, profile: UpdateProfile,
               fresh: FreshNames, existing: Dict[InvariantKey, InvariantDef]) -> PlannedQuery:
    """Replace every aggregate and emptiness test of `converted` by a stored field.

    `existing` is not modified; the caller commits `planned` once the
    conjunct's maintenance code has been built.
    """
    planner = InvariantPlanner(facts, profile, fresh, existing)
    replacement = planner.replace(converted)
    logger.debug("%s becomes %s with %d new stored result(s)", q, expr_to_str(replacement), len(planner.new))
    return PlannedQuery(q, converted, replacement, planner.new, planner.known)
