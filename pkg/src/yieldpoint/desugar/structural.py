# File: yieldpoint/desugar/structural.py
"""Structural desugaring: everything that does not touch query expressions.

After this layer every field access names its object explicitly, every
``await`` carries a label, wildcard patterns are fresh variables and the
``n new C`` / ``x = {}`` shorthands are gone. Await conditions keep their
query form, which is what the optimizer consumes.
"""
from __future__ import annotations

import dataclasses
import logging
from typing import FrozenSet, List, Optional

from yieldpoint.astutil import flatten_seqs, map_children, pattern_vars, transform
from yieldpoint.desugar.fresh import FreshNames
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import DesugarError
from yieldpoint.syntax import (
    SELF,
    Assign,
    Await,
    AwaitClause,
    Binary,
    Call,
    CallStmt,
    Comprehension,
    EmptySet,
    Expr,
    Field,
    For,
    ForTuple,
    Iterator,
    Labeled,
    Lit,
    Method,
    NewAssign,
    NewMany,
    Node,
    PEq,
    PTuple,
    PVar,
    PWild,
    Pattern,
    Program,
    Quant,
    ReceiveDef,
    ReceivePattern,
    Skip,
    TRUE,
    Var,
    While,
    seq,
)
from yieldpoint.wellformed import PREDEFINED_METHODS

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------#
# Implicit self

class _Resolver:
    """Rewrites unbound names into fields of `self`."""

    def expr(self, e: Expr, bound: FrozenSet[str]) -> Expr:
        if isinstance(e, Var):
            if e.name in bound:
                return e
            return Field(SELF, e.name, span=e.span)
        if isinstance(e, Call) and e.target is None:
            return Call(SELF, e.method, tuple(self.expr(a, bound) for a in e.args), span=e.span)
        if isinstance(e, (Quant, Comprehension)):
            inner = bound
            iters = []
            for it in e.iterators:
                iters.append(Iterator(self.pattern(it.pattern, inner),
                                      self.expr(it.domain, inner), span=it.span))
                inner = inner | frozenset(pattern_vars(it.pattern))
            changes = {"iterators": tuple(iters), "cond": self.expr(e.cond, inner)}
            if isinstance(e, Comprehension) and e.elem is not None:
                changes["elem"] = self.expr(e.elem, inner)
            return dataclasses.replace(e, **changes)
        return map_children(e, lambda c: self.expr(c, bound) if isinstance(c, Expr) else c)

    def pattern(self, p: Pattern, bound: FrozenSet[str]) -> Pattern:
        if isinstance(p, PEq):
            return PEq(self.expr(p.expr, bound), span=p.span)
        if isinstance(p, PTuple):
            return PTuple(tuple(self.pattern(i, bound) for i in p.items), span=p.span)
        return p

    def target(self, t: Expr, bound: FrozenSet[str]) -> Expr:
        if isinstance(t, Var):
            if t.name in bound:
                raise DesugarError(
                    f"cannot assign to parameter or bound variable {t.name}",
                    Diagnostic.at(t.span, "desugar-assign", f"assignment to bound name {t.name}"))
            return Field(SELF, t.name, span=t.span)
        return self.expr(t, bound)

    def stmt(self, s, bound: FrozenSet[str]):
        if isinstance(s, (Assign, NewAssign, NewMany)):
            changes = {"target": self.target(s.target, bound)}
            if isinstance(s, Assign):
                changes["value"] = self.expr(s.value, bound)
            if isinstance(s, NewMany):
                changes["count"] = self.expr(s.count, bound)
            return dataclasses.replace(s, **changes)
        if isinstance(s, CallStmt):
            target = SELF if s.target is None else self.expr(s.target, bound)
            return CallStmt(target, s.method, tuple(self.expr(a, bound) for a in s.args), span=s.span)
        if isinstance(s, For):
            it = s.iterator
            new_it = Iterator(self.pattern(it.pattern, bound), self.expr(it.domain, bound), span=it.span)
            inner = bound | frozenset(pattern_vars(it.pattern))
            return For(new_it, self.stmt(s.body, inner), span=s.span)
        if isinstance(s, ForTuple):
            return dataclasses.replace(s, body=self.stmt(s.body, bound | {s.var}))
        return map_children(s, lambda c: self.expr(c, bound) if isinstance(c, Expr) else self.stmt(c, bound))


def _resolve_method(m: Method) -> Method:
    bound = frozenset(m.params) | {"self"}
    r = _Resolver()
    body = r.expr(m.body, bound) if m.kind == "defun" else r.stmt(m.body, bound)
    return dataclasses.replace(m, body=body)


def _resolve_receive(d: ReceiveDef) -> ReceiveDef:
    bound = {"self"}
    for rp in d.patterns:
        bound.update(pattern_vars(rp.pattern))
        if rp.sender:
            bound.add(rp.sender)
    bound = frozenset(bound)
    r = _Resolver()
    pats = tuple(ReceivePattern(r.pattern(rp.pattern, bound), rp.sender, span=rp.span)
                 for rp in d.patterns)
    return dataclasses.replace(d, patterns=pats, body=r.stmt(d.body, bound))


def resolve_implicit_self(p: Program) -> Program:
    classes = tuple(
        dataclasses.replace(c, methods=tuple(_resolve_method(m) for m in c.methods),
                            receives=tuple(_resolve_receive(d) for d in c.receives))
        for c in p.classes)
    return dataclasses.replace(p, classes=classes, main=_resolve_method(p.main))


# ---------------------------------------------------------------------------#
# Statement shorthands

def _expand_shorthands(node: Node, fresh: FreshNames) -> Node:
    def rewrite(n: Node) -> Node:
        if isinstance(n, Assign) and isinstance(n.value, EmptySet):
            return NewAssign(n.target, "Set", span=n.span)
        if isinstance(n, NewMany):
            counter = Field(SELF, fresh("k"))
            item = Field(SELF, fresh("t"))
            body = seq(NewAssign(item, n.cls),
                       CallStmt(n.target, "add", (item,)),
                       Assign(counter, Binary("minus", counter, Lit(1))))
            return seq(NewAssign(n.target, "Set", span=n.span),
                       Assign(counter, n.count),
                       While(Binary("gt", counter, Lit(0)), body))
        return n
    return transform(node, rewrite)


# ---------------------------------------------------------------------------#
# Labels

def _label_stmts(node: Node, fresh: FreshNames, generated: List[str]) -> Node:
    def rewrite(n: Node) -> Node:
        if isinstance(n, Labeled):
            marker = Await(n.label, (AwaitClause(TRUE, Skip()),), None, span=n.span)
            return seq(marker, n.stmt)
        if isinstance(n, Await) and not n.label:
            label = fresh("l")
            generated.append(label)
            return dataclasses.replace(n, label=label)
        return n
    return transform(node, rewrite)


def normalize_labels(p: Program, fresh: Optional[FreshNames] = None) -> Program:
    """Expand labels on non-await statements and name every anonymous await.

    A fresh await label joins every explicit ``at`` list of its class, so
    handlers restricted to named yield points also run there.
    """
    fresh = fresh or FreshNames.for_program(p)
    classes = []
    for c in p.classes:
        generated: List[str] = []
        methods = tuple(_label_stmts(m, fresh, generated) for m in c.methods)
        receives = tuple(_label_stmts(d, fresh, generated) for d in c.receives)
        if generated:
            receives = tuple(
                d if d.labels is None
                else dataclasses.replace(d, labels=d.labels + tuple(l for l in generated if l not in d.labels))
                for d in receives)
        classes.append(dataclasses.replace(c, methods=methods, receives=receives))
    main = _label_stmts(p.main, fresh, [])
    return dataclasses.replace(p, classes=tuple(classes), main=main)


# ---------------------------------------------------------------------------#
# Wildcards

def eliminate_wildcards(p: Program, fresh: Optional[FreshNames] = None) -> Program:
    """Replace every `_` in a pattern by a variable used nowhere else."""
    fresh = fresh or FreshNames.for_program(p)

    def rewrite(n: Node) -> Node:
        if isinstance(n, PWild):
            return PVar(fresh("w"), span=n.span)
        return n
    return transform(p, rewrite)


# ---------------------------------------------------------------------------#
# Remote method invocation

def _check_calls(body: Node, where: str, allow_before_start: bool) -> None:
    started = False

    def visit(n: Node) -> None:
        nonlocal started
        if isinstance(n, CallStmt):
            if n.method == "start":
                started = True
            elif n.target != SELF and n.method not in PREDEFINED_METHODS:
                if not (allow_before_start and not started):
                    msg = (f"call of {n.method} on another object in {where}: "
                           "method invocation on a started process is not supported")
                    raise DesugarError(msg, Diagnostic.at(n.span, "desugar-rmi", msg))
        for field_ in dataclasses.fields(n):
            val = getattr(n, field_.name)
            if isinstance(val, Node):
                visit(val)
            elif isinstance(val, tuple):
                for item in val:
                    if isinstance(item, Node):
                        visit(item)

    visit(body)


def reject_remote_calls(p: Program) -> None:
    for c in p.classes:
        for m in c.methods:
            _check_calls(m.body, f"{c.name}.{m.name}", allow_before_start=False)
        for d in c.receives:
            _check_calls(d.body, f"a receive definition of {c.name}", allow_before_start=False)
    _check_calls(p.main.body, "main", allow_before_start=True)


# ---------------------------------------------------------------------------#
def desugar_structure(p: Program, fresh: Optional[FreshNames] = None) -> Program:
    """Implicit self, shorthands, labels and wildcards; rejects remote calls."""
    fresh = fresh or FreshNames.for_program(p)
    p = resolve_implicit_self(p)
    p = _expand_shorthands(p, fresh)
    p = normalize_labels(p, fresh)
    p = eliminate_wildcards(p, fresh)
    p = flatten_seqs(p)
    reject_remote_calls(p)
    logger.info("structural desugaring done (%d fresh names)", fresh.counter)
    return p
