# File: yieldpoint/incrementalize/maintain.py
"""Maintenance code for stored query results.

For every update site of a stored result this module builds the statements
that keep it equal to its definition: incremental additions and deletions
where the update touches an iterator domain, recomputation otherwise, and
for updates of the histories either code after each `send` or an extra
receive definition.

A binding snippet for adding element `x` to the domain of iterator `i` of
`{e : P1 in s1, ..., Pn in sn | cond}` is built as nested guards, outermost
first:

  1. `x` matches `Pi` (tests only for what cannot be decided statically)
  2. fields the code reads may be undefined here
  3. loops over the other domains whose patterns are not fully bound
  4. the `=` components and `cond`
  5. membership of the bound elements of the remaining domains
  6. (stored sets) whether the new element is already stored
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple, Union

from yieldpoint.astutil import free_vars, pattern_expr, pattern_vars, self_fields_read, substitute, walk
from yieldpoint.desugar.fresh import FreshNames
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import IncrementalizationAborted
from yieldpoint.incrementalize.analysis import ClassFacts, class_statements, conjuncts, is_self_field, stamp_vars_of
from yieldpoint.incrementalize.model import InvariantDef, MaintenanceSnippet, UpdateSite
from yieldpoint.printer import expr_to_str
from yieldpoint.qrewrite import CONST, LINEAR, LOG, cost_str, worst
from yieldpoint.syntax import (
    HISTORIES,
    SELF,
    TRUE,
    Aggregate,
    Assign,
    Binary,
    Call,
    CallStmt,
    ClockRead,
    Comprehension,
    Defined,
    Expr,
    Field,
    For,
    If,
    IsInstance,
    Iterator,
    Lit,
    NewAssign,
    PEq,
    PLit,
    PTuple,
    PVar,
    PWild,
    Pattern,
    ReceiveDef,
    ReceivePattern,
    Send,
    Skip,
    Stmt,
    TupleExpr,
    Unary,
    Var,
    and_,
    not_,
    self_field,
    seq,
)

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------#
# Matching an update against an iterator pattern


@dataclass
class StaticMatch:
    """What is left to test once a pattern is matched against an expression at compile time.

    `shape` tests the structure of the value, `guards` compare parts of it
    with each other, `eqs` pair a part with an `=` component still to be
    instantiated, and `theta` binds the pattern variables.
    """
    shape: List[Expr] = field(default_factory=list)
    guards: List[Expr] = field(default_factory=list)
    eqs: List[Tuple[Expr, Expr]] = field(default_factory=list)
    theta: Dict[str, Expr] = field(default_factory=dict)


def _is(a: Expr, b: Expr) -> Expr:
    return Binary("is", a, b)


def static_match(pattern: Pattern, x: Expr) -> Optional[StaticMatch]:
    """Match `x` against `pattern` as far as its syntax allows; None when it can never match."""
    m = StaticMatch()

    def go(p: Pattern, at: Expr) -> bool:
        if isinstance(p, PWild):
            return True
        if isinstance(p, PVar):
            if p.name in m.theta:
                m.guards.append(_is(at, m.theta[p.name]))
            else:
                m.theta[p.name] = at
            return True
        if isinstance(p, PLit):
            lit = Lit(p.value, p.tag)
            if isinstance(at, Lit):
                return at == lit
            if isinstance(at, TupleExpr):
                return False
            m.shape.append(_is(at, lit))
            return True
        if isinstance(p, PEq):
            m.eqs.append((at, p.expr))
            return True
        if isinstance(at, TupleExpr):
            return len(at.items) == len(p.items) and all(go(pi, xi) for pi, xi in zip(p.items, at.items))
        if isinstance(at, Lit) and not isinstance(at.value, tuple):
            return False
        m.shape.append(Unary("isTuple", at))
        m.shape.append(_is(Unary("len", at), Lit(len(p.items))))
        return all(go(pi, Binary("select", at, Lit(i))) for i, pi in enumerate(p.items, start=1))

    return m if go(pattern, x) else None


def binderize(iterators: Sequence[Iterator], i: int) -> Tuple[Iterator, ...]:
    """Turn `=v` components of iterator `i` into binders of `v` when another iterator binds `v`."""
    others = set()
    for j, it in enumerate(iterators):
        if j != i:
            others.update(pattern_vars(it.pattern))

    def go(p: Pattern) -> Pattern:
        if isinstance(p, PEq) and isinstance(p.expr, Var) and p.expr.name in others:
            return PVar(p.expr.name, span=p.span)
        if isinstance(p, PTuple):
            return PTuple(tuple(go(q) for q in p.items), span=p.span)
        return p

    its = list(iterators)
    its[i] = Iterator(go(its[i].pattern), its[i].domain, span=its[i].span)
    return tuple(its)


def element_of(c: Comprehension) -> Expr:
    return c.elem if c.elem is not None else pattern_expr(c.iterators[0].pattern)


def _projection_only(e: Expr) -> bool:
    return all(isinstance(n, (Var, Lit, TupleExpr)) for n in walk(e))


def covered(c: Comprehension) -> bool:
    """Distinct bindings always produce distinct elements."""
    if c.elem is None:
        return True
    bound = {v for it in c.iterators for v in pattern_vars(it.pattern)}
    return _projection_only(c.elem) and bound <= free_vars(c.elem)


Layer = Union[List[Expr], Iterator]


def guarded(layers: Sequence[Layer], body: Stmt) -> Stmt:
    """Nest `body` in one `if` per non-empty guard list and one `for` per iterator, outermost first."""
    out = body
    for layer in reversed(layers):
        if isinstance(layer, Iterator):
            out = For(layer, out)
        elif layer:
            out = If(and_(*layer), out)
    return out


def _plus(f: Field, amount: Expr) -> Stmt:
    return Assign(f, Binary("plus", f, amount))


def _minus(f: Field, amount: Expr) -> Stmt:
    return Assign(f, Binary("minus", f, amount))


ONE = Lit(1)


# ---------------------------------------------------------------------------#
# Context shared by the snippets of one conjunct

def _abort(site: UpdateSite, message: str) -> IncrementalizationAborted:
    span = site.stmt.span if site.stmt is not None else None
    return IncrementalizationAborted(message, Diagnostic.at(span, "inc-site", message, severity="warning"))


@dataclass
class MaintenancePlan:
    snippets: List[MaintenanceSnippet] = field(default_factory=list)
    handlers: List[Tuple[str, ReceiveDef]] = field(default_factory=list)
    hoists: Dict[tuple, Field] = field(default_factory=dict)


class Maintainer:
    """Builds the snippets of the stored results of one conjunct."""

    def __init__(self, facts: ClassFacts, fresh: FreshNames, hoists: Dict[tuple, Field],
                 handler_base: int, clock_rules: bool = True):
        self.facts = facts
        self.clock_rules = clock_rules
        self.fresh = fresh
        self.hoists = dict(hoists)
        self.plan = MaintenancePlan()
        self.next_handler = handler_base

    # -- definedness ------------------------------------------------------#
    def _starts_fresh(self, site: UpdateSite) -> bool:
        return self.facts.in_prestart(site.path) or site.kind == "history-init"

    def definedness(self, site: UpdateSite, fields: Set[str]) -> Optional[List[Expr]]:
        """Tests that the fields read are defined at the site; None when one cannot be."""
        guards: List[Expr] = []
        for f in sorted(fields):
            if f == site.field:
                continue
            if self._starts_fresh(site) and self.facts.certainly_undefined(f):
                return None
            if self.facts.possibly_undefined(f, site.path):
                guards.append(Defined(self_field(f)))
        return guards

    # -- sequences --------------------------------------------------------#
    def is_sequence(self, name: str) -> bool:
        if name in HISTORIES:
            return True
        return any(isinstance(s, NewAssign) and is_self_field(s.target, name) and s.cls == "Sequence"
                   for _, s in class_statements(self.facts.cls))

    def _not_member(self, x: Expr, f: str) -> List[Expr]:
        return [] if self.is_sequence(f) else [Binary("notin", x, self_field(f))]

    def _member(self, x: Expr, f: str) -> List[Expr]:
        return [Binary("in", x, self_field(f))]

    # -- binding snippets -------------------------------------------------#
    def _loop_pattern(self, p: Pattern, theta: Dict[str, Expr], renamed: Dict[str, Expr]) -> Pattern:
        if isinstance(p, PVar):
            if p.name in theta:
                return PEq(theta[p.name])
            if p.name in renamed:
                return PEq(renamed[p.name])
            v = self.fresh("v")
            renamed[p.name] = Var(v)
            return PVar(v)
        if isinstance(p, PEq):
            return PEq(substitute(p.expr, theta))
        if isinstance(p, PTuple):
            return PTuple(tuple(self._loop_pattern(q, theta, renamed) for q in p.items))
        return p

    def join(self, c: Comprehension, i: int, m: StaticMatch, defined: List[Expr],
             body: Callable[[Expr], Stmt]) -> Stmt:
        """Guards and loops for the new bindings that use the matched element of iterator `i`."""
        its = c.iterators
        theta = dict(m.theta)
        layers: List[Layer] = [m.shape, defined]
        determined: List[int] = []
        for j, it in enumerate(its):
            if j == i:
                continue
            if set(pattern_vars(it.pattern)) <= set(theta):
                determined.append(j)
                continue
            renamed: Dict[str, Expr] = {}
            pattern = self._loop_pattern(it.pattern, theta, renamed)
            layers.append(Iterator(pattern, substitute(it.domain, theta)))
            theta.update(renamed)
        filt = list(m.guards) + [_is(a, substitute(b, theta)) for a, b in m.eqs]
        if c.cond != TRUE:
            filt.append(substitute(c.cond, theta))
        layers.append(filt)
        layers.append([Binary("in", substitute(pattern_expr(its[j].pattern), theta), substitute(its[j].domain, theta))
                       for j in determined])
        return guarded(layers, body(substitute(element_of(c), theta)))

    def binding_snippet(self, site: UpdateSite, c: Comprehension, i: int, x: Expr,
                        defined: List[Expr], body: Callable[[Expr], Stmt]) -> Optional[Stmt]:
        its = binderize(c.iterators, i)
        m = static_match(its[i].pattern, x)
        if m is None:
            return None
        return self.join(dataclasses.replace(c, iterators=its), i, m, defined, body)

    def domain_index(self, site: UpdateSite, c: Comprehension) -> Optional[int]:
        hits = [i for i, it in enumerate(c.iterators) if is_self_field(it.domain, site.field)]
        if len(hits) > 1:
            raise _abort(site, f"{site.field} is joined with itself in {expr_to_str(c)}")
        return hits[0] if hits else None

    # -- recomputation ----------------------------------------------------#
    def recompute(self, inv: InvariantDef, query: Optional[Expr] = None) -> Stmt:
        """Statements assigning `inv` its value from scratch; `query` overrides the definition."""
        q = inv.query if query is None else query
        f = self_field(inv.field)
        if inv.kind == "set":
            return seq(Assign(f, q), Assign(self_field(inv.count), Aggregate("size", f)))
        if inv.kind in ("count", "sum"):
            return Assign(f, q)
        if inv.kind == "ds":
            if isinstance(q, Comprehension):
                loops: List[Layer] = list(q.iterators)
                add = CallStmt(f, "add", (element_of(q),))
                return seq(NewAssign(f, "DS"), guarded(loops + [[q.cond] if q.cond != TRUE else []], add))
            v = self.fresh("v")
            return seq(NewAssign(f, "DS"), For(Iterator(PVar(v), q), CallStmt(f, "add", (Var(v),))))
        raise ValueError(f"{inv.kind} results are never recomputed")

    def _emptied(self, inv: InvariantDef) -> Stmt:
        f = self_field(inv.field)
        if inv.kind == "ds":
            return NewAssign(f, "DS")
        return seq(NewAssign(f, "Set"), Assign(self_field(inv.count), Lit(0)))

    def guarded_recompute(self, site: UpdateSite, inv: InvariantDef, query: Optional[Expr] = None) -> Optional[Stmt]:
        defined = self.definedness(site, set(self_fields_read(inv.query)))
        if defined is None:
            return None
        return guarded([defined], self.recompute(inv, query))

    # -- logical clock reads ----------------------------------------------#
    def _fresh_stamp(self, x: Expr, path) -> bool:
        if not (isinstance(x, TupleExpr) and x.items and isinstance(x.items[0], Lit)):
            return False
        pos = self.facts.stamps.get(x.items[0].tag)
        if pos is None or pos > len(x.items):
            return False
        stamp = x.items[pos - 1]
        if isinstance(stamp, Field) and stamp.obj == SELF:
            return stamp.name in self.facts.clocks
        return isinstance(stamp, Var) and stamp.name in self.facts.handler_stamp_vars(path)

    def _stamps_fresh(self, name: str) -> bool:
        """Every element ever put into field `name` carries a timestamp already read from the clock."""
        for path, s in class_statements(self.facts.cls):
            if isinstance(s, Assign) and is_self_field(s.target, name):
                return False
            if isinstance(s, CallStmt) and s.method == "add" and is_self_field(s.target, name):
                if not (len(s.args) == 1 and self._fresh_stamp(s.args[0], path)):
                    return False
        return True

    def stamp_vars(self, c: Comprehension) -> Set[str]:
        out: Set[str] = set()
        for it in c.iterators:
            if is_self_field(it.domain, "received"):
                if isinstance(it.pattern, PTuple) and len(it.pattern.items) == 2:
                    out |= stamp_vars_of(it.pattern.items[0], self.facts.stamps)
            elif is_self_field(it.domain) and it.domain.name not in HISTORIES and self._stamps_fresh(it.domain.name):
                out |= stamp_vars_of(it.pattern, self.facts.stamps)
        return out

    def clock_verdict(self, site: UpdateSite, c: Comprehension) -> Optional[Expr]:
        """The condition left after `v = logical_clock()` for the comprehension's bindings.

        Every stamp already bound is smaller than the value just read, so
        comparisons of the clock field with a stamp are decided. Returns
        the remaining condition (false when one is decided false), or None
        when some use of the clock field is not such a comparison.
        """
        if not (self.clock_rules and self.facts.lamport and isinstance(site.stmt, Assign)
                and isinstance(site.stmt.value, ClockRead) and site.field in self.facts.clocks):
            return None
        stamps = self.stamp_vars(c)
        clock = self_field(site.field)

        def side(e: Expr, test: Callable[[Expr], bool]) -> bool:
            return test(e) or (isinstance(e, TupleExpr) and bool(e.items) and test(e.items[0]))

        def is_clock(e: Expr) -> bool:
            return e == clock

        def is_stamp(e: Expr) -> bool:
            return isinstance(e, Var) and e.name in stamps

        rest: List[Expr] = []
        decided: List[bool] = []
        for conj in conjuncts(c.cond):
            if clock not in list(walk(conj)):
                rest.append(conj)
                continue
            if not (isinstance(conj, Binary) and conj.op in ("lt", "le", "gt", "ge", "is", "ne")):
                return None
            op = conj.op
            if side(conj.left, is_clock) and side(conj.right, is_stamp):
                pass
            elif side(conj.right, is_clock) and side(conj.left, is_stamp):
                op = {"lt": "gt", "gt": "lt", "le": "ge", "ge": "le"}.get(op, op)
            else:
                return None
            decided.append(op in ("gt", "ge", "ne"))
        if not decided:
            return None
        if not all(decided):
            return Lit(False)
        return and_(*rest) if rest else TRUE

    # -- per invariant ----------------------------------------------------#
    def for_site(self, site: UpdateSite, inv: InvariantDef) -> Tuple[List[Stmt], List[Stmt]]:
        """(statements before the site, statements after it) maintaining `inv`."""
        if inv.kind == "count" and inv.source:
            return [], []
        if site.kind == "send-append":
            return [], self._after_send(site, inv)
        if site.kind == "receive-append":
            self._handler(site, inv)
            return [], []
        if inv.kind in ("set", "ds") and isinstance(inv.query, Comprehension):
            return self._comprehension_site(site, inv)
        return self._field_site(site, inv)

    def _whole(self, site: UpdateSite, inv: InvariantDef, before: bool = False) -> Tuple[List[Stmt], List[Stmt]]:
        s = self.guarded_recompute(site, inv)
        if s is None:
            return [], []
        return ([s], []) if before else ([], [s])

    def _comprehension_site(self, site: UpdateSite, inv: InvariantDef) -> Tuple[List[Stmt], List[Stmt]]:
        c: Comprehension = inv.query
        if site.kind == "history-init":
            return self._whole(site, inv, before=True)
        if site.kind == "scalar-assign":
            verdict = self.clock_verdict(site, c)
            if verdict is None:
                return self._whole(site, inv)
            if verdict == Lit(False):
                return [], [self._emptied(inv)]
            s = self.guarded_recompute(site, inv, dataclasses.replace(c, cond=verdict))
            return ([], [s]) if s is not None else ([], [])
        i = self.domain_index(site, c)
        if site.kind == "set-init" or i is None or (site.kind == "set-del" and inv.kind == "set" and not covered(c)):
            return self._whole(site, inv)
        defined = self.definedness(site, set(self_fields_read(c)))
        if defined is None:
            return [], []
        adding = site.kind == "set-add"
        s = self.binding_snippet(site, c, i, site.value, defined, self._body(inv, adding))
        if s is None:
            return [], []
        if inv.kind == "ds":
            source = self._not_member(site.value, site.field) if adding else self._member(site.value, site.field)
            s = guarded([source], s)
        return [s], []

    def _body(self, inv: InvariantDef, adding: bool) -> Callable[[Expr], Stmt]:
        f = self_field(inv.field)
        if inv.kind == "ds":
            return lambda e: CallStmt(f, "add" if adding else "del", (e,))
        k = self_field(inv.count)
        if adding:
            return lambda e: If(Binary("notin", e, f), seq(CallStmt(f, "add", (e,)), _plus(k, ONE)))
        return lambda e: If(Binary("in", e, f), seq(CallStmt(f, "del", (e,)), _minus(k, ONE)))

    def _field_site(self, site: UpdateSite, inv: InvariantDef) -> Tuple[List[Stmt], List[Stmt]]:
        if inv.kind == "extreme":
            return (self._extreme(inv, site.value), []) if site.kind == "set-add" else ([], [])
        if site.kind == "history-init":
            return self._whole(site, inv, before=True)
        if site.kind in ("set-init", "scalar-assign"):
            return self._whole(site, inv)
        x = site.value
        if site.kind == "set-add":
            return [guarded([self._not_member(x, site.field)], self._add_one(inv, x))], []
        return [guarded([self._member(x, site.field)], self._del_one(inv, x))], []

    def _add_one(self, inv: InvariantDef, x: Expr) -> Stmt:
        f = self_field(inv.field)
        if inv.kind == "count":
            return _plus(f, ONE)
        if inv.kind == "sum":
            return _plus(f, x)
        return CallStmt(f, "add", (x,))

    def _del_one(self, inv: InvariantDef, x: Expr) -> Stmt:
        f = self_field(inv.field)
        if inv.kind == "count":
            return _minus(f, ONE)
        if inv.kind == "sum":
            return _minus(f, x)
        return CallStmt(f, "del", (x,))

    def _extreme(self, inv: InvariantDef, x: Expr) -> List[Stmt]:
        f = self_field(inv.field)
        better = Binary("gt" if inv.op == "max" else "lt", x, f)
        return [If(not_(Defined(f)), Assign(f, x), If(better, Assign(f, x)))]

    # -- histories --------------------------------------------------------#
    def message(self, site: UpdateSite) -> Expr:
        """The message of a send, moved into a field first when evaluating it twice could differ."""
        s: Send = site.stmt
        if not any(isinstance(n, (ClockRead, Call)) for n in walk(s.message)):
            return s.message
        key = (site.cls,) + tuple(site.path)
        if key not in self.hoists:
            self.hoists[key] = self_field(self.fresh("m"))
            self.plan.hoists[key] = self.hoists[key]
        return self.hoists[key]

    def _history_element(self, site: UpdateSite, inv: InvariantDef, x: Expr) -> Optional[Stmt]:
        """Maintenance of `inv` for one new history element `x`."""
        if isinstance(inv.query, Comprehension):
            c: Comprehension = inv.query
            i = self.domain_index(site, c)
            if i is None:
                return self.guarded_recompute(site, inv)
            defined = self.definedness(site, set(self_fields_read(c)))
            if defined is None:
                return None
            return self.binding_snippet(site, c, i, x, defined, self._body(inv, True))
        if inv.kind == "extreme":
            return seq(*self._extreme(inv, x))
        return self._add_one(inv, x)

    def _after_send(self, site: UpdateSite, inv: InvariantDef) -> List[Stmt]:
        s: Send = site.stmt
        if any(isinstance(n, (ClockRead, Call)) for n in walk(s.dest)):
            raise _abort(site, f"destination {expr_to_str(s.dest)} of a recorded send has effects")
        m = self.message(site)
        whole = self._history_element(site, inv, TupleExpr((m, s.dest)))
        v = self.fresh("v")
        each = self._history_element(site, inv, TupleExpr((m, Var(v))))
        if whole is None and each is None:
            return []
        to_set = seq(whole or Skip(), For(Iterator(PVar(v), s.dest), each) if each is not None else Skip())
        return [If(IsInstance(s.dest, "Set"), to_set, whole or Skip())]

    def _handler_pattern(self, p: Pattern, eqs: List[Tuple[Expr, Expr]], seen: Set[str]) -> Pattern:
        if isinstance(p, PEq):
            v = self.fresh("v")
            eqs.append((Var(v), p.expr))
            return PVar(v)
        if isinstance(p, PVar):
            if p.name in seen:
                v = self.fresh("v")
                eqs.append((Var(v), Var(p.name)))
                return PVar(v)
            seen.add(p.name)
            return p
        if isinstance(p, PTuple):
            return PTuple(tuple(self._handler_pattern(q, eqs, seen) for q in p.items))
        return p

    def _handler(self, site: UpdateSite, inv: InvariantDef) -> None:
        q = inv.query
        if isinstance(q, Comprehension):
            i = self.domain_index(site, q)
            if i is None:
                body = self.guarded_recompute(site, inv)
                rp = ReceivePattern(PVar(self.fresh("v")))
            else:
                rp, body = self._join_handler(site, q, i, inv)
        else:
            mv, sv = self.fresh("v"), self.fresh("v")
            x = TupleExpr((Var(mv), Var(sv)))
            body = seq(*self._extreme(inv, x)) if inv.kind == "extreme" else self._add_one(inv, x)
            rp = ReceivePattern(PVar(mv), sv if inv.kind != "count" else None)
        if body is None:
            return
        handler = ReceiveDef((rp,), None, body)
        where = dataclasses.replace(site, path=("receive", self.next_handler), invariants=(inv.field,))
        self.next_handler += 1
        self.plan.handlers.append((site.cls, handler))
        cost = snippet_cost((body,), {inv.field} if inv.kind == "ds" else set())
        self.plan.snippets.append(MaintenanceSnippet(where, (), (body,), cost))

    def _join_handler(self, site: UpdateSite, c: Comprehension, i: int, inv: InvariantDef):
        its = binderize(c.iterators, i)
        pattern = its[i].pattern
        if not (isinstance(pattern, PTuple) and len(pattern.items) == 2):
            raise _abort(site, f"received is iterated without a (message, sender) pattern in {expr_to_str(c)}")
        msg, peer = pattern.items
        eqs: List[Tuple[Expr, Expr]] = []
        seen: Set[str] = set()
        msgpat = self._handler_pattern(msg, eqs, seen)
        theta: Dict[str, Expr] = {v: Var(v) for v in pattern_vars(msgpat)}
        joined = dataclasses.replace(c, iterators=its)
        refs = free_vars(element_of(joined)) | free_vars(c.cond)
        for j, it in enumerate(its):
            if j != i:
                refs |= free_vars(Comprehension(None, (it,), TRUE)) | set(pattern_vars(it.pattern))
        sender = None
        if isinstance(peer, PVar) and peer.name not in seen:
            if peer.name in refs:
                sender = peer.name
                theta[sender] = Var(sender)
        elif not isinstance(peer, PWild):
            sender = self.fresh("v")
            other = Var(peer.name) if isinstance(peer, PVar) else pattern_expr(peer)
            eqs.append((Var(sender), other))
        m = StaticMatch([], [], eqs, theta)
        defined = self.definedness(site, set(self_fields_read(c)))
        if defined is None:
            return ReceivePattern(msgpat, sender), None
        body = self.join(joined, i, m, defined, self._body(inv, True))
        return ReceivePattern(msgpat, sender), body


def snippet_cost(stmts: Sequence[Stmt], ds_fields: Set[str] = frozenset()) -> str:
    """Cost class of running `stmts` once, in the size of the collections they touch."""
    costs = [CONST]
    for s in stmts:
        for node in walk(s):
            if isinstance(node, (For, Aggregate, Comprehension)):
                costs.append(LINEAR)
            elif isinstance(node, CallStmt) and is_self_field(node.target) and node.target.name in ds_fields:
                costs.append(LOG)
    return cost_str(worst(*costs))


def maintain(facts: ClassFacts, fresh: FreshNames, sites: Sequence[UpdateSite],
             invariants: Sequence[InvariantDef], hoists: Dict[tuple, Field],
             handler_base: int, clock_rules: bool = True) -> MaintenancePlan:
    """Snippets for every site and every stored result it affects.

    Raises IncrementalizationAborted when some update cannot be maintained.
    """
    mt = Maintainer(facts, fresh, hoists, handler_base, clock_rules)
    ds_fields = {inv.field for inv in invariants if inv.kind == "ds"}
    for site in sites:
        touched = [inv for inv in invariants if site.field in inv.deps]
        if not touched:
            continue
        before: List[Stmt] = []
        after: List[Stmt] = []
        for inv in touched:
            b, a = mt.for_site(site, inv)
            before.extend(b)
            after.extend(a)
        if site.kind == "receive-append":
            continue
        names = tuple(inv.field for inv in touched)
        cost = snippet_cost(before + after, ds_fields)
        mt.plan.snippets.append(MaintenanceSnippet(dataclasses.replace(site, invariants=names),
                                                   tuple(before), tuple(after), cost))
    logger.debug("%d snippet(s) for %s", len(mt.plan.snippets), ", ".join(i.field for i in invariants))
    return mt.plan


def apply_table5(facts: ClassFacts, fresh: FreshNames, sites: Sequence[UpdateSite],
                 invariants: Sequence[InvariantDef]) -> MaintenancePlan:
    """Maintenance by the size, sum, max and min rules alone.

    A `v = logical_clock()` site is treated as any other assignment: every
    stored result reading `v` is recomputed there.
    """
    return maintain(facts, fresh, sites, invariants, {}, len(facts.cls.receives), clock_rules=False)


def apply_clock_rules(facts: ClassFacts, fresh: FreshNames, sites: Sequence[UpdateSite],
                      invariants: Sequence[InvariantDef]) -> List[MaintenanceSnippet]:
    """Snippets for the clock reads that fix the outcome of comparisons with received timestamps.

    Only stored comprehensions qualify. A class without a Lamport clock
    gets none.
    """
    if not facts.lamport:
        return []
    mt = Maintainer(facts, fresh, {}, len(facts.cls.receives))
    out: List[MaintenanceSnippet] = []
    for site in sites:
        if site.kind != "scalar-assign":
            continue
        for inv in invariants:
            if site.field not in inv.deps or not isinstance(inv.query, Comprehension):
                continue
            if mt.clock_verdict(site, inv.query) is None:
                continue
            before, after = mt.for_site(site, inv)
            site_inv = dataclasses.replace(site, invariants=(inv.field,))
            cost = snippet_cost(before + after, {inv.field} if inv.kind == "ds" else set())
            out.append(MaintenanceSnippet(site_inv, tuple(before), tuple(after), cost))
    return out
