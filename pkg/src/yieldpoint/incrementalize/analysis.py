# File: yieldpoint/incrementalize/analysis.py
"""Finding expensive queries and the statements that update what they read.

Statements are addressed by paths: ``("method", name)`` or
``("receive", index)`` followed by block steps. A step is an index into a
flattened sequence, or one of ``then``, ``else``, ``body``, ``timeout`` and
``clause<k>`` to enter a nested block.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator as PyIterator, List, Optional, Set, Tuple

from yieldpoint.astutil import free_vars, pattern_vars, self_fields_read, walk
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import IncrementalizationAborted
from yieldpoint.incrementalize.model import Path, UpdateSite
from yieldpoint.qrewrite import CollectionUpdates, QueryExpr, UpdateProfile
from yieldpoint.syntax import (
    HISTORIES,
    SELF,
    Aggregate,
    Assign,
    Await,
    Binary,
    Call,
    CallStmt,
    ClockRead,
    Comprehension,
    Expr,
    Field,
    For,
    ForTuple,
    If,
    NewAssign,
    Node,
    PLit,
    PTuple,
    PVar,
    ProcessClass,
    Program,
    Quant,
    ReceiveDef,
    Send,
    Stmt,
    TupleExpr,
    While,
    stmts_of,
)

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------#
# Statement paths


def walk_block(block: Stmt, prefix: Path) -> PyIterator[Tuple[Path, Stmt]]:
    """Every statement under `block` with its path, outer statements first."""
    for i, s in enumerate(stmts_of(block)):
        here = prefix + (i,)
        yield here, s
        for step, inner in nested_blocks(s):
            yield from walk_block(inner, here + (step,))


def nested_blocks(s: Stmt) -> List[Tuple[str, Stmt]]:
    if isinstance(s, If):
        return [("then", s.then), ("else", s.orelse)]
    if isinstance(s, (For, ForTuple, While)):
        return [("body", s.body)]
    if isinstance(s, Await):
        out = [(f"clause{k}", c.body) for k, c in enumerate(s.clauses)]
        if s.timeout is not None:
            out.append(("timeout", s.timeout.body))
        return out
    return []


def class_bodies(c: ProcessClass) -> PyIterator[Tuple[Path, Stmt]]:
    for m in c.methods:
        if m.kind == "def":
            yield ("method", m.name), m.body
    for i, d in enumerate(c.receives):
        yield ("receive", i), d.body


def class_statements(c: ProcessClass) -> PyIterator[Tuple[Path, Stmt]]:
    for prefix, body in class_bodies(c):
        yield from walk_block(body, prefix)


def is_self_field(e: Expr, name: Optional[str] = None) -> bool:
    return isinstance(e, Field) and e.obj == SELF and (name is None or e.name == name)


# ---------------------------------------------------------------------------#
# Expensive queries

def conjuncts(e: Expr) -> List[Expr]:
    if isinstance(e, Binary) and e.op == "and":
        return conjuncts(e.left) + conjuncts(e.right)
    return [e]


def is_expensive(e: Expr) -> bool:
    return any(isinstance(n, (Quant, Comprehension, Aggregate)) for n in walk(e))


def find_expensive_queries(p: Program) -> List[QueryExpr]:
    """Every await conjunct of every class that quantifies, comprehends or aggregates."""
    out: List[QueryExpr] = []
    for c in p.classes:
        for path, s in class_statements(c):
            if not isinstance(s, Await):
                continue
            for k, clause in enumerate(s.clauses):
                for j, conj in enumerate(conjuncts(clause.cond)):
                    if is_expensive(conj):
                        out.append(QueryExpr.of(conj, cls=c.name, where=f"{path[0]} {path[1]}",
                                                label=s.label, index=j, path=path, clause=k))
    logger.debug("%d expensive await conjunct(s)", len(out))
    return out


# ---------------------------------------------------------------------------#
# Facts about one class

def _superclass_chain(p: Program, name: str) -> List[str]:
    out: List[str] = []
    cur: Optional[str] = name
    while cur is not None and cur not in out:
        out.append(cur)
        c = p.cls(cur)
        cur = c.superclass if c is not None else None
    return out


def related_classes(p: Program, name: str) -> List[ProcessClass]:
    """Ancestors and descendants of `name` among the user classes, `name` excluded."""
    out = []
    for c in p.classes:
        if c.name == name:
            continue
        if c.name in _superclass_chain(p, name) or name in _superclass_chain(p, c.name):
            out.append(c)
    return out


def prestart_methods(p: Program, c: ProcessClass) -> FrozenSet[str]:
    """Methods main calls on objects of the class and that the class never calls on itself."""
    called_from_main = {n.method for n in walk(p.main.body)
                        if isinstance(n, CallStmt) and n.target != SELF and n.method != "start"}
    self_called = set()
    for _, s in class_statements(c):
        for n in walk(s):
            if isinstance(n, (CallStmt, Call)) and n.target in (None, SELF):
                self_called.add(n.method)
    own = {m.name for m in c.methods}
    return frozenset((called_from_main & own) - self_called)


def _assigned_fields(stmts) -> Set[str]:
    out: Set[str] = set()
    for _, s in stmts:
        if isinstance(s, (Assign, NewAssign)) and is_self_field(s.target):
            out.add(s.target.name)
    return out


def clock_fields(c: ProcessClass) -> FrozenSet[str]:
    """Fields assigned only ever from `logical_clock()`."""
    sources: Dict[str, Set[bool]] = {}
    for _, s in class_statements(c):
        if isinstance(s, (Assign, NewAssign)) and is_self_field(s.target):
            from_clock = isinstance(s, Assign) and isinstance(s.value, ClockRead)
            sources.setdefault(s.target.name, set()).add(from_clock)
    return frozenset(f for f, kinds in sources.items() if kinds == {True})


def stamp_positions(p: Program) -> Dict[str, int]:
    return dict(p.configuration.stamps)


@dataclass(frozen=True)
class ClassFacts:
    """What incrementalization needs to know about one class."""
    program: Program
    cls: ProcessClass
    prestart: FrozenSet[str]
    prestart_assigned: FrozenSet[str]
    clocks: FrozenSet[str]

    @classmethod
    def of(cls, p: Program, c: ProcessClass) -> "ClassFacts":
        pre = prestart_methods(p, c)
        stmts = [(path, s) for path, s in class_statements(c) if path[0] == "method" and path[1] in pre]
        return cls(p, c, pre, frozenset(_assigned_fields(stmts)), clock_fields(c))

    @property
    def lamport(self) -> bool:
        return self.program.configuration.clock == "lamport"

    @property
    def stamps(self) -> Dict[str, int]:
        return stamp_positions(self.program)

    def in_prestart(self, path: Path) -> bool:
        return path[0] == "method" and path[1] in self.prestart

    def body_of(self, path: Path) -> Stmt:
        if path[0] == "method":
            return self.cls.method(path[1]).body
        return self.cls.receives[path[1]].body

    def dominating(self, path: Path) -> Set[str]:
        """Fields assigned by top-level statements that run before the one at `path`."""
        if len(path) < 3 or not isinstance(path[2], int):
            return set()
        top = stmts_of(self.body_of(path))[:path[2]]
        return _assigned_fields((None, s) for s in top)

    def certainly_undefined(self, name: str) -> bool:
        """True when nothing before start can give `name` a value.

        Only meaningful at sites that run before any post-start code: the
        pre-start methods and the first statement of `run`.
        """
        if name in HISTORIES:
            return False
        main_assigns = any(isinstance(s, (Assign, NewAssign)) and isinstance(s.target, Field)
                           and s.target.obj != SELF and s.target.name == name for s in walk(self.program.main.body))
        return name not in self.prestart_assigned and not main_assigns

    def possibly_undefined(self, name: str, path: Path) -> bool:
        if name in HISTORIES or name in self.dominating(path):
            return False
        return self.in_prestart(path) or name not in self.prestart_assigned

    def handler_stamp_vars(self, path: Path) -> Set[str]:
        """Variables the enclosing receive definition binds to a message timestamp."""
        if path[0] != "receive":
            return set()
        out: Set[str] = set()
        for rp in self.cls.receives[path[1]].patterns:
            out |= stamp_vars_of(rp.pattern, self.stamps)
        return out


def stamp_vars_of(pattern, stamps: Dict[str, int]) -> Set[str]:
    """Variables at the timestamp position of a tagged tuple pattern."""
    if not isinstance(pattern, PTuple) or not pattern.items:
        return set()
    head = pattern.items[0]
    if not (isinstance(head, PLit) and head.tag in stamps):
        return set()
    pos = stamps[head.tag]
    if pos > len(pattern.items):
        return set()
    item = pattern.items[pos - 1]
    return {item.name} if isinstance(item, PVar) else set()


# ---------------------------------------------------------------------------#
# Update sites

_ORDER = {"history-init": 0, "scalar-assign": 0, "set-init": 0, "set-add": 1, "set-del": 1,
          "send-append": 2, "receive-append": 3}


def collection_fields(e: Expr) -> Set[str]:
    """Self fields the query uses as collections."""
    out: Set[str] = set()
    for n in walk(e):
        if isinstance(n, (Quant, Comprehension)):
            out |= {it.domain.name for it in n.iterators if is_self_field(it.domain)}
        elif isinstance(n, Aggregate) and is_self_field(n.arg):
            out.add(n.arg.name)
        elif isinstance(n, Binary) and n.op in ("in", "notin") and is_self_field(n.right):
            out.add(n.right.name)
    return out | (self_fields_read(e) & set(HISTORIES))


def _as_value(e: Expr, name: str) -> bool:
    """`e` hands out the collection itself rather than reading it."""
    if is_self_field(e, name):
        return True
    if isinstance(e, TupleExpr):
        return any(_as_value(i, name) for i in e.items)
    return False


def _abort(s: Node, message: str) -> IncrementalizationAborted:
    return IncrementalizationAborted(message, Diagnostic.at(s.span, "inc-alias", message, severity="warning"))


def _check_escape(s: Stmt, name: str, where: str) -> None:
    if isinstance(s, Assign) and _as_value(s.value, name):
        raise _abort(s, f"{name} is aliased by an assignment in {where}")
    if isinstance(s, Send) and _as_value(s.message, name):
        raise _abort(s, f"{name} is sent as a value in {where}")
    args = s.args if isinstance(s, CallStmt) else ()
    for n in walk(s):
        if isinstance(n, Call):
            args = args + n.args
    if any(_as_value(a, name) for a in args):
        raise _abort(s, f"{name} is passed as an argument in {where}")


def _sites_in_class(c: ProcessClass, deps: Set[str], collections: Set[str]) -> List[UpdateSite]:
    out: List[UpdateSite] = []
    for path, s in class_statements(c):
        where = f"{c.name}.{path[1]}" if path[0] == "method" else f"a receive definition of {c.name}"
        for f in deps & collections:
            _check_escape(s, f, where)
        if isinstance(s, (Assign, NewAssign)) and is_self_field(s.target) and s.target.name in deps:
            f = s.target.name
            if f in collections:
                if isinstance(s, Assign) and isinstance(s.value, Field):
                    raise _abort(s, f"{f} is initialized from another field in {where}")
                out.append(UpdateSite("set-init", c.name, path, f, s))
            else:
                out.append(UpdateSite("scalar-assign", c.name, path, f, s))
        elif (isinstance(s, CallStmt) and s.method in ("add", "del") and len(s.args) == 1
              and is_self_field(s.target) and s.target.name in deps):
            kind = "set-add" if s.method == "add" else "set-del"
            out.append(UpdateSite(kind, c.name, path, s.target.name, s, s.args[0]))
        elif isinstance(s, Send) and "sent" in deps:
            out.append(UpdateSite("send-append", c.name, path, "sent", s, s.message))
    if "received" in deps:
        out.append(UpdateSite("receive-append", c.name, ("receive", len(c.receives)), "received"))
    for h in sorted(deps & set(HISTORIES)):
        run = c.method("run")
        if run is None:
            msg = f"{c.name} inherits run, so its histories cannot be initialized"
            raise IncrementalizationAborted(msg, Diagnostic.at(c.span, "inc-run", msg, severity="warning"))
        out.append(UpdateSite("history-init", c.name, ("method", "run", 0), h))
    return out


def _foreign_updates(p: Program, c: ProcessClass, deps: Set[str]) -> None:
    for n in walk(p.main.body):
        target = None
        if isinstance(n, (Assign, NewAssign)):
            target = n.target
        elif isinstance(n, CallStmt) and n.method in ("add", "del"):
            target = n.target
        if isinstance(target, Field) and target.obj != SELF and target.name in deps:
            raise _abort(n, f"main updates {target.name} of a process directly")
    for other in related_classes(p, c.name):
        for path, s in class_statements(other):
            touched = None
            if isinstance(s, (Assign, NewAssign)) and is_self_field(s.target):
                touched = s.target.name
            elif isinstance(s, CallStmt) and s.method in ("add", "del") and is_self_field(s.target):
                touched = s.target.name
            if touched in deps:
                raise _abort(s, f"{touched} is also updated in related class {other.name}")


def query_method_params(c: ProcessClass, q: QueryExpr) -> Set[str]:
    if not q.path:
        return set()
    if q.path[0] == "method":
        m = c.method(q.path[1])
        return set(m.params) if m else set()
    d: ReceiveDef = c.receives[q.path[1]]
    names = {rp.sender for rp in d.patterns if rp.sender}
    for rp in d.patterns:
        names.update(pattern_vars(rp.pattern))
    return names


def find_updates(p: Program, q: QueryExpr) -> List[UpdateSite]:
    """Every statement of the query's class that changes something the query reads.

    Raises IncrementalizationAborted when a dependency can change in a way
    the sites would not see: through an alias, from main or from a related
    class, or when the query reads variables local to its method.
    """
    c = p.cls(q.cls)
    if c is None:
        raise IncrementalizationAborted(f"unknown class {q.cls}")
    local = free_vars(q.expr) & query_method_params(c, q)
    if local:
        msg = f"query reads method-local name(s) {sorted(local)}"
        raise IncrementalizationAborted(msg, Diagnostic.at(q.expr.span, "inc-local", msg, severity="warning"))
    deps = set(self_fields_read(q.expr))
    collections = collection_fields(q.expr)
    _foreign_updates(p, c, deps)
    sites = _sites_in_class(c, deps, collections)
    logger.debug("%d update site(s) for %s", len(sites), q)
    return sites


# ---------------------------------------------------------------------------#
# Update profile for conversion choice

def build_profile(p: Program, c: ProcessClass) -> UpdateProfile:
    """How the class changes each of its collections and scalars.

    Initializing a collection again after start counts as deleting from it.
    """
    facts = ClassFacts.of(p, c)
    adds: Set[str] = set()
    dels: Set[str] = set()
    known: Set[str] = set()
    scalars: Dict[str, bool] = {}
    sized: Set[str] = set()
    for path, s in class_statements(c):
        if isinstance(s, NewAssign) and is_self_field(s.target):
            known.add(s.target.name)
            if not facts.in_prestart(path):
                adds.add(s.target.name)
                dels.add(s.target.name)
        elif isinstance(s, Assign) and is_self_field(s.target):
            if isinstance(s.value, (Comprehension, Field)):
                known.add(s.target.name)
                if not facts.in_prestart(path):
                    adds.add(s.target.name)
                    dels.add(s.target.name)
            else:
                scalars[s.target.name] = True
        elif isinstance(s, CallStmt) and s.method in ("add", "del") and is_self_field(s.target):
            known.add(s.target.name)
            (adds if s.method == "add" else dels).add(s.target.name)
        elif isinstance(s, Await):
            for clause in s.clauses:
                sized |= {n.arg.name for n in walk(clause.cond)
                          if isinstance(n, Aggregate) and n.op == "size" and is_self_field(n.arg)}
    collections = {f: CollectionUpdates(f in adds, f in dels) for f in known}
    return UpdateProfile(collections, scalars, frozenset(sized))


def site_order(site: UpdateSite) -> tuple:
    return _ORDER.get(site.kind, 9), tuple(str(x) for x in site.path)
