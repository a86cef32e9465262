# File: yieldpoint/desugar/queries.py
"""Expression-level desugaring.

Passes, in the order desugar_all() runs them:

    bool sugar -> aggregates -> '=' in comprehensions -> comprehensions
    -> tuple-pattern iterators -> bool sugar again

Statement contexts get their aggregates and comprehensions hoisted into
fresh fields of `self`. Await conditions are re-evaluated on every visit, so
their aggregates and comprehensions stay in place and the interpreter
evaluates them directly.
"""
from __future__ import annotations

import dataclasses
import logging
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from yieldpoint.astutil import (
    free_vars,
    map_children,
    pattern_expr,
    pattern_vars,
    self_fields_read,
    substitute,
    transform,
    walk,
)
from yieldpoint.desugar.fresh import FreshNames
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import DesugarError
from yieldpoint.syntax import (
    FALSE,
    SELF,
    TRUE,
    Aggregate,
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
    If,
    IsInstance,
    Iterator,
    Lit,
    Method,
    NewAssign,
    Node,
    Output,
    PEq,
    PLit,
    PTuple,
    PVar,
    Pattern,
    Program,
    Quant,
    Send,
    Seq,
    Stmt,
    TupleExpr,
    Unary,
    Var,
    While,
    and_,
    not_,
    seq,
)

logger = logging.getLogger(__name__)

Hoister = Callable[[Expr, FrozenSet[str]], Tuple[List[Stmt], Expr]]


# ---------------------------------------------------------------------------#
# Boolean sugar

def _bool_rewrite(n: Node) -> Node:
    if isinstance(n, Binary):
        if n.op == "and":
            return not_(Binary("or", not_(n.left), not_(n.right), span=n.span))
        if n.op == "implies":
            return Binary("or", not_(n.left), n.right, span=n.span)
        if n.op in ("is", "ne") and (isinstance(n.left, EmptySet) or isinstance(n.right, EmptySet)):
            coll = n.right if isinstance(n.left, EmptySet) else n.left
            test = Binary("is", Aggregate("size", coll), Lit(0), span=n.span)
            return test if n.op == "is" else not_(test)
        if n.op == "ne":
            return not_(Binary("is", n.left, n.right, span=n.span))
        if n.op == "in":
            return Call(n.right, "contains", (n.left,), span=n.span)
        if n.op == "notin":
            return not_(Call(n.right, "contains", (n.left,), span=n.span))
    if isinstance(n, Quant) and n.kind == "each":
        return not_(Quant("some", n.iterators, not_(n.cond), span=n.span))
    return n


def eliminate_bool_sugar(e: Node) -> Node:
    """`and`, `each`, `!=`, `implies`, `in`, `not in` and `== {}` in core form.

    Accepts an expression or any larger tree and rewrites bottom-up.
    """
    return transform(e, _bool_rewrite)


# ---------------------------------------------------------------------------#
# Statement traversal with hoisting

def _hoist_in_stmt(s: Stmt, hoist: Hoister, bound: FrozenSet[str] = frozenset()) -> Stmt:
    """Apply `hoist` to every expression a statement evaluates once.

    Statements produced by `hoist` run right before the statement that needed
    them; a while condition also re-runs them at the end of the body.
    """
    def h(e: Expr) -> Tuple[List[Stmt], Expr]:
        return hoist(e, bound)

    if isinstance(s, Seq):
        return seq(*(_hoist_in_stmt(x, hoist, bound) for x in s.stmts))
    if isinstance(s, Assign):
        pre1, target = h(s.target)
        pre2, value = h(s.value)
        return seq(*pre1, *pre2, dataclasses.replace(s, target=target, value=value))
    if isinstance(s, NewAssign):
        pre, target = h(s.target)
        return seq(*pre, dataclasses.replace(s, target=target))
    if isinstance(s, CallStmt):
        pre, target = h(s.target)
        args = []
        for a in s.args:
            more, a2 = h(a)
            pre += more
            args.append(a2)
        return seq(*pre, dataclasses.replace(s, target=target, args=tuple(args)))
    if isinstance(s, Send):
        pre1, msg = h(s.message)
        pre2, dest = h(s.dest)
        return seq(*pre1, *pre2, dataclasses.replace(s, message=msg, dest=dest))
    if isinstance(s, Output):
        pre, e = h(s.expr)
        return seq(*pre, dataclasses.replace(s, expr=e))
    if isinstance(s, If):
        pre, cond = h(s.cond)
        return seq(*pre, If(cond, _hoist_in_stmt(s.then, hoist, bound),
                            _hoist_in_stmt(s.orelse, hoist, bound), span=s.span))
    if isinstance(s, For):
        pre, dom = h(s.iterator.domain)
        inner = bound | frozenset(pattern_vars(s.iterator.pattern))
        it = dataclasses.replace(s.iterator, domain=dom)
        return seq(*pre, For(it, _hoist_in_stmt(s.body, hoist, inner), span=s.span))
    if isinstance(s, ForTuple):
        return dataclasses.replace(s, body=_hoist_in_stmt(s.body, hoist, bound | {s.var}))
    if isinstance(s, While):
        pre, cond = h(s.cond)
        body = _hoist_in_stmt(s.body, hoist, bound)
        return seq(*pre, While(cond, seq(body, *pre), span=s.span))
    if isinstance(s, Await):
        clauses = tuple(AwaitClause(c.cond, _hoist_in_stmt(c.body, hoist, bound), span=c.span)
                        for c in s.clauses)
        timeout = s.timeout
        if timeout is not None:
            timeout = AwaitClause(timeout.cond, _hoist_in_stmt(timeout.body, hoist, bound), span=timeout.span)
        return dataclasses.replace(s, clauses=clauses, timeout=timeout)
    return s


def _hoist_scoped(e: Expr, bound: FrozenSet[str], on_node: Callable) -> Tuple[List[Stmt], Expr]:
    """Post-order walk over an expression tracking binders; `on_node` may hoist."""
    pre: List[Stmt] = []

    def go(x: Expr, b: FrozenSet[str]) -> Expr:
        if isinstance(x, (Quant, Comprehension)):
            inner = b
            iters = []
            for it in x.iterators:
                iters.append(dataclasses.replace(it, domain=go(it.domain, inner)))
                inner = inner | frozenset(pattern_vars(it.pattern))
            changes = {"iterators": tuple(iters), "cond": go(x.cond, inner)}
            if isinstance(x, Comprehension) and x.elem is not None:
                changes["elem"] = go(x.elem, inner)
            x = dataclasses.replace(x, **changes)
        else:
            x = map_children(x, lambda c: go(c, b) if isinstance(c, Expr) else c)
        more, x = on_node(x, b)
        pre.extend(more)
        return x

    out = go(e, bound)
    return pre, out


def _program_stmts(p: Program, fn: Callable[[Stmt], Stmt], where: str) -> Program:
    def method(m: Method) -> Method:
        if m.kind == "defun":
            return m
        return dataclasses.replace(m, body=fn(m.body))

    classes = []
    for c in p.classes:
        classes.append(dataclasses.replace(
            c, methods=tuple(method(m) for m in c.methods),
            receives=tuple(dataclasses.replace(d, body=fn(d.body)) for d in c.receives)))
    out = dataclasses.replace(p, classes=tuple(classes), main=method(p.main))
    logger.info("%s applied", where)
    return out


def _defun_bodies(p: Program):
    for c in p.classes:
        for m in c.methods:
            if m.kind == "defun":
                yield c.name, m
    if p.main.kind == "defun":
        yield "main", p.main


def _reject_in_defuns(p: Program, kind: type, what: str) -> None:
    for cname, m in _defun_bodies(p):
        for n in walk(m.body):
            if isinstance(n, kind):
                msg = f"{what} inside defun {cname}.{m.name} has no statement to hoist into"
                raise DesugarError(msg, Diagnostic.at(n.span, "desugar-" + what, msg))


def _check_captures(node: Expr, bound: FrozenSet[str], what: str) -> None:
    captured = free_vars(node) & bound
    if captured:
        msg = f"{what} refers to bound variable(s) {sorted(captured)} and cannot be hoisted"
        raise DesugarError(msg, Diagnostic.at(node.span, "desugar-hoist", msg))


# ---------------------------------------------------------------------------#
# Aggregates

def _fold(op: str, coll: Expr, fresh: FreshNames) -> Tuple[List[Stmt], Expr]:
    x = fresh("x")
    snapshot = Field(SELF, fresh("c"))
    acc = Field(SELF, fresh("a"))
    elem = Var(x)
    if isinstance(coll, Comprehension):
        materialize = Assign(snapshot, coll)
    else:
        materialize = Assign(snapshot, Comprehension(elem, (Iterator(PVar(x), coll),), TRUE))
    loop_it = Iterator(PVar(x), snapshot)
    if op in ("size", "sum"):
        step = Lit(1) if op == "size" else elem
        return [materialize, Assign(acc, Lit(0)),
                For(loop_it, Assign(acc, Binary("plus", acc, step)))], acc
    found = Field(SELF, fresh("f"))
    better = Binary("gt" if op == "max" else "lt", elem, acc)
    body = If(found, If(better, Assign(acc, elem)), seq(Assign(acc, elem), Assign(found, TRUE)))
    # max/min of an empty set has no value: selecting from () gets stuck
    stuck = If(not_(found), Assign(acc, Binary("select", TupleExpr(()), Lit(1))))
    return [materialize, Assign(found, FALSE), For(loop_it, body), stuck], acc


def eliminate_aggregates(p: Program, fresh: Optional[FreshNames] = None) -> Program:
    """Hoist every aggregate in a statement into a materialized set and a fold loop."""
    fresh = fresh or FreshNames.for_program(p)
    _reject_in_defuns(p, Aggregate, "aggregate")

    def on_node(x: Expr, bound: FrozenSet[str]):
        if not isinstance(x, Aggregate):
            return [], x
        _check_captures(x, bound, f"aggregate {x.op}()")
        return _fold(x.op, x.arg, fresh)

    def hoist(e: Expr, bound: FrozenSet[str]):
        return _hoist_scoped(e, bound, on_node)

    return _program_stmts(p, lambda s: _hoist_in_stmt(s, hoist), "aggregate elimination")


# ---------------------------------------------------------------------------#
# '=' prefixes inside comprehensions

def _strip_eq(p: Pattern, fresh: FreshNames, eqs: List[Expr]) -> Pattern:
    if isinstance(p, PEq):
        y = fresh("y")
        eqs.append(Binary("is", Var(y), p.expr))
        return PVar(y, span=p.span)
    if isinstance(p, PTuple):
        return PTuple(tuple(_strip_eq(i, fresh, eqs) for i in p.items), span=p.span)
    return p


def eliminate_eq_prefix(p: Node, fresh: FreshNames) -> Node:
    """`=x` inside a comprehension becomes a fresh `y` plus the conjunct `y is x`."""
    def rewrite(n: Node) -> Node:
        if not isinstance(n, Comprehension):
            return n
        eqs: List[Expr] = []
        iters = tuple(dataclasses.replace(it, pattern=_strip_eq(it.pattern, fresh, eqs))
                      for it in n.iterators)
        if not eqs:
            return n
        elem = n.elem
        if elem is None and len(n.iterators) == 1:
            elem = pattern_expr(n.iterators[0].pattern)
        cond = and_(*eqs, n.cond) if n.cond != TRUE else and_(*eqs)
        return Comprehension(elem, iters, cond, span=n.span)
    return transform(p, rewrite)


# ---------------------------------------------------------------------------#
# Comprehensions

def _comprehension_loops(target: Expr, c: Comprehension) -> Stmt:
    elem = c.elem if c.elem is not None else pattern_expr(c.iterators[0].pattern)
    body: Stmt = CallStmt(target, "add", (elem,))
    if c.cond != TRUE:
        body = If(c.cond, body)
    for it in reversed(c.iterators):
        body = For(it, body)
    return seq(NewAssign(target, "Set", span=c.span), body)


def eliminate_comprehensions(p: Program, fresh: Optional[FreshNames] = None) -> Program:
    """`x = {e : x1 in e1, ... | b}` becomes `x = new Set` and nested guarded loops.

    Comprehensions elsewhere in a statement are first assigned to a fresh
    field of `self`.
    """
    fresh = fresh or FreshNames.for_program(p)
    _reject_in_defuns(p, Comprehension, "comprehension")

    def on_node(x: Expr, bound: FrozenSet[str]):
        if not isinstance(x, Comprehension):
            return [], x
        _check_captures(x, bound, "comprehension")
        field_ = Field(SELF, fresh("c"))
        return [translate(Assign(field_, x))], field_

    def hoist(e: Expr, bound: FrozenSet[str]):
        return _hoist_scoped(e, bound, on_node)

    def hoist_inside(c: Comprehension, bound: FrozenSet[str]):
        # everything below the comprehension itself
        pre: List[Stmt] = []
        inner = bound
        iters = []
        for it in c.iterators:
            more, dom = hoist(it.domain, inner)
            pre += more
            iters.append(dataclasses.replace(it, domain=dom))
            inner = inner | frozenset(pattern_vars(it.pattern))
        more, cond = hoist(c.cond, inner)
        pre += more
        elem = c.elem
        if elem is not None:
            more, elem = hoist(elem, inner)
            pre += more
        return pre, Comprehension(elem, tuple(iters), cond, span=c.span)

    def translate(s: Stmt) -> Stmt:
        if isinstance(s, Assign) and isinstance(s.value, Comprehension):
            pre, comp = hoist_inside(s.value, frozenset())
            target = s.target
            if isinstance(target, Field) and target.obj == SELF and target.name in self_fields_read(comp):
                tmp = Field(SELF, fresh("c"))
                return seq(*pre, _comprehension_loops(tmp, comp), Assign(target, tmp, span=s.span))
            return seq(*pre, _comprehension_loops(target, comp))
        if isinstance(s, Seq):
            return seq(*(translate(x) for x in s.stmts))
        if isinstance(s, If):
            pre, cond = hoist(s.cond, frozenset())
            return seq(*pre, If(cond, translate(s.then), translate(s.orelse), span=s.span))
        if isinstance(s, For):
            pre, dom = hoist(s.iterator.domain, frozenset())
            return seq(*pre, For(dataclasses.replace(s.iterator, domain=dom), translate(s.body), span=s.span))
        if isinstance(s, ForTuple):
            return dataclasses.replace(s, body=translate(s.body))
        if isinstance(s, While):
            pre, cond = hoist(s.cond, frozenset())
            return seq(*pre, While(cond, seq(translate(s.body), *pre), span=s.span))
        if isinstance(s, Await):
            clauses = tuple(AwaitClause(c.cond, translate(c.body), span=c.span) for c in s.clauses)
            timeout = s.timeout and AwaitClause(s.timeout.cond, translate(s.timeout.body), span=s.timeout.span)
            return dataclasses.replace(s, clauses=clauses, timeout=timeout)
        return _hoist_in_stmt(s, hoist)

    return _program_stmts(p, translate, "comprehension elimination")


# ---------------------------------------------------------------------------#
# Tuple patterns in iterators

def pattern_checks(pattern: Pattern, x: Expr) -> Tuple[List[Expr], List[Tuple[Expr, Expr]], Dict[str, Expr]]:
    """Decompose a match of `x` against `pattern`.

    Returns the shape tests (isTuple / len, outermost first), the pairs that
    must be equal (literal and `=` components) and the binding of every
    pattern variable to a select path into `x`.
    """
    shape: List[Expr] = []
    eqs: List[Tuple[Expr, Expr]] = []
    theta: Dict[str, Expr] = {}

    def go(p: Pattern, at: Expr) -> None:
        if isinstance(p, PVar):
            theta.setdefault(p.name, at)
        elif isinstance(p, PLit):
            eqs.append((at, Lit(p.value, p.tag)))
        elif isinstance(p, PEq):
            eqs.append((at, p.expr))
        elif isinstance(p, PTuple):
            shape.append(Unary("isTuple", at))
            shape.append(Binary("is", Unary("len", at), Lit(len(p.items))))
            for i, item in enumerate(p.items, start=1):
                go(item, Binary("select", at, Lit(i)))

    go(pattern, x)
    return shape, eqs, theta


def match_condition(pattern: Pattern, x: Expr) -> Tuple[List[Expr], Dict[str, Expr]]:
    """Conjuncts testing that `x` matches `pattern`, and the resulting substitution."""
    shape, eqs, theta = pattern_checks(pattern, x)
    conj = list(shape)
    if len(eqs) == 1:
        conj.append(Binary("is", eqs[0][0], eqs[0][1]))
    elif eqs:
        conj.append(Binary("is", TupleExpr(tuple(a for a, _ in eqs)), TupleExpr(tuple(b for _, b in eqs))))
    # equality components may mention pattern variables bound to the left of them
    conj = [substitute(c, theta) for c in conj]
    return conj, theta


def _needs_translation(p: Pattern) -> bool:
    return not isinstance(p, PVar)


def _split_quant(q: Quant) -> Quant:
    if len(q.iterators) <= 1:
        return q
    inner = _split_quant(Quant(q.kind, q.iterators[1:], q.cond))
    return Quant(q.kind, q.iterators[:1], inner, span=q.span)


def _iterators_rewrite(n: Node, fresh: FreshNames) -> Node:
    if isinstance(n, Quant):
        q = _split_quant(n)
        if q is not n:
            return _iterators_rewrite(map_children(q, lambda c: _iterators_rewrite(c, fresh)), fresh)
        it = q.iterators[0]
        if not _needs_translation(it.pattern):
            return q
        x = fresh("x")
        conj, theta = match_condition(it.pattern, Var(x))
        body = substitute(q.cond, theta)
        cond = and_(*conj, body) if q.kind == "some" else Binary("implies", and_(*conj), body)
        return Quant(q.kind, (Iterator(PVar(x), it.domain, span=it.span),), cond, span=q.span)
    if isinstance(n, Comprehension):
        if not any(_needs_translation(it.pattern) for it in n.iterators):
            return n
        theta: Dict[str, Expr] = {}
        iters, conds = [], []
        elem = n.elem
        for it in n.iterators:
            pat = _subst_pattern(it.pattern, theta)
            dom = substitute(it.domain, theta)
            if not _needs_translation(pat):
                iters.append(Iterator(pat, dom, span=it.span))
                continue
            x = fresh("x")
            conj, th = match_condition(pat, Var(x))
            if elem is None and len(n.iterators) == 1:
                elem = Var(x)
            theta.update(th)
            iters.append(Iterator(PVar(x), dom, span=it.span))
            conds.extend(conj)
        if elem is None:
            elem = substitute(pattern_expr(n.iterators[0].pattern), theta)
        else:
            elem = substitute(elem, theta)
        cond = substitute(n.cond, theta)
        full = and_(*conds, cond) if cond != TRUE else and_(*conds)
        return Comprehension(elem, tuple(iters), full, span=n.span)
    return n


def _subst_pattern(p: Pattern, theta: Dict[str, Expr]) -> Pattern:
    if isinstance(p, PEq):
        return PEq(substitute(p.expr, theta), span=p.span)
    if isinstance(p, PTuple):
        return PTuple(tuple(_subst_pattern(i, theta) for i in p.items), span=p.span)
    return p


def _for_rewrite(s: Stmt, fresh: FreshNames) -> Stmt:
    if not (isinstance(s, For) and _needs_translation(s.iterator.pattern)):
        return s
    it = s.iterator
    x = fresh("x")
    conj, theta = match_condition(it.pattern, Var(x))
    body = substitute(s.body, theta)
    test = and_(*conj) if conj else TRUE
    coll = Field(SELF, fresh("S"))
    matching = Field(SELF, fresh("S"))
    set_branch = seq(
        NewAssign(matching, "Set"),
        For(Iterator(PVar(x), coll), If(test, CallStmt(matching, "add", (Var(x),)))),
        For(Iterator(PVar(x), matching), body))
    seq_branch = For(Iterator(PVar(x), coll), If(test, body))
    return seq(Assign(coll, it.domain, span=s.span),
               If(IsInstance(coll, "Set"), set_branch, seq_branch, span=s.span))


def eliminate_tuple_iterators(p: Node, fresh: Optional[FreshNames] = None) -> Node:
    """Iterators with tuple, literal or `=` patterns become plain variables plus tests."""
    fresh = fresh or FreshNames.for_program(p)

    def rewrite(n: Node) -> Node:
        if isinstance(n, (Quant, Comprehension)):
            return _iterators_rewrite(n, fresh)
        if isinstance(n, For):
            return _for_rewrite(n, fresh)
        return n
    return transform(p, rewrite)


# ---------------------------------------------------------------------------#
def desugar_queries(p: Program, fresh: FreshNames) -> Program:
    p = eliminate_bool_sugar(p)
    p = eliminate_aggregates(p, fresh)
    p = eliminate_eq_prefix(p, fresh)
    p = eliminate_comprehensions(p, fresh)
    p = eliminate_tuple_iterators(p, fresh)
    return eliminate_bool_sugar(p)
