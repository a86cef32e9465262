# File: yieldpoint/runtime/smallstep.py
"""Small-step expression semantics: evaluation contexts and single reductions.

decompose() splits a non-value core expression into a context (a function
plugging an expression into the hole) and its redex; step_expr() reduces a
redex by one rule. evaluate_small() iterates both and is the reference the
direct evaluator is tested against.
"""
from __future__ import annotations

from typing import Callable, Tuple

from yieldpoint.astutil import substitute
from yieldpoint.errors import StuckError
from yieldpoint.runtime.classes import ClassTable
from yieldpoint.runtime.evaluator import Evaluator
from yieldpoint.runtime.objects import FieldObj
from yieldpoint.runtime.state import HeapType, LocalHeap
from yieldpoint.syntax import (
    FALSE,
    Binary,
    Call,
    Defined,
    Expr,
    Field,
    IsInstance,
    Iterator,
    Lit,
    PVar,
    Quant,
    TupleExpr,
    Unary,
    or_,
)

Plug = Callable[[Expr], Expr]


def _hole(e: Expr) -> Expr:
    return e


def is_value(e: Expr) -> bool:
    return isinstance(e, Lit)


def decompose(e: Expr) -> Tuple[Plug, Expr]:
    """The unique (context, redex) split of a non-value expression."""
    if is_value(e):
        raise ValueError("a value has no redex")

    def inside(child: Expr, rebuild: Callable[[Expr], Expr]) -> Tuple[Plug, Expr]:
        plug, redex = decompose(child)
        return (lambda x: rebuild(plug(x))), redex

    if isinstance(e, TupleExpr):
        for i, item in enumerate(e.items):
            if not is_value(item):
                return inside(item, lambda x, i=i: TupleExpr(e.items[:i] + (x,) + e.items[i + 1:]))
        return _hole, e
    if isinstance(e, Field):
        if not is_value(e.obj):
            return inside(e.obj, lambda x: Field(x, e.name))
        return _hole, e
    if isinstance(e, Call):
        if e.target is not None and not is_value(e.target):
            return inside(e.target, lambda x: Call(x, e.method, e.args))
        for i, a in enumerate(e.args):
            if not is_value(a):
                return inside(a, lambda x, i=i: Call(e.target, e.method, e.args[:i] + (x,) + e.args[i + 1:]))
        return _hole, e
    if isinstance(e, Unary):
        if not is_value(e.operand):
            return inside(e.operand, lambda x: Unary(e.op, x))
        return _hole, e
    if isinstance(e, Binary):
        if not is_value(e.left):
            return inside(e.left, lambda x: Binary(e.op, x, e.right))
        if e.op != "or" and not is_value(e.right):
            return inside(e.right, lambda x: Binary(e.op, e.left, x))
        return _hole, e
    if isinstance(e, IsInstance):
        if not is_value(e.operand):
            return inside(e.operand, lambda x: IsInstance(x, e.cls))
        return _hole, e
    if isinstance(e, Quant):
        it = e.iterators[0]
        if not is_value(it.domain):
            return inside(it.domain, lambda x: Quant(e.kind, (Iterator(it.pattern, x),) + e.iterators[1:], e.cond))
        return _hole, e
    if isinstance(e, Defined) and isinstance(e.operand, Field) and not is_value(e.operand.obj):
        return inside(e.operand.obj, lambda x: Defined(Field(x, e.operand.name)))
    return _hole, e


def rule_name(redex: Expr) -> str:
    if isinstance(redex, (Unary, Binary)):
        return redex.op
    return {Field: "field", Call: "call", IsInstance: "isinstance", Quant: "some",
            TupleExpr: "tuple", Defined: "defined"}.get(type(redex), type(redex).__name__)


def step_expr(classes: ClassTable, ht: HeapType, h: LocalHeap, e: Expr) -> Expr:
    """Reduce the redex `e` by one rule; raises StuckError when none applies."""
    ev = Evaluator(classes, ht, h)
    if isinstance(e, TupleExpr):
        return Lit(tuple(i.value for i in e.items))
    if isinstance(e, Binary) and e.op == "or":
        left = e.left.value
        if left is True:
            return Lit(True)
        if left is False:
            return e.right
        raise StuckError(f"or of non-boolean {left!r}")
    if isinstance(e, Call):
        target = e.target.value if e.target is not None else None
        o = ev.obj(target)
        args = [a.value for a in e.args]
        if not isinstance(o, FieldObj):
            return Lit(ev.collection_method(o, e.method, args))
        m = classes.method(ht[target], e.method)
        if m is None or m.kind != "defun" or len(m.params) != len(args):
            raise StuckError(f"{ht[target]} has no defun {e.method}/{len(args)}")
        mapping = {"self": Lit(target), **{x: Lit(v) for x, v in zip(m.params, args)}}
        return substitute(m.body, mapping)
    if isinstance(e, Quant):
        if e.kind != "some" or len(e.iterators) != 1 or not isinstance(e.iterators[0].pattern, PVar):
            raise StuckError("only core quantifications 'some x in a | e' reduce")
        it = e.iterators[0]
        items = ev.elements(it.domain.value)
        if not items:
            return FALSE
        return or_(*(substitute(e.cond, {it.pattern.name: Lit(v)}) for v in items))
    if isinstance(e, (Field, Unary, Binary, IsInstance, Defined)):
        return Lit(ev.eval(e))
    raise StuckError(f"{type(e).__name__} is not a core redex")


def evaluate_small(classes: ClassTable, ht: HeapType, h: LocalHeap, e: Expr,
                   max_steps: int = 100_000) -> object:
    """Iterate decompose/step_expr to a value."""
    for _ in range(max_steps):
        if is_value(e):
            return e.value
        plug, redex = decompose(e)
        e = plug(step_expr(classes, ht, h, redex))
    raise StuckError("expression did not reduce to a value")
