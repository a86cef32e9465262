# File: yieldpoint/runtime/evaluator.py
"""Direct (big-step) expression evaluation.

The interleaving machine evaluates statement operands and await conditions
with this evaluator; it agrees with iterating `step_expr` on every core
expression and additionally understands the query sugar that await
conditions keep (quantifiers with patterns, comprehensions, aggregates).
Every collection element looked at is counted in `inspections`.
"""
from __future__ import annotations

import logging
from typing import Callable, Dict, Iterable, List, Optional

from yieldpoint.errors import StuckError
from yieldpoint.runtime.classes import ClassTable
from yieldpoint.runtime.objects import DSObj, FieldObj, SeqObj, SetObj
from yieldpoint.runtime.state import HeapType, LocalHeap
from yieldpoint.syntax import (
    Aggregate,
    Binary,
    Call,
    ClockRead,
    Comprehension,
    Defined,
    EmptySet,
    Expr,
    Field,
    IsInstance,
    Iterator,
    Lit,
    PEq,
    PLit,
    PTuple,
    PVar,
    PWild,
    Pattern,
    Quant,
    TupleExpr,
    Unary,
    Var,
)
from yieldpoint.values import Address, Value, value_key, values_equal

logger = logging.getLogger(__name__)

Env = Dict[str, Value]


class TempSet:
    """Set value of a comprehension or `{}`; lives outside every heap."""

    __slots__ = ("obj",)

    def __init__(self, obj: Optional[SetObj] = None):
        self.obj = obj if obj is not None else SetObj()

    def __repr__(self):
        return f"TempSet({self.obj.linearize()!r})"


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise StuckError(f"{what} expects integers, got {v!r}")
    return v


def _bool(v, what: str) -> bool:
    if not isinstance(v, bool):
        raise StuckError(f"{what} expects a boolean, got {v!r}")
    return v


_ORDER = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
}


class Evaluator:
    """Evaluates expressions against one local heap.

    `clock` is called for `logical_clock()`; without it the read is stuck.
    """

    def __init__(self, classes: ClassTable, heap_type: HeapType, heap: LocalHeap,
                 clock: Optional[Callable[[], int]] = None):
        self.classes = classes
        self.heap_type = heap_type
        self.heap = heap
        self.clock = clock
        self.inspections = 0

    # -- entry points -----------------------------------------------------#
    def eval(self, e: Expr, env: Optional[Env] = None):
        return self._eval(e, env or {})

    def value(self, e: Expr, env: Optional[Env] = None) -> Value:
        """Like eval(), but a set built by a comprehension is not a value."""
        return self.value_of(e, env or {})

    def truth(self, e: Expr, env: Optional[Env] = None) -> bool:
        return _bool(self._eval(e, env or {}), "condition")

    # -- heap access ------------------------------------------------------#
    def obj(self, a) -> object:
        if not isinstance(a, Address):
            raise StuckError(f"{a!r} is not an address")
        try:
            return self.heap[a]
        except KeyError:
            raise StuckError(f"address {a} is not in the local heap") from None

    def collection(self, v):
        if isinstance(v, TempSet):
            return v.obj
        o = self.obj(v)
        if isinstance(o, FieldObj):
            raise StuckError(f"{v} is not a collection")
        return o

    def elements(self, v) -> List[Value]:
        items = self.collection(v).linearize()
        self.inspections += len(items)
        return items

    # -- expressions ------------------------------------------------------#
    def _eval(self, e: Expr, env: Env):
        if isinstance(e, Lit):
            return e.value
        if isinstance(e, Var):
            try:
                return env[e.name]
            except KeyError:
                raise StuckError(f"unbound variable {e.name}") from None
        if isinstance(e, Field):
            o = self.obj(self._eval(e.obj, env))
            if not isinstance(o, FieldObj):
                raise StuckError(f"field {e.name} of a collection")
            return o.get(e.name)
        if isinstance(e, TupleExpr):
            return tuple(self.value_of(i, env) for i in e.items)
        if isinstance(e, Unary):
            return self._unary(e, env)
        if isinstance(e, Binary):
            return self._binary(e, env)
        if isinstance(e, Call):
            return self._call(e, env)
        if isinstance(e, IsInstance):
            v = self._eval(e.operand, env)
            return isinstance(v, Address) and self.heap_type.get(v) == e.cls
        if isinstance(e, Quant):
            return self._quant(e, env)
        if isinstance(e, Comprehension):
            out = SetObj()
            for b in self._bindings(e.iterators, env):
                if self.truth(e.cond, b):
                    out.add(self.value_of(e.elem, b) if e.elem is not None
                            else self._pattern_value(e.iterators[0].pattern, b))
            return TempSet(out)
        if isinstance(e, Aggregate):
            return self._aggregate(e, env)
        if isinstance(e, Defined):
            return self._defined(e.operand, env)
        if isinstance(e, ClockRead):
            if self.clock is None:
                raise StuckError("logical_clock() without a Lamport clock")
            return self.clock()
        if isinstance(e, EmptySet):
            return TempSet()
        raise StuckError(f"cannot evaluate {type(e).__name__}")

    def value_of(self, e: Expr, env: Env) -> Value:
        v = self._eval(e, env)
        if isinstance(v, TempSet):
            raise StuckError("a comprehension is not a value here")
        return v

    def _unary(self, e: Unary, env: Env):
        v = self._eval(e.operand, env)
        if e.op == "not":
            return not _bool(v, "not")
        if e.op == "isTuple":
            return isinstance(v, tuple)
        if e.op == "len":
            if not isinstance(v, tuple):
                raise StuckError(f"len of non-tuple {v!r}")
            return len(v)
        raise StuckError(f"unknown unary operator {e.op}")

    def _same(self, a, b) -> bool:
        if isinstance(a, TempSet) or isinstance(b, TempSet):
            ka = {value_key(x) for x in self.elements(a)}
            kb = {value_key(x) for x in self.elements(b)}
            return ka == kb
        return values_equal(a, b)

    def _binary(self, e: Binary, env: Env):
        op = e.op
        if op == "or":
            return _bool(self._eval(e.left, env), "or") or _bool(self._eval(e.right, env), "or")
        if op == "and":
            return _bool(self._eval(e.left, env), "and") and _bool(self._eval(e.right, env), "and")
        if op == "implies":
            return (not _bool(self._eval(e.left, env), "implies")) or _bool(self._eval(e.right, env), "implies")
        left = self._eval(e.left, env)
        right = self._eval(e.right, env)
        if op == "is":
            return self._same(left, right)
        if op == "ne":
            return not self._same(left, right)
        if op == "plus":
            return _int(left, "plus") + _int(right, "plus")
        if op == "minus":
            return _int(left, "minus") - _int(right, "minus")
        if op == "select":
            i = _int(right, "select")
            if not isinstance(left, tuple) or not 1 <= i <= len(left):
                raise StuckError(f"select({left!r}, {i}) out of range")
            return left[i - 1]
        if op in _ORDER:
            if isinstance(left, TempSet) or isinstance(right, TempSet):
                raise StuckError("order comparison of sets")
            return _ORDER[op](value_key(left), value_key(right))
        if op in ("in", "notin"):
            self.inspections += 1
            found = self.collection(right).contains(left)
            return found if op == "in" else not found
        raise StuckError(f"unknown binary operator {op}")

    # -- method calls -----------------------------------------------------#
    def _call(self, e: Call, env: Env):
        if e.target is None:
            raise StuckError(f"call of {e.method} without a target")
        target = self._eval(e.target, env)
        args = [self.value_of(a, env) for a in e.args]
        if isinstance(target, TempSet):
            return self.collection_method(target.obj, e.method, args)
        o = self.obj(target)
        if not isinstance(o, FieldObj):
            return self.collection_method(o, e.method, args)
        m = self.classes.method(self.heap_type[target], e.method)
        if m is None or m.kind != "defun":
            raise StuckError(f"{self.heap_type[target]} has no defun {e.method}")
        if len(m.params) != len(args):
            raise StuckError(f"{e.method} expects {len(m.params)} argument(s)")
        inner: Env = {"self": target, **dict(zip(m.params, args))}
        return self._eval(m.body, inner)

    def collection_method(self, o, method: str, args: List[Value]):
        self.inspections += 1
        if method == "contains" and len(args) == 1:
            return o.contains(args[0])
        if method in ("size", "length") and not args:
            return o.size()
        if method == "is_empty" and not args and isinstance(o, DSObj):
            return o.is_empty()
        if method in ("min", "max") and not args and not isinstance(o, SeqObj):
            return o.min() if method == "min" else o.max()
        raise StuckError(f"{type(o).__name__} has no expression method {method}")

    # -- queries ----------------------------------------------------------#
    def match(self, p: Pattern, v: Value, env: Env) -> Optional[Env]:
        """Bindings extending `env` under which `v` matches `p`, or None."""
        if isinstance(p, PVar):
            out = dict(env)
            out[p.name] = v
            return out
        if isinstance(p, PWild):
            return env
        if isinstance(p, PLit):
            return env if values_equal(p.value, v) else None
        if isinstance(p, PEq):
            return env if values_equal(self.value_of(p.expr, env), v) else None
        if isinstance(p, PTuple):
            if not isinstance(v, tuple) or len(v) != len(p.items):
                return None
            cur: Optional[Env] = env
            for item, x in zip(p.items, v):
                cur = self.match(item, x, cur)
                if cur is None:
                    return None
            return cur
        raise StuckError(f"unknown pattern {p!r}")

    def _bindings(self, iterators: Iterable[Iterator], env: Env):
        iters = list(iterators)
        if not iters:
            yield env
            return
        first, rest = iters[0], iters[1:]
        for v in self.elements(self._eval(first.domain, env)):
            b = self.match(first.pattern, v, env)
            if b is not None:
                yield from self._bindings(rest, b)

    def _quant(self, e: Quant, env: Env) -> bool:
        if e.kind == "some":
            return any(self.truth(e.cond, b) for b in self._bindings(e.iterators, env))
        return all(self.truth(e.cond, b) for b in self._bindings(e.iterators, env))

    def _pattern_value(self, p: Pattern, env: Env) -> Value:
        if isinstance(p, PVar):
            return env[p.name]
        if isinstance(p, PLit):
            return p.value
        if isinstance(p, PEq):
            return self.value_of(p.expr, env)
        if isinstance(p, PTuple):
            return tuple(self._pattern_value(i, env) for i in p.items)
        raise StuckError("a wildcard has no value")

    def _aggregate(self, e: Aggregate, env: Env):
        items = self.elements(self._eval(e.arg, env))
        if e.op == "size":
            return len(items)
        if e.op == "sum":
            return sum(_int(x, "sum") for x in items)
        if not items:
            raise StuckError(f"{e.op} of an empty set is undefined")
        keyed = max if e.op == "max" else min
        return keyed(items, key=value_key)

    def _defined(self, operand: Expr, env: Env) -> bool:
        if isinstance(operand, Field):
            try:
                o = self.obj(self._eval(operand.obj, env))
            except StuckError:
                return False
            return isinstance(o, FieldObj) and operand.name in o.fields
        if isinstance(operand, Var):
            return operand.name in env
        try:
            self._eval(operand, env)
        except StuckError:
            return False
        return True
