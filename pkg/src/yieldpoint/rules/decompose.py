# File: yieldpoint/rules/decompose.py
"""Pushing boolean structure out of quantifier bodies or into iterator domains."""

from typing import Optional, Tuple

from yieldpoint.registry import register_rule
from yieldpoint.rules.base import RewriteRule, bound_by, filter_set, has_quant, split_comparison
from yieldpoint.rules.simplify import negate
from yieldpoint.syntax import Binary, Expr, Iterator, Quant, Unary


def _body(q: Expr, kind: str, op: str) -> Optional[Expr]:
    if isinstance(q, Quant) and q.kind == kind:
        c = q.cond
        if op == "not" and isinstance(c, Unary) and c.op == "not":
            return c
        if isinstance(c, Binary) and c.op == op:
            return c
    return None


def _is_target(q: Quant, e: Expr) -> bool:
    """Parts worth isolating: an order comparison on the bound variable, or a nested query."""
    return has_quant(e) or split_comparison(e, bound_by(q.iterators)) is not None


def _ordered(q: Quant, left: Expr, right: Expr) -> Tuple[Expr, Expr]:
    """(filter part, remaining part) of a commutative connective."""
    if _is_target(q, left) and not _is_target(q, right):
        return right, left
    return left, right


def _restricted(q: Quant, cond: Expr, body: Expr) -> Quant:
    it = q.iterators[0]
    return Quant(q.kind, (Iterator(it.pattern, filter_set(it, cond)),), body)


@register_rule("t4.r1", "some x in s | not e  ->  not (each x in s | e)", category="decompose")
class SomeNot(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "some", "not")
        if c is None:
            return None
        return Unary("not", Quant("each", q.iterators, c.operand))


@register_rule("t4.r2", "some x in s | e1 and e2  ->  some x in {x in s | e1} | e2", category="decompose")
class SomeAnd(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "some", "and")
        if c is None or len(q.iterators) != 1:
            return None
        e1, e2 = _ordered(q, c.left, c.right)
        return _restricted(q, e1, e2)


@register_rule("t4.r3", "some x in s | e1 or e2  ->  (some x in s | e1) or (some x in s | e2)",
               category="decompose")
class SomeOr(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "some", "or")
        if c is None:
            return None
        return Binary("or", Quant("some", q.iterators, c.left), Quant("some", q.iterators, c.right))


@register_rule("t4.r4", "some x in s | e1 implies e2  ->  (some x in s | not e1) or (some x in s | e2)",
               category="decompose")
class SomeImplies(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "some", "implies")
        if c is None:
            return None
        return Binary("or", Quant("some", q.iterators, negate(c.left)), Quant("some", q.iterators, c.right))


@register_rule("t4.r5", "each x in s | not e  ->  not (some x in s | e)", category="decompose")
class EachNot(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "each", "not")
        if c is None:
            return None
        return Unary("not", Quant("some", q.iterators, c.operand))


@register_rule("t4.r6", "each x in s | e1 and e2  ->  (each x in s | e1) and (each x in s | e2)",
               category="decompose")
class EachAnd(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "each", "and")
        if c is None:
            return None
        return Binary("and", Quant("each", q.iterators, c.left), Quant("each", q.iterators, c.right))


@register_rule("t4.r7", "each x in s | e1 or e2  ->  each x in {x in s | not e1} | e2", category="decompose")
class EachOr(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "each", "or")
        if c is None or len(q.iterators) != 1:
            return None
        e1, e2 = _ordered(q, c.left, c.right)
        return _restricted(q, negate(e1), e2)


@register_rule("t4.r8", "each x in s | e1 implies e2  ->  each x in {x in s | e1} | e2", category="decompose")
class EachImplies(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        c = _body(q, "each", "implies")
        if c is None or len(q.iterators) != 1:
            return None
        return _restricted(q, c.left, c.right)
