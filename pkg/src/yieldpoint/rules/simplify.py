# File: yieldpoint/rules/simplify.py
"""Negation pushing and small boolean clean-ups.

`negate` moves a negation inward (De Morgan, comparison flips, quantifier
duality, `not (A implies B)` to `A and not B`); `simplify` then folds
double negations, boolean constants and `a != b and a >= b` into `a > b`.
"""
from __future__ import annotations

from typing import Optional

from yieldpoint.astutil import contains, transform
from yieldpoint.syntax import (
    FALSE, FLIP, NEGATE, TRUE, Binary, Expr, Lit, Node, Quant, Unary,
)

_STRICT = {"ge": "gt", "le": "lt"}


def _is_bool(e: Expr, value: bool) -> bool:
    return isinstance(e, Lit) and e.tag is None and e.value is value


def negate(e: Expr) -> Expr:
    """An expression equivalent to `not e` with the negation pushed as far in as it goes."""
    return simplify(_negate(e))


def _negate(e: Expr) -> Expr:
    if isinstance(e, Unary) and e.op == "not":
        return e.operand
    if isinstance(e, Lit) and e.tag is None and isinstance(e.value, bool):
        return FALSE if e.value else TRUE
    if isinstance(e, Binary):
        if e.op == "and":
            return Binary("or", _negate(e.left), _negate(e.right))
        if e.op == "or":
            return Binary("and", _negate(e.left), _negate(e.right))
        if e.op == "implies":
            return Binary("and", e.left, _negate(e.right))
        if e.op in NEGATE:
            return Binary(NEGATE[e.op], e.left, e.right)
        if e.op == "in":
            return Binary("notin", e.left, e.right)
        if e.op == "notin":
            return Binary("in", e.left, e.right)
    if isinstance(e, Quant):
        return Quant("each" if e.kind == "some" else "some", e.iterators, _negate(e.cond))
    return Unary("not", e)


def _strict_merge(ne: Expr, cmp: Expr) -> Optional[Expr]:
    """`a != b and a >= b` is `a > b` (either operand order on either side)."""
    if not (isinstance(ne, Binary) and ne.op == "ne" and isinstance(cmp, Binary)
            and cmp.op in ("ge", "le", "gt", "lt")):
        return None
    if {ne.left, ne.right} != {cmp.left, cmp.right}:
        return None
    if cmp.op in ("gt", "lt"):
        return cmp
    return Binary(_STRICT[cmp.op], cmp.left, cmp.right)


def _clean(n: Node) -> Node:
    if isinstance(n, Unary) and n.op == "not":
        inner = n.operand
        if isinstance(inner, Unary) and inner.op == "not":
            return inner.operand
        if isinstance(inner, Lit) and inner.tag is None and isinstance(inner.value, bool):
            return FALSE if inner.value else TRUE
        return n
    if not isinstance(n, Binary):
        return n
    if n.op == "and":
        if _is_bool(n.left, True):
            return n.right
        if _is_bool(n.right, True):
            return n.left
        if _is_bool(n.left, False) or _is_bool(n.right, False):
            return FALSE
        return _strict_merge(n.left, n.right) or _strict_merge(n.right, n.left) or n
    if n.op == "or":
        if _is_bool(n.left, False):
            return n.right
        if _is_bool(n.right, False):
            return n.left
        if _is_bool(n.left, True) or _is_bool(n.right, True):
            return TRUE
    if n.op == "implies":
        if _is_bool(n.left, True):
            return n.right
        if _is_bool(n.left, False) or _is_bool(n.right, True):
            return TRUE
    return n


def simplify(e: Expr) -> Expr:
    return transform(e, _clean)


def flip(e: Binary) -> Binary:
    """The same comparison with its operands swapped."""
    return Binary(FLIP[e.op], e.right, e.left)


def negation_simplifies(e: Expr) -> bool:
    """True when `not e` can be written without a `not` anywhere."""
    return not contains(negate(e), lambda n: isinstance(n, Unary) and n.op == "not")
