# File: yieldpoint/rules/single.py
"""Single quantifications over one iterator become size queries."""

from typing import Optional

from yieldpoint.registry import register_rule
from yieldpoint.rules.base import (
    ZERO, RewriteRule, domain_size, eq, filter_set, ne, projectable, size_of,
)
from yieldpoint.rules.simplify import negate
from yieldpoint.syntax import Expr, Quant


def _single(q: Expr, kind: str):
    if isinstance(q, Quant) and q.kind == kind and len(q.iterators) == 1 \
            and not isinstance(q.cond, Quant) and projectable(q.iterators):
        return q.iterators[0], q.cond
    return None


@register_rule("t1.r1", "some x in s | b  ->  size({x in s | b}) != 0", category="single")
class SomeToSize(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        parts = _single(q, "some")
        if parts is None:
            return None
        it, b = parts
        return ne(size_of(filter_set(it, b)), ZERO)


@register_rule("t1.r2", "each x in s | b  ->  size({x in s | b}) == size(s)", category="single")
class EachToSizeOfDomain(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        parts = _single(q, "each")
        if parts is None:
            return None
        it, b = parts
        return eq(size_of(filter_set(it, b)), domain_size((it,)))


@register_rule("t1.r3", "each x in s | b  ->  size({x in s | not b}) == 0", category="single")
class EachToEmptyCounterexamples(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        parts = _single(q, "each")
        if parts is None:
            return None
        it, b = parts
        return eq(size_of(filter_set(it, negate(b))), ZERO)
