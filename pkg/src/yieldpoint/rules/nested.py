# File: yieldpoint/rules/nested.py
"""Directly nested quantifications with at most one alternation.

Runs of the same quantifier are merged into one block first, so rules 1, 4
and 5 cover chains of any length and rules 2 and 3 cover one alternation
between two blocks of any length.
"""

from typing import Optional, Tuple

from yieldpoint.registry import register_rule
from yieldpoint.rules.base import (
    ZERO, RewriteRule, comprehension, domain_size, eq, has_quant, ne,
    projectable, projection, quant_blocks, size_of,
)
from yieldpoint.rules.simplify import negate
from yieldpoint.syntax import TRUE, Expr


def _shape(q: Expr, kinds: Tuple[str, ...]):
    blocks, body = quant_blocks(q)
    if tuple(b.kind for b in blocks) != kinds or has_quant(body):
        return None
    iterators = tuple(it for b in blocks for it in b.iterators)
    if len(iterators) < 2 or not projectable(iterators):
        return None
    return blocks, iterators, body


@register_rule("t2.r1", "some x in s | some y in t | b  ->  size({(x,y): x in s, y in t | b}) != 0",
               category="nested")
class SomeSomeToSize(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        shape = _shape(q, ("some",))
        if shape is None:
            return None
        _, its, b = shape
        return ne(size_of(comprehension(projection(its), its, b)), ZERO)


@register_rule("t2.r2", "each x in s | some y in t | b  ->  size({x: x in s, y in t | b}) == size(s)",
               category="nested")
class EachSomeToProjection(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        shape = _shape(q, ("each", "some"))
        if shape is None:
            return None
        blocks, its, b = shape
        outer = blocks[0].iterators
        return eq(size_of(comprehension(projection(outer), its, b)), domain_size(outer))


@register_rule("t2.r3", "some x in s | each y in t | b  ->  size({x: x in s, y in t | not b}) != size(s)",
               category="nested")
class SomeEachToProjection(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        shape = _shape(q, ("some", "each"))
        if shape is None:
            return None
        blocks, its, b = shape
        outer = blocks[0].iterators
        return ne(size_of(comprehension(projection(outer), its, negate(b))), domain_size(outer))


@register_rule("t2.r4", "each x in s | each y in t | b  ->  size({(x,y): .. | b}) == size({(x,y): x in s, y in t})",
               category="nested")
class EachEachToSizes(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        shape = _shape(q, ("each",))
        if shape is None:
            return None
        _, its, b = shape
        whole = projection(its)
        return eq(size_of(comprehension(whole, its, b)), size_of(comprehension(whole, its, TRUE)))


@register_rule("t2.r5", "each x in s | each y in t | b  ->  size({(x,y): x in s, y in t | not b}) == 0",
               category="nested")
class EachEachToEmptyCounterexamples(RewriteRule):
    def apply(self, q: Expr) -> Optional[Expr]:
        shape = _shape(q, ("each",))
        if shape is None:
            return None
        _, its, b = shape
        return eq(size_of(comprehension(projection(its), its, negate(b))), ZERO)


def alternations(q: Expr) -> int:
    blocks, _ = quant_blocks(q)
    return max(len(blocks) - 1, 0)

