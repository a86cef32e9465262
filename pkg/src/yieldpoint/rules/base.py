# File: yieldpoint/rules/base.py

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from yieldpoint.astutil import contains, iterators_bind, pattern_expr, free_vars
from yieldpoint.syntax import (
    FLIP, ORDER_OPS, TRUE, Aggregate, Binary, Comprehension, EmptySet, Expr, Field, HISTORIES, Iterator,
    Lit, PTuple, PVar, PWild, Pattern, Quant, TupleExpr, Var, and_,
)


class RewriteRule:
    """
    Base class for registered rewrite rules.

    Subclasses override `apply`, which returns the rewritten expression or
    None when the rule does not fit the query's shape. The registry stamps
    `key` and `description` onto every registered subclass.
    """
    key: str = ""
    description: str = ""

    def apply(self, q: Expr) -> Optional[Expr]:
        return None

    def applies(self, q: Expr) -> bool:
        return self.apply(q) is not None

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.key}>"


# ---------------------------------------------------------------------------#
# Quantifier shapes

@dataclass(frozen=True)
class QuantBlock:
    """A run of directly nested quantifiers of one kind."""
    kind: str
    iterators: Tuple[Iterator, ...]


def quant_blocks(q: Expr) -> Tuple[List[QuantBlock], Expr]:
    """Split directly nested quantifications into same-kind blocks and the innermost body."""
    blocks: List[QuantBlock] = []
    body = q
    while isinstance(body, Quant):
        if blocks and blocks[-1].kind == body.kind:
            blocks[-1] = QuantBlock(body.kind, blocks[-1].iterators + body.iterators)
        else:
            blocks.append(QuantBlock(body.kind, tuple(body.iterators)))
        body = body.cond
    return blocks, body


def has_quant(e: Expr) -> bool:
    return contains(e, lambda n: isinstance(n, Quant))


def _wild(p: Pattern) -> bool:
    if isinstance(p, PWild):
        return True
    if isinstance(p, PTuple):
        return any(_wild(i) for i in p.items)
    return False


def projectable(iterators: Sequence[Iterator]) -> bool:
    """Every pattern can be read back as the element it matched."""
    return not any(_wild(it.pattern) for it in iterators)


# ---------------------------------------------------------------------------#
# Result constructors

def size_of(e: Expr) -> Expr:
    return Aggregate("size", e)


def eq(a: Expr, b: Expr) -> Expr:
    return Binary("is", a, b)


def ne(a: Expr, b: Expr) -> Expr:
    return Binary("ne", a, b)


ZERO = Lit(0)


def projection(iterators: Sequence[Iterator]) -> Expr:
    """The element a comprehension over `iterators` collects when nothing is projected away."""
    exprs = [pattern_expr(it.pattern) for it in iterators]
    return exprs[0] if len(exprs) == 1 else TupleExpr(tuple(exprs))


def filter_set(it: Iterator, cond: Expr) -> Comprehension:
    """`{P in s | cond}`, merging into `s` when it is already a filter over the same pattern."""
    d = it.domain
    if isinstance(d, Comprehension) and d.elem is None and d.iterators[0].pattern == it.pattern:
        inner = d.iterators[0]
        merged = cond if d.cond == TRUE else (d.cond if cond == TRUE else and_(d.cond, cond))
        return Comprehension(None, (inner,), merged)
    return Comprehension(None, (it,), cond)


def comprehension(elem: Expr, iterators: Sequence[Iterator], cond: Expr) -> Comprehension:
    """`{elem : iterators | cond}`, in filter form when `elem` is the single iterator's element."""
    iterators = tuple(iterators)
    if len(iterators) == 1:
        it = iterators[0]
        if elem == pattern_expr(it.pattern):
            return filter_set(it, cond)
        d = it.domain
        if isinstance(d, Comprehension) and d.elem is None and d.iterators[0].pattern == it.pattern:
            inner = d.iterators[0]
            merged = cond if d.cond == TRUE else (d.cond if cond == TRUE else and_(d.cond, cond))
            return Comprehension(elem, (inner,), merged)
    return Comprehension(elem, iterators, cond)


def domain_size(iterators: Sequence[Iterator]) -> Expr:
    """Number of bindings of `iterators`; `size(s)` for a single plain variable."""
    if len(iterators) == 1 and isinstance(iterators[0].pattern, PVar) and not is_history(iterators[0].domain):
        return size_of(iterators[0].domain)
    return size_of(comprehension(projection(iterators), iterators, TRUE))


def is_history(e: Expr) -> bool:
    """Sequences may repeat elements, so their length is not a binding count."""
    return isinstance(e, (Field, Var)) and e.name in HISTORIES


def empty(e: Expr) -> Expr:
    return eq(e, EmptySet())


def nonempty(e: Expr) -> Expr:
    return ne(e, EmptySet())


# ---------------------------------------------------------------------------#
# Order comparisons between a bound expression and a parameter

def split_comparison(body: Expr, bound: set) -> Optional[Tuple[str, Expr, Expr, bool]]:
    """
    For `P op E` or `E op P`, where E reads bound variables and P none,
    return (op, P, E, flipped) normalized so that the comparison reads
    `P op E`; `flipped` is set when the source had E on the left.
    """
    if not (isinstance(body, Binary) and body.op in ORDER_OPS):
        return None
    lv, rv = free_vars(body.left) & bound, free_vars(body.right) & bound
    if rv and not lv and not has_quant(body.left):
        return body.op, body.left, body.right, False
    if lv and not rv and not has_quant(body.right):
        return FLIP[body.op], body.right, body.left, True
    return None


def bound_by(iterators: Sequence[Iterator]) -> set:
    return set(iterators_bind(iterators))
