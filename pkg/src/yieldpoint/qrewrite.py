# File: yieldpoint/qrewrite.py
"""Converting quantified await conditions into aggregate queries.

Each registered rule rewrites one query shape. `select_conversion` tries
every way of applying them to a conjunct (directly, after decomposing the
body, or inner quantifier first), estimates what maintaining each result
would cost given which collections the program adds to or deletes from,
and keeps the cheapest by time class and then space class.

Cost classes are sympy Order terms in a single symbol `n`, the size of the
collections involved.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from sympy import O, Symbol, log, oo

from yieldpoint.astutil import contains, free_vars, pattern_vars, self_fields_read, walk
from yieldpoint.errors import UnsupportedQueryError
from yieldpoint.printer import expr_to_str
from yieldpoint.registry import get_rule_for_key, rules_in_category
from yieldpoint.rules import load_rules
from yieldpoint.rules.base import has_quant, is_history, quant_blocks
from yieldpoint.rules.simplify import negation_simplifies
from yieldpoint.syntax import (
    SELF, Aggregate, Binary, Comprehension, EmptySet, Expr, Field, Iterator, PEq, PTuple,
    Pattern, Quant, Unary, Var,
)

logger = logging.getLogger(__name__)

load_rules()

# ---------------------------------------------------------------------------#
# Cost classes

n = Symbol("n", positive=True)


def order_of(expr) -> O:
    return O(expr, (n, oo))


CONST = order_of(1)
LOG = order_of(log(n))
LINEAR = order_of(n)
QUADRATIC = order_of(n ** 2)
_LADDER = (CONST, LOG, LINEAR, QUADRATIC)


def cost_rank(c) -> int:
    for i, rung in enumerate(_LADDER):
        if rung.contains(c) is True:
            return i
    return len(_LADDER)


def worst(*costs):
    """The dominant class of a sum of costs."""
    total = CONST
    for c in costs:
        total = total + c
    return total


def cost_str(c) -> str:
    return f"O({c.expr})"


# ---------------------------------------------------------------------------#
# Queries and update profiles

@dataclass(frozen=True)
class QueryExpr:
    """An await conjunct together with where it sits in the program."""
    expr: Expr
    params: FrozenSet[str] = frozenset()
    cls: Optional[str] = None
    where: Optional[str] = None
    label: Optional[str] = None
    index: int = 0
    path: Tuple = ()
    clause: int = 0

    @classmethod
    def of(klass, expr: Expr, **where) -> "QueryExpr":
        return klass(expr, query_params(expr), **where)

    def __str__(self) -> str:
        return expr_to_str(self.expr)


def query_params(e: Expr) -> FrozenSet[str]:
    """Variables and `self` fields the query reads without binding them."""
    names = {v for v in free_vars(e) if v != "self"}
    names |= self_fields_read(e)
    return frozenset(names)


@dataclass(frozen=True)
class CollectionUpdates:
    may_add: bool = True
    may_delete: bool = True


_HISTORY_UPDATES = CollectionUpdates(may_add=True, may_delete=False)


def collection_key(e: Expr) -> Optional[str]:
    if isinstance(e, Field) and e.obj == SELF:
        return e.name
    if isinstance(e, Var):
        return e.name
    return None


@dataclass
class UpdateProfile:
    """Which collections a program may add to or delete from, and which scalars it reassigns.

    Collections not listed are assumed to change both ways; the histories
    only ever grow.
    """
    collections: Dict[str, CollectionUpdates] = field(default_factory=dict)
    scalars: Dict[str, bool] = field(default_factory=dict)
    sized: FrozenSet[str] = frozenset()

    def updates(self, domain: Expr) -> CollectionUpdates:
        if isinstance(domain, Comprehension):
            parts = [self.updates(it.domain) for it in domain.iterators]
            return CollectionUpdates(any(p.may_add for p in parts), any(p.may_delete for p in parts))
        key = collection_key(domain)
        if key in self.collections:
            return self.collections[key]
        if is_history(domain):
            return _HISTORY_UPDATES
        return CollectionUpdates()

    def changes(self, domain: Expr) -> bool:
        u = self.updates(domain)
        return u.may_add or u.may_delete

    @classmethod
    def additions_only(cls, *names: str) -> "UpdateProfile":
        return cls({k: CollectionUpdates(True, False) for k in names})


# ---------------------------------------------------------------------------#
# Choices and cost estimates

@dataclass(frozen=True)
class ConversionChoice:
    rules: Tuple[str, ...]
    result: Expr
    time: object = CONST
    space: object = CONST
    source: Optional[Expr] = None

    @property
    def rank(self) -> Tuple[int, int]:
        return cost_rank(self.time), cost_rank(self.space)

    def describe(self) -> str:
        rules = ", ".join(self.rules) or "unchanged"
        return f"{expr_to_str(self.result)}  [{rules}; time {cost_str(self.time)}, space {cost_str(self.space)}]"

    def to_json(self) -> dict:
        return {
            "source": expr_to_str(self.source) if self.source is not None else None,
            "result": expr_to_str(self.result),
            "rules": list(self.rules),
            "time": cost_str(self.time),
            "space": cost_str(self.space),
        }


def _pattern_refs(p: Pattern) -> set:
    """Names an `=e` element of the pattern reads."""
    out: set = set()
    if isinstance(p, PEq):
        out |= free_vars(p.expr)
    elif isinstance(p, PTuple):
        for item in p.items:
            out |= _pattern_refs(item)
    return out


def comprehension_cost(c: Comprehension, up: UpdateProfile) -> Tuple[object, object]:
    """Time per update and space of keeping `c` as a stored set."""
    its = c.iterators
    time, space = CONST, LINEAR
    covered = c.elem is None or set(pattern_vars_of(its)) <= free_vars(c.elem)
    for i, it in enumerate(its):
        u = up.updates(it.domain)
        if not (u.may_add or u.may_delete):
            continue
        if isinstance(it.domain, Comprehension):
            t, s = comprehension_cost(it.domain, up)
            time, space = worst(time, t), worst(space, s)
        known = set(pattern_vars(it.pattern)) | _pattern_refs(it.pattern)
        for j, other in enumerate(its):
            if j != i and not set(pattern_vars(other.pattern)) <= known:
                time = worst(time, LINEAR)
        if u.may_delete and not covered:
            time, space = worst(time, LINEAR), worst(space, QUADRATIC)
    return time, space


def pattern_vars_of(its: Iterable[Iterator]) -> List[str]:
    out: List[str] = []
    for it in its:
        out.extend(pattern_vars(it.pattern))
    return out


def _aggregate_cost(a: Aggregate, up: UpdateProfile) -> Tuple[object, object]:
    arg = a.arg
    if a.op in ("size", "sum"):
        if isinstance(arg, Comprehension):
            return comprehension_cost(arg, up)
        return CONST, CONST
    # max/min: constant with additions only, an ordered multiset once deletions occur
    time, space = (LOG, LINEAR) if up.updates(arg).may_delete else (CONST, CONST)
    if isinstance(arg, Comprehension):
        t, _ = comprehension_cost(arg, up)
        time = worst(time, t)
    return time, space


def estimate(e: Expr, up: UpdateProfile) -> Tuple[object, object]:
    """Maintenance cost of every aggregate and emptiness test in `e`, summed."""
    time, space = CONST, CONST
    aggregated = set()
    for node in walk(e):
        if isinstance(node, Aggregate):
            aggregated.add(node.arg)
            t, s = _aggregate_cost(node, up)
            time, space = worst(time, t), worst(space, s)
    for node in walk(e):
        if isinstance(node, Binary) and node.op in ("is", "ne") and isinstance(node.right, EmptySet) \
                and node.left not in aggregated:
            t, s = _aggregate_cost(Aggregate("size", node.left), up)
            time, space = worst(time, t), worst(space, s)
    if contains(e, lambda x: isinstance(x, Quant)):
        time = worst(time, LINEAR)
    return time, space


def _choice(rules: Iterable[str], result: Expr, source: Expr, up: UpdateProfile,
            floor=CONST) -> ConversionChoice:
    time, space = estimate(result, up)
    return ConversionChoice(tuple(rules), result, worst(time, floor), space, source)


# ---------------------------------------------------------------------------#
# Single conversions

def _apply(key: str, q: Expr) -> Optional[Expr]:
    return get_rule_for_key(key)().apply(q)


def convert_single(q: Expr, up: Optional[UpdateProfile] = None) -> List[ConversionChoice]:
    """Table-1 conversions of a single quantification over one iterator, preferred one first."""
    up = up or UpdateProfile()
    out = [_choice((k,), r, q, up) for k in rules_in_category("single") if (r := _apply(k, q)) is not None]
    if isinstance(q, Quant) and q.kind == "each" and len(out) == 2:
        domain = q.iterators[0].domain
        prefer_sized = not negation_simplifies(q.cond) and collection_key(domain) in up.sized
        if not prefer_sized:
            out.reverse()
    return out


def convert_nested(q: Expr, up: Optional[UpdateProfile] = None) -> Optional[ConversionChoice]:
    """Table-2 conversion of directly nested quantifications; None when `q` is not nested."""
    up = up or UpdateProfile()
    blocks, body = quant_blocks(q)
    if len(blocks) > 2:
        raise UnsupportedQueryError(
            f"{len(blocks) - 1} quantifier alternations in {expr_to_str(q)}; at most one is supported", q)
    keys = rules_in_category("nested")
    if len(blocks) == 1 and blocks[0].kind == "each":
        keys = ["t2.r5", "t2.r4"] if negation_simplifies(body) else ["t2.r4", "t2.r5"]
    for k in keys:
        r = _apply(k, q)
        if r is not None:
            return _choice((k,), r, q, up)
    return None


def convert_order(q: Expr, up: Optional[UpdateProfile] = None) -> Optional[ConversionChoice]:
    """The Table-3 row for a single quantified order comparison, or None."""
    up = up or UpdateProfile()
    for k in rules_in_category("order"):
        r = _apply(k, q)
        if r is not None:
            return _choice((k,), r, q, up)
    return None


def _decompose(q: Expr, applied: List[str]) -> Expr:
    if isinstance(q, Binary) and q.op in ("and", "or", "implies"):
        return Binary(q.op, _decompose(q.left, applied), _decompose(q.right, applied))
    if isinstance(q, Unary) and q.op == "not":
        return Unary("not", _decompose(q.operand, applied))
    if not isinstance(q, Quant):
        return q
    for k in rules_in_category("decompose"):
        r = _apply(k, q)
        if r is not None:
            applied.append(k)
            return _decompose(r, applied)
    return q


def decompose(q: Expr) -> Expr:
    """Apply the decomposition rules until none fits; returns `q` itself when none ever did."""
    return _decompose(q, [])


# ---------------------------------------------------------------------------#
# Selection

def _best(choices: Iterable[ConversionChoice]) -> Optional[ConversionChoice]:
    best = None
    for c in choices:
        if has_quant(c.result):
            continue
        if best is None or c.rank < best.rank:
            best = c
    return best


def _direct(q: Quant, up: UpdateProfile) -> List[ConversionChoice]:
    blocks, body = quant_blocks(q)
    if has_quant(body):
        return []
    if len(blocks) == 1 and len(blocks[0].iterators) == 1:
        return convert_single(q, up)
    nested = convert_nested(q, up)
    return [nested] if nested is not None else []


def _leaf(q: Quant, up: UpdateProfile) -> List[ConversionChoice]:
    out = []
    ordered = convert_order(q, up)
    if ordered is not None:
        out.append(ordered)
    return out + _direct(q, up)


def _combine(e: Expr, up: UpdateProfile, pick) -> Tuple[Expr, List[str]]:
    """Replace every outermost quantification in a boolean combination by its chosen conversion."""
    rules: List[str] = []

    def go(x: Expr) -> Expr:
        if isinstance(x, Quant):
            c = pick(x)
            if c is None:
                raise UnsupportedQueryError(f"no conversion applies to {expr_to_str(x)}", x)
            rules.extend(c.rules)
            return c.result
        if isinstance(x, Binary) and x.op in ("and", "or", "implies"):
            return Binary(x.op, go(x.left), go(x.right))
        if isinstance(x, Unary) and x.op == "not":
            return Unary("not", go(x.operand))
        if has_quant(x):
            raise UnsupportedQueryError(
                f"quantification inside {expr_to_str(x)} is nested in a comprehension or aggregate", x)
        return x

    return go(e), rules


def _decomposed(q: Quant, up: UpdateProfile) -> List[ConversionChoice]:
    applied: List[str] = []
    d = _decompose(q, applied)
    if not applied:
        return []
    try:
        result, rules = _combine(d, up, lambda leaf: _best(_leaf(leaf, up)))
    except UnsupportedQueryError:
        return []
    return [_choice(applied + rules, result, q, up)]


def _inner_first(q: Quant, up: UpdateProfile) -> List[ConversionChoice]:
    """Convert the inner quantification with the order rules, then the outer one with the single rules."""
    blocks, body = quant_blocks(q)
    if len(blocks) != 2 or len(blocks[0].iterators) != 1 or len(blocks[1].iterators) != 1:
        return []
    inner = Quant(blocks[1].kind, blocks[1].iterators, body)
    applied: List[str] = []
    d = _decompose(inner, applied)
    try:
        inner_result, rules = _combine(d, up, lambda leaf: convert_order(leaf, up))
    except UnsupportedQueryError:
        return []
    outer = Quant(blocks[0].kind, blocks[0].iterators, inner_result)
    choices = convert_single(outer, up)
    if not choices:
        return []
    c = choices[0]
    return [_choice(applied + rules + list(c.rules), c.result, q, up, floor=LINEAR)]


def _alternatives(q: Quant, up: UpdateProfile) -> List[ConversionChoice]:
    blocks, _ = quant_blocks(q)
    if len(blocks) > 2:
        raise UnsupportedQueryError(
            f"{len(blocks) - 1} quantifier alternations in {expr_to_str(q)}; at most one is supported", q)
    return _leaf(q, up) + _decomposed(q, up) + _inner_first(q, up)


def select_conversion(q: Expr | QueryExpr, up: Optional[UpdateProfile] = None) -> ConversionChoice:
    """Cheapest conversion of one await conjunct; quantifier-free conjuncts come back unchanged."""
    if isinstance(q, QueryExpr):
        q = q.expr
    up = up or UpdateProfile()
    if not has_quant(q):
        return _choice((), q, q, up)

    def pick(x: Quant) -> Optional[ConversionChoice]:
        best = _best(_alternatives(x, up))
        if best is not None:
            logger.debug("candidates for %s settled on %s", expr_to_str(x), best.describe())
        return best

    result, rules = _combine(q, up, pick)
    choice = _choice(rules, result, q, up)
    logger.info("converted %s via %s", expr_to_str(q), ", ".join(rules))
    return choice
