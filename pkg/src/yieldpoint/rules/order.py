# File: yieldpoint/rules/order.py
"""A single quantified order comparison becomes an emptiness test plus max or min.

The sixteen rows pair up: row 2k-1 reads `y op x`, row 2k the same
comparison written `x op' y`. When the compared expression is not the
bound variable itself, the aggregate ranges over `{E : P in s}`.
"""

from typing import Optional

from yieldpoint.astutil import pattern_expr
from yieldpoint.registry import register_rule
from yieldpoint.rules.base import (
    RewriteRule, bound_by, comprehension, empty, nonempty, projectable, split_comparison,
)
from yieldpoint.syntax import FLIP, TRUE, Aggregate, Binary, Expr, PVar, Quant, and_, or_

_SYMBOL = {"lt": "<", "le": "<=", "gt": ">", "ge": ">="}

# (quantifier, comparison read as `y op x`, aggregate) in row order.
_ROWS = (
    ("some", "le", "max"), ("some", "ge", "min"), ("some", "lt", "max"), ("some", "gt", "min"),
    ("each", "le", "min"), ("each", "ge", "max"), ("each", "lt", "min"), ("each", "gt", "max"),
)


def compared_domain(q: Quant, e: Expr) -> Expr:
    """The set whose max or min decides `q`: `s` itself or `{e : P in s}`."""
    it = q.iterators[0]
    if isinstance(it.pattern, PVar) and e == pattern_expr(it.pattern):
        return it.domain
    return comprehension(e, (it,), TRUE)


class OrderComparisonRow(RewriteRule):
    kind: str = ""
    op: str = ""
    flipped: bool = False
    agg: str = ""

    def apply(self, q: Expr) -> Optional[Expr]:
        if not (isinstance(q, Quant) and q.kind == self.kind and len(q.iterators) == 1
                and projectable(q.iterators)):
            return None
        parts = split_comparison(q.cond, bound_by(q.iterators))
        if parts is None:
            return None
        op, p, e, flipped = parts
        if op != self.op or flipped != self.flipped:
            return None
        d = compared_domain(q, e)
        test = Binary(op, p, Aggregate(self.agg, d))
        if self.kind == "some":
            return and_(nonempty(d), test)
        return or_(empty(d), test)


def _description(kind: str, op: str, agg: str, flipped: bool) -> str:
    body = f"x {_SYMBOL[FLIP[op]]} y" if flipped else f"y {_SYMBOL[op]} x"
    guard = "s != {} and" if kind == "some" else "s == {} or"
    return f"{kind} x in s | {body}  ->  {guard} y {_SYMBOL[op]} {agg}(s)"


for _i, (_kind, _op, _agg) in enumerate(_ROWS):
    for _flipped in (False, True):
        _row = 2 * _i + 1 + int(_flipped)
        register_rule(f"t3.r{_row}", _description(_kind, _op, _agg, _flipped), category="order")(
            type(f"OrderRow{_row}", (OrderComparisonRow,),
                 {"kind": _kind, "op": _op, "flipped": _flipped, "agg": _agg}))
