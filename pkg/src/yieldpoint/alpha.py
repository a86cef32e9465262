# File: yieldpoint/alpha.py
"""Comparing programs up to a consistent renaming of generated names."""
from __future__ import annotations

import dataclasses
from typing import Callable, Dict, Optional

from yieldpoint.desugar.fresh import is_generated
from yieldpoint.syntax import (
    Await,
    Field,
    ForTuple,
    Labeled,
    Method,
    Node,
    PVar,
    ReceiveDef,
    ReceivePattern,
    Var,
)

# Node attributes holding names that a renaming may change.
_NAME_FIELDS = {
    Var: ("name",),
    Field: ("name",),
    PVar: ("name",),
    Await: ("label",),
    Labeled: ("label",),
    ReceivePattern: ("sender",),
    ForTuple: ("var",),
    ReceiveDef: ("labels",),
    Method: ("params",),
}


class _Renaming:
    def __init__(self, left: Callable[[str], bool], right: Callable[[str], bool]):
        self.left, self.right = left, right
        self.fwd: Dict[str, str] = {}
        self.back: Dict[str, str] = {}

    def same(self, a, b) -> bool:
        if isinstance(a, tuple) and isinstance(b, tuple):
            return len(a) == len(b) and all(self.same(x, y) for x, y in zip(a, b))
        if not (isinstance(a, str) and isinstance(b, str)):
            return a == b
        if self.left(a) and self.right(b):
            if self.fwd.setdefault(a, b) != b or self.back.setdefault(b, a) != a:
                return False
            return True
        return a == b and a not in self.fwd and a not in self.back


def alpha_diff(a, b, renamable_left: Optional[Callable[[str], bool]] = None,
               renamable_right: Optional[Callable[[str], bool]] = None) -> Optional[str]:
    """Where `a` and `b` first differ other than by renaming; None when they are alpha-equivalent."""
    ren = _Renaming(renamable_left or is_generated, renamable_right or is_generated)

    def go(x, y, at: str) -> Optional[str]:
        if isinstance(x, Node) or isinstance(y, Node):
            if type(x) is not type(y):
                return f"{at}: {type(x).__name__} vs {type(y).__name__}"
            names = _NAME_FIELDS.get(type(x), ())
            for f in dataclasses.fields(x):
                if f.name == "span":
                    continue
                u, v = getattr(x, f.name), getattr(y, f.name)
                if f.name in names:
                    if not ren.same(u, v):
                        return f"{at}.{f.name}: {u!r} vs {v!r}"
                    continue
                d = go(u, v, f"{at}.{f.name}")
                if d:
                    return d
            return None
        if isinstance(x, tuple) and isinstance(y, tuple):
            if len(x) != len(y):
                return f"{at}: {len(x)} vs {len(y)} items"
            for i, (u, v) in enumerate(zip(x, y)):
                d = go(u, v, f"{at}[{i}]")
                if d:
                    return d
            return None
        return None if type(x) is type(y) and x == y else f"{at}: {x!r} vs {y!r}"

    return go(a, b, type(a).__name__)


def alpha_equivalent(a, b, renamable_left: Optional[Callable[[str], bool]] = None,
                     renamable_right: Optional[Callable[[str], bool]] = None) -> bool:
    """`a` and `b` are equal once the names the predicates accept are renamed one to one."""
    return alpha_diff(a, b, renamable_left, renamable_right) is None


if __name__ == "__main__":
    from yieldpoint.syntax import Assign, Lit, SELF

    x = Assign(Field(SELF, "__res1"), Lit(0))
    y = Assign(Field(SELF, "__res7"), Lit(0))
    assert alpha_equivalent(x, y)
    assert not alpha_equivalent(x, Assign(Field(SELF, "total"), Lit(0)))
    print("Self-test passed.")
