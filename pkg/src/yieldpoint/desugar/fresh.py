# File: yieldpoint/desugar/fresh.py
from __future__ import annotations

import dataclasses
import re
from typing import Set

from yieldpoint.astutil import walk
from yieldpoint.syntax import Node

_GENERATED = re.compile(r"^__[A-Za-z]+\d+$")


def is_generated(name: str) -> bool:
    """Names of the form ``__<kind><n>`` belong to the passes, never to users."""
    return bool(_GENERATED.match(name))


def names_in(node: Node) -> Set[str]:
    """Every identifier-like string stored in the tree."""
    out: Set[str] = set()
    for n in walk(node):
        for f in dataclasses.fields(n):
            val = getattr(n, f.name)
            if isinstance(val, str):
                out.add(val)
            elif isinstance(val, tuple):
                out.update(v for v in val if isinstance(v, str))
    return out


class FreshNames:
    """`__<kind><counter>` with one counter shared by every pass of a run."""

    def __init__(self, taken: Set[str] | None = None):
        self.counter = 0
        self.taken = set(taken or ())

    @classmethod
    def for_program(cls, program: Node) -> "FreshNames":
        return cls(names_in(program))

    def __call__(self, kind: str) -> str:
        while True:
            name = f"__{kind}{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name
