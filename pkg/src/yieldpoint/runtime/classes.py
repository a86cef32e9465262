# File: yieldpoint/runtime/classes.py
"""Class table: inheritance, method lookup and receive definitions per class."""
from __future__ import annotations

from typing import Dict, List, Optional

from yieldpoint.syntax import Method, ProcessClass, Program, ReceiveDef

# Predefined classes and their superclass.
_BUILTIN_PARENT = {"Object": None, "Process": "Object", "Set": "Object",
                   "Sequence": "Object", "DS": "Object"}


class ClassTable:
    """Read-only view of the classes of one program.

    The initial process is an instance of the predefined class ``Process``
    whose only method is the program's ``main``.
    """

    def __init__(self, program: Program):
        self.program = program
        self.by_name: Dict[str, ProcessClass] = {c.name: c for c in program.classes}
        self._handlers: Dict[str, List[ReceiveDef]] = {}

    def superclass(self, name: str) -> Optional[str]:
        c = self.by_name.get(name)
        if c is not None:
            return c.superclass
        return _BUILTIN_PARENT.get(name)

    def ancestors(self, name: str) -> List[str]:
        """`name` first, then its superclasses up to Object."""
        out: List[str] = []
        cur: Optional[str] = name
        while cur is not None and cur not in out:
            out.append(cur)
            cur = self.superclass(cur)
        return out

    def extends(self, name: str, base: str) -> bool:
        return base in self.ancestors(name)

    def is_user_class(self, name: str) -> bool:
        return name in self.by_name

    def method(self, cls: str, name: str) -> Optional[Method]:
        """The definition of `name` in `cls` or its nearest ancestor defining it."""
        for c in self.ancestors(cls):
            if c == "Process" and name == self.program.main.name:
                return self.program.main
            pc = self.by_name.get(c)
            if pc is not None:
                m = pc.method(name)
                if m is not None:
                    return m
        return None

    def receive_defs(self, cls: str) -> List[ReceiveDef]:
        """Receive definitions of `cls`, then those inherited, each in declaration order."""
        cached = self._handlers.get(cls)
        if cached is None:
            cached = [d for c in self.ancestors(cls)
                      for d in (self.by_name[c].receives if c in self.by_name else ())]
            self._handlers[cls] = cached
        return cached
