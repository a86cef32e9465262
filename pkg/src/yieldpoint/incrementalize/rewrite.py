# File: yieldpoint/incrementalize/rewrite.py
"""Applying collected edits to a program in one pass over its statement paths."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Dict, List

from yieldpoint.incrementalize.analysis import conjuncts
from yieldpoint.syntax import (
    Assign,
    Await,
    AwaitClause,
    Expr,
    Field,
    For,
    ForTuple,
    If,
    ProcessClass,
    Program,
    ReceiveDef,
    Send,
    Stmt,
    While,
    and_,
    seq,
    stmts_of,
)


@dataclass
class Edits:
    """Keys are ``(class, *path)``; await conditions add the clause index."""
    before: Dict[tuple, List[Stmt]] = field(default_factory=dict)
    after: Dict[tuple, List[Stmt]] = field(default_factory=dict)
    hoists: Dict[tuple, Field] = field(default_factory=dict)
    conds: Dict[tuple, Dict[int, Expr]] = field(default_factory=dict)
    handlers: Dict[str, List[ReceiveDef]] = field(default_factory=dict)

    def insert(self, key: tuple, before=(), after=()) -> None:
        if before:
            self.before.setdefault(key, []).extend(before)
        if after:
            self.after.setdefault(key, []).extend(after)

    def replace_conjunct(self, key: tuple, clause: int, index: int, e: Expr) -> None:
        self.conds.setdefault(key + (clause,), {})[index] = e


def _clause(c: AwaitClause, key: tuple, edits: Edits) -> AwaitClause:
    parts = conjuncts(c.cond)
    new = edits.conds.get(key)
    if new:
        parts = [new.get(i, p) for i, p in enumerate(parts)]
    return dataclasses.replace(c, cond=and_(*parts) if new else c.cond)


def _nested(s: Stmt, key: tuple, edits: Edits) -> Stmt:
    if isinstance(s, If):
        return dataclasses.replace(s, then=_block(s.then, key + ("then",), edits),
                                   orelse=_block(s.orelse, key + ("else",), edits))
    if isinstance(s, (For, ForTuple, While)):
        return dataclasses.replace(s, body=_block(s.body, key + ("body",), edits))
    if isinstance(s, Await):
        clauses = []
        for k, c in enumerate(s.clauses):
            c = dataclasses.replace(c, body=_block(c.body, key + (f"clause{k}",), edits))
            clauses.append(_clause(c, key + (k,), edits))
        timeout = s.timeout
        if timeout is not None:
            timeout = dataclasses.replace(timeout, body=_block(timeout.body, key + ("timeout",), edits))
        return dataclasses.replace(s, clauses=tuple(clauses), timeout=timeout)
    return s


def _block(block: Stmt, prefix: tuple, edits: Edits) -> Stmt:
    out: List[Stmt] = []
    for i, s in enumerate(stmts_of(block)):
        key = prefix + (i,)
        s = _nested(s, key, edits)
        hoisted = edits.hoists.get(key)
        if hoisted is not None and isinstance(s, Send):
            out.append(Assign(hoisted, s.message))
            s = dataclasses.replace(s, message=hoisted)
        out.extend(edits.before.get(key, ()))
        out.append(s)
        out.extend(edits.after.get(key, ()))
    return seq(*out)


def _class(c: ProcessClass, edits: Edits) -> ProcessClass:
    methods = tuple(dataclasses.replace(m, body=_block(m.body, (c.name, "method", m.name), edits))
                    if m.kind == "def" else m for m in c.methods)
    receives = tuple(dataclasses.replace(d, body=_block(d.body, (c.name, "receive", i), edits))
                     for i, d in enumerate(c.receives))
    return dataclasses.replace(c, methods=methods, receives=receives + tuple(edits.handlers.get(c.name, ())))


def apply_edits(p: Program, edits: Edits) -> Program:
    return dataclasses.replace(p, classes=tuple(_class(c, edits) for c in p.classes))
