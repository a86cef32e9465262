# File: yieldpoint/diagnostics.py
"""Diagnostics shared by every pipeline stage.

A diagnostic is a pydantic model so the CLI can dump it as one JSON line;
stages return lists of them instead of printing.
"""
from __future__ import annotations

import json
from typing import Iterable, Literal, Optional

from pydantic import BaseModel, ConfigDict

SCHEMA_VERSION = 1


class Diagnostic(BaseModel):
    model_config = ConfigDict(frozen=True)

    line: int = 0
    column: int = 0
    rule: str
    message: str
    severity: Literal["error", "warning"] = "error"

    def to_json(self) -> str:
        return self.model_dump_json()

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: [{self.rule}] {self.message}"

    @classmethod
    def at(cls, span, rule: str, message: str, **kw) -> "Diagnostic":
        """Build a diagnostic located at a syntax span (or nowhere)."""
        if span is None:
            return cls(rule=rule, message=message, **kw)
        return cls(line=span.line, column=span.column, rule=rule, message=message, **kw)

    @classmethod
    def from_lark(cls, exc, rule: str) -> "Diagnostic":
        """Translate a lark UnexpectedInput into a diagnostic."""
        line = getattr(exc, "line", -1)
        column = getattr(exc, "column", -1)
        if line is None or line < 0:
            line, column = 0, 0
        expected = getattr(exc, "expected", None) or getattr(exc, "allowed", None)
        message = type(exc).__name__
        if message == "UnexpectedEOF":
            message = "unexpected end of input"
        token = getattr(exc, "token", None)
        if token is not None:
            if getattr(token, "type", None) in ("$END", "<EOF>"):
                message = "unexpected end of input"
            else:
                message = f"unexpected token {str(token)!r}"
        char = getattr(exc, "char", None)
        if char is not None:
            message = f"unexpected character {char!r}"
        if expected:
            message += f"; expected one of {sorted(expected)}"
        return cls(line=line, column=column, rule=rule, message=message)


def render_jsonl(diags: Iterable[Diagnostic], header: Optional[dict] = None) -> str:
    """One JSON object per line, after a header record carrying the schema."""
    head = {"schema": SCHEMA_VERSION, "kind": "diagnostics"}
    if header:
        head.update(header)
    lines = [json.dumps(head, sort_keys=True)]
    lines.extend(d.to_json() for d in diags)
    return "\n".join(lines) + "\n"
