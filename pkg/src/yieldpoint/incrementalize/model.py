# File: yieldpoint/incrementalize/model.py
"""Records produced by incrementalization and the ledger that collects them."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Tuple, Union

from yieldpoint.diagnostics import Diagnostic
from yieldpoint.printer import expr_to_str, stmt_lines
from yieldpoint.syntax import Expr, Stmt

SCHEMA_VERSION = 1

# Where a statement sits: ("method", name) or ("receive", index), then block steps.
Path = Tuple[Union[int, str], ...]

SITE_KINDS = (
    "scalar-assign", "set-add", "set-del", "set-init", "send-append", "receive-append", "history-init",
)


@dataclass(frozen=True)
class InvariantDef:
    """`self.<field>` always equals `query` evaluated on the owning process.

    kind is ``set`` (a stored comprehension), ``count`` (its size or the
    size of a collection), ``ds`` (an ordered multiset for max/min) or
    ``extreme`` (a running max or min under additions only), ``sum``. A
    count with `source` set is the size of that stored set and is updated
    together with it.
    """
    cls: str
    field: str
    kind: str
    query: Expr
    deps: FrozenSet[str] = frozenset()
    op: Optional[str] = None
    count: Optional[str] = None
    source: Optional[str] = None

    def to_json(self) -> dict:
        out = {"class": self.cls, "field": self.field, "kind": self.kind,
               "query": expr_to_str(self.query), "deps": sorted(self.deps)}
        if self.op:
            out["op"] = self.op
        if self.count:
            out["count"] = self.count
        if self.source:
            out["source"] = self.source
        return out


@dataclass(frozen=True)
class UpdateSite:
    kind: str
    cls: str
    path: Path
    field: str
    stmt: Optional[Stmt] = None
    value: Optional[Expr] = None
    invariants: Tuple[str, ...] = ()

    @property
    def where(self) -> str:
        return f"{self.path[0]} {self.path[1]}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "class": self.cls, "where": self.where,
                "path": [str(p) for p in self.path[2:]], "field": self.field,
                "invariants": list(self.invariants)}


@dataclass(frozen=True)
class MaintenanceSnippet:
    site: UpdateSite
    before: Tuple[Stmt, ...] = ()
    after: Tuple[Stmt, ...] = ()
    cost: str = "O(1)"

    @property
    def empty(self) -> bool:
        return not self.before and not self.after

    def to_json(self) -> dict:
        return {"site": self.site.to_json(), "cost": self.cost,
                "before": [line for s in self.before for line in stmt_lines(s)],
                "after": [line for s in self.after for line in stmt_lines(s)]}


@dataclass
class Ledger:
    invariants: List[InvariantDef] = field(default_factory=list)
    sites: List[UpdateSite] = field(default_factory=list)
    snippets: List[MaintenanceSnippet] = field(default_factory=list)
    conversions: List[dict] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)
    handlers: List[str] = field(default_factory=list)
    eliminated: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA_VERSION,
            "invariants": [i.to_json() for i in self.invariants],
            "sites": [s.to_json() for s in self.sites],
            "snippets": [s.to_json() for s in self.snippets if not s.empty],
            "conversions": self.conversions,
            "handlers": self.handlers,
            "eliminated": self.eliminated,
            "diagnostics": [json.loads(d.to_json()) for d in self.diagnostics],
        }
        return json.dumps(doc, indent=2)
