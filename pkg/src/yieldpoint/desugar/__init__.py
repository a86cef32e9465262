# File: yieldpoint/desugar/__init__.py
"""Translate surface programs into the core language the interpreter runs."""
from __future__ import annotations

import logging
from typing import Optional

from yieldpoint.astutil import flatten_seqs
from yieldpoint.desugar.fresh import FreshNames, is_generated
from yieldpoint.desugar.queries import (
    desugar_queries,
    eliminate_aggregates,
    eliminate_bool_sugar,
    eliminate_comprehensions,
    eliminate_eq_prefix,
    eliminate_tuple_iterators,
    match_condition,
    pattern_checks,
)
from yieldpoint.desugar.structural import (
    desugar_structure,
    eliminate_wildcards,
    normalize_labels,
    reject_remote_calls,
    resolve_implicit_self,
)
from yieldpoint.syntax import Program

logger = logging.getLogger(__name__)


def desugar_all(p: Program, fresh: Optional[FreshNames] = None) -> Program:
    """Structural layer, then the expression passes; idempotent."""
    fresh = fresh or FreshNames.for_program(p)
    p = desugar_structure(p, fresh)
    p = desugar_queries(p, fresh)
    return flatten_seqs(p)


__all__ = [
    "FreshNames",
    "desugar_all",
    "desugar_structure",
    "eliminate_aggregates",
    "eliminate_bool_sugar",
    "eliminate_comprehensions",
    "eliminate_eq_prefix",
    "eliminate_tuple_iterators",
    "eliminate_wildcards",
    "is_generated",
    "match_condition",
    "normalize_labels",
    "pattern_checks",
    "reject_remote_calls",
    "resolve_implicit_self",
]
