# File: yieldpoint/incrementalize/history.py
"""Dropping message histories nothing reads any more."""
from __future__ import annotations

import dataclasses
import logging
from typing import List, Tuple

from yieldpoint.astutil import walk
from yieldpoint.syntax import HISTORIES, Field, Program, Var

logger = logging.getLogger(__name__)


def history_reads(p: Program) -> set:
    """Histories mentioned anywhere in the classes or in main."""
    nodes = [n for c in p.classes for n in walk(c)] + list(walk(p.main))
    return {n.name for n in nodes if isinstance(n, (Field, Var)) and n.name in HISTORIES}


def eliminate_dead_history(p: Program) -> Tuple[Program, List[str]]:
    """Stop recording every history the program no longer reads; returns the names dropped."""
    read = history_reads(p)
    record = p.configuration.record
    dropped = [h for h in record if h not in read]
    if not dropped:
        return p, []
    kept = tuple(h for h in record if h in read)
    logger.info("no longer recording %s", ", ".join(dropped))
    return dataclasses.replace(p, configuration=dataclasses.replace(p.configuration, record=kept)), dropped
