# File: yieldpoint/harness/bench.py
"""Operation-count sweeps over process counts and request counts."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import asdict, dataclass
from typing import Iterable, List, Sequence, Tuple

from tqdm import tqdm

from yieldpoint.config import RunConfig
from yieldpoint.errors import TraceError
from yieldpoint.harness.metrics import measure_message_complexity
from yieldpoint.harness.run import run
from yieldpoint.syntax import Program

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchRow:
    variant: str
    n: int
    requests: int
    outcome: str
    messages: int
    messages_per_request: float
    max_history_length: int
    max_inspections: int
    stored_state: int


def bench(variants: Sequence[Tuple[str, Program]], ns: Iterable[int], requests: Iterable[int],
          config: RunConfig, progress: bool = True) -> List[BenchRow]:
    """One run per (variant, n, requests); `requests` sets `rounds`, `n` the process count."""
    grid = [(name, p, n, r) for name, p in variants for n in ns for r in requests]
    rows: List[BenchRow] = []
    for name, p, n, r in tqdm(grid, desc="bench", unit="run", disable=not progress):
        cfg = config.with_overrides(overrides={"n": n, "rounds": r})
        result = run(p, cfg)
        m = result.metrics
        try:
            mc = measure_message_complexity(result.trace, per_request=False)
            total = mc.total
        except TraceError:  # no critical section was entered
            total = 0
        entries = max(m.cs_entries, 1)
        rows.append(BenchRow(
            variant=name, n=n, requests=r, outcome=result.outcome.kind,
            messages=total, messages_per_request=total / entries,
            max_history_length=m.max_received_length,
            max_inspections=m.max_inspections,
            stored_state=m.stored_state,
        ))
        logger.info("bench %s n=%d requests=%d: %s", name, n, r, result.outcome.kind)
    return rows


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    fields = list(BenchRow.__dataclass_fields__)
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(asdict(row))
    return buf.getvalue()
