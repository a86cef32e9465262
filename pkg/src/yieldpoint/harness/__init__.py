# File: yieldpoint/harness/__init__.py
"""Seeded runs, traces, metrics and sweeps."""
from yieldpoint.harness.bench import BenchRow, bench, rows_to_csv
from yieldpoint.harness.metrics import (
    MessageComplexity,
    Metrics,
    SafetyFairnessReport,
    check_safety_fairness,
    cs_entries,
    measure_message_complexity,
)
from yieldpoint.harness.run import EXIT_CODES, AssertionFailed, Outcome, RunResult, Runner, apply_overrides, run
from yieldpoint.harness.scheduler import Scheduler
from yieldpoint.harness.trace import Trace, TraceDiff, TraceEvent, diff_traces

__all__ = [
    "AssertionFailed",
    "BenchRow",
    "EXIT_CODES",
    "MessageComplexity",
    "Metrics",
    "Outcome",
    "RunResult",
    "Runner",
    "SafetyFairnessReport",
    "Scheduler",
    "Trace",
    "TraceDiff",
    "TraceEvent",
    "apply_overrides",
    "bench",
    "check_safety_fairness",
    "cs_entries",
    "diff_traces",
    "measure_message_complexity",
    "rows_to_csv",
    "run",
]
