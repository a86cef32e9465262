# File: yieldpoint/harness/run.py
"""Driving the interleaving machine to an outcome."""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set

from yieldpoint.astutil import transform
from yieldpoint.config import RunConfig
from yieldpoint.errors import ConfigError, StuckError, YieldpointError
from yieldpoint.harness.metrics import Metrics
from yieldpoint.harness.scheduler import Scheduler
from yieldpoint.harness.trace import Trace, program_hash
from yieldpoint.printer import pretty
from yieldpoint.runtime.audit import StoredInvariant, audit_heaps, check_invariants, process_object_size
from yieldpoint.runtime.machine import Machine, Transition, split
from yieldpoint.runtime.state import GlobalState
from yieldpoint.syntax import SELF, Assign, Await, Field, Lit, Node, Program, Skip
from yieldpoint.values import Address

logger = logging.getLogger(__name__)

EXIT_CODES = {"terminated": 0, "deadlocked": 2, "stuck": 3, "step-limit": 4}


class AssertionFailed(YieldpointError):
    """An assertion-mode audit found a broken state."""


@dataclass
class Outcome:
    kind: str                                   # terminated | deadlocked | stuck | step-limit
    stuck: Dict[str, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]

    def to_json(self) -> dict:
        return {"kind": self.kind, "stuck": self.stuck}


@dataclass
class RunResult:
    trace: Trace
    metrics: Metrics
    outcome: Outcome
    state: GlobalState


def apply_overrides(p: Program, overrides: Dict[str, int]) -> Program:
    """Replace the literals of top-level `name = <int>` assignments in main."""
    if not overrides:
        return p
    seen: Set[str] = set()

    def rewrite(n: Node) -> Node:
        if (isinstance(n, Assign) and isinstance(n.target, Field) and n.target.obj == SELF
                and n.target.name in overrides and isinstance(n.value, Lit)
                and isinstance(n.value.value, int) and not isinstance(n.value.value, bool)):
            seen.add(n.target.name)
            return dataclasses.replace(n, value=Lit(overrides[n.target.name]))
        return n

    main = transform(p.main, rewrite)
    missing = sorted(set(overrides) - seen)
    if missing:
        raise ConfigError(f"main assigns no integer literal to {', '.join(missing)}")
    return dataclasses.replace(p, main=main)


class Runner:
    """One seeded run; `run()` is the convenience wrapper."""

    def __init__(self, program: Program, config: RunConfig,
                 invariants: Iterable[StoredInvariant] = ()):
        self.invariants = list(invariants)
        self.config = config
        self.program = apply_overrides(program, config.overrides)
        self.metrics = Metrics()
        channel = config.channel
        record = ("received", "sent") if (config.assertions and self.invariants) else None
        self.machine = Machine(self.program,
                               order=channel.order if channel else None,
                               reliability=channel.reliability if channel else None,
                               record=record,
                               small_step=config.small_step,
                               on_await=lambda a, label, n: self.metrics.note_await(n))
        self.scheduler = Scheduler(config.scheduler)
        self.state = self.machine.initial_state()
        self.trace = Trace(header={
            "program": program_hash(pretty(self.program)),
            "seed": config.scheduler.seed,
            "config": config.model_dump(mode="json"),
        })
        self.status: Dict[Address, str] = {}
        self.dirty: Set[Address] = set(self.state.processes())
        self.violations: List[str] = []

    # -- bookkeeping ------------------------------------------------------#
    def _record(self, t: Transition) -> None:
        ev = self.trace.record(t, self.program.tags)
        self.metrics.transitions += 1
        if t.rule == "send":
            self.metrics.note_send(ev.process, ev.payload.get("message"))
        elif t.rule == "handle":
            self.metrics.note_handle(ev.process)
            self._note_histories(t.process)
        elif t.rule == "output":
            v = ev.payload.get("value")
            if isinstance(v, list) and v and v[0] == "enter":
                self.metrics.cs_entries += 1
        if self.config.assertions:
            self._audit(t)

    def _note_histories(self, a: Address) -> None:
        for name in ("received", "sent"):
            if name in self.machine.record:
                n = self.state.history(a, name).size()
                attr = f"max_{name}_length"
                setattr(self.metrics, attr, max(getattr(self.metrics, attr), n))

    def _audit(self, t: Transition) -> None:
        problems = audit_heaps(self.state)
        if self.invariants:
            problems += check_invariants(self.state, self.machine.classes, self.invariants)
        if problems:
            self.violations.extend(f"after {t.rule} of {t.process}: {p}" for p in problems)
            raise AssertionFailed("; ".join(problems[:3]))

    def _refresh(self) -> None:
        for a in self.dirty:
            self.status[a] = self.machine.status(self.state, a)
            if self.status[a] == "stuck":
                logger.warning("process %s is stuck: %s", a, self.state.stuck[a])
        self.dirty.clear()

    def _candidates(self):
        ready = [a for a in self.state.processes() if self.status.get(a) == "ready"]
        cands = [(("proc", a), 1.0) for a in ready]
        fair = [k for k, _ in cands]
        order, reliability = self.machine.order, self.machine.reliability
        w = self.config.scheduler.fault_weight
        for ch in self.state.nonempty_channels():
            cands.append((("arrive", ch), 1.0))
            fair.append(("arrive", ch))
            if order == "unordered":
                cands.extend((("reorder", ch, i), w) for i in range(len(self.state.channels[ch]) - 1))
            if reliability == "unreliable":
                cands.append((("lose", ch), w))
        return cands, fair

    # -- stepping ---------------------------------------------------------#
    def _step_process(self, a: Address, budget: int) -> int:
        """Run `a` for one scheduling turn; returns the number of transitions taken."""
        taken = 0
        atomic = self.config.scheduler.granularity == "atomic"
        while taken < budget:
            try:
                t = self.machine.step(self.state, a)
            except StuckError as exc:
                self.state.stuck[a] = str(exc)
                break
            if t is None:
                break
            self._record(t)
            taken += 1
            if t.rule == "start":
                self.dirty.add(t.payload["started"])
            if not atomic:
                break
            head, rest = split(self.state.residual[a])
            if isinstance(head, Await) or (isinstance(head, Skip) and not rest):
                break
        self.dirty.add(a)
        return taken

    def run(self) -> RunResult:
        steps = 0
        max_steps = self.config.max_steps
        while True:
            self._refresh()
            if steps >= max_steps:
                outcome = Outcome("step-limit")
                break
            cands, fair = self._candidates()
            if not cands:
                outcome = self._final_outcome()
                break
            key = self.scheduler.choose(cands, fair)
            if key[0] == "proc":
                steps += self._step_process(key[1], max_steps - steps)
                continue
            ch = key[1]
            if key[0] == "arrive":
                t = self.machine.arrive(self.state, ch)
            elif key[0] == "reorder":
                t = self.machine.reorder(self.state, ch, key[2])
            else:
                t = self.machine.lose(self.state, ch)
            self._record(t)
            self.dirty.add(ch[1])
            steps += 1
        self._finish(outcome)
        return RunResult(self.trace, self.metrics, outcome, self.state)

    def _final_outcome(self) -> Outcome:
        stuck = {str(a): r for a, r in sorted(self.state.stuck.items(), key=lambda kv: kv[0].index)}
        if stuck:
            return Outcome("stuck", stuck)
        if all(self.status.get(a) == "terminated" for a in self.state.processes()):
            return Outcome("terminated")
        return Outcome("deadlocked")

    def _finish(self, outcome: Outcome) -> None:
        skip = [h for h in ("received", "sent") if h not in self.machine.record]
        sizes = [process_object_size(self.state, a, skip)
                 for a in self.state.processes() if a.index != 0 and a in self.state.heaps]
        self.metrics.stored_state = max(sizes, default=0)
        level = logging.INFO if outcome.kind == "terminated" else logging.WARNING
        logger.log(level, "run finished: %s after %d transitions", outcome.kind, self.metrics.transitions)


def run(program: Program, config: Optional[RunConfig] = None,
        invariants: Iterable[StoredInvariant] = ()) -> RunResult:
    """Run a core program under `config` until it terminates, blocks, gets stuck or hits the step limit."""
    return Runner(program, config or RunConfig(), invariants).run()
