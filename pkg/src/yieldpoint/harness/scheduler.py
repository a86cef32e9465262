# File: yieldpoint/harness/scheduler.py
"""Seeded choice among enabled events.

Candidates are hashable keys with a weight. Under ``uniform`` the choice is
a weighted draw from one `random.Random(seed)`; under ``round-robin`` a
cursor cycles through the candidate list. Either way a candidate that has
been passed over `fairness_bound` times in a row is taken next.
"""
from __future__ import annotations

import random
from typing import Dict, Hashable, List, Sequence, Tuple

from yieldpoint.config import SchedulerConfig

Candidate = Tuple[Hashable, float]


class Scheduler:
    def __init__(self, config: SchedulerConfig):
        self.config = config
        self.rng = random.Random(config.seed)
        self.skips: Dict[Hashable, int] = {}
        self.cursor = 0
        self.decisions = 0

    def choose(self, candidates: Sequence[Candidate], fair: Sequence[Hashable] = ()) -> Hashable:
        """Pick one key; only keys in `fair` count towards the fairness bound."""
        if not candidates:
            raise ValueError("no candidates to choose from")
        keys = [k for k, _ in candidates]
        fair_set = set(fair)
        overdue = [k for k in keys if k in fair_set and self.skips.get(k, 0) >= self.config.fairness_bound]
        if overdue:
            chosen = max(overdue, key=lambda k: self.skips[k])
        elif self.config.policy == "round-robin":
            chosen = keys[self.cursor % len(keys)]
            self.cursor += 1
        else:
            chosen = self.rng.choices(keys, weights=[w for _, w in candidates])[0]
        self._account(chosen, [k for k in keys if k in fair_set])
        self.decisions += 1
        return chosen

    def _account(self, chosen: Hashable, fair_keys: List[Hashable]) -> None:
        present = set(fair_keys)
        for k in list(self.skips):
            if k not in present:
                del self.skips[k]
        for k in fair_keys:
            self.skips[k] = 0 if k == chosen else self.skips.get(k, 0) + 1
