"""Shared fixtures: corpus programs in surface, core and incrementalized form."""
from __future__ import annotations

import functools
from typing import List, Tuple

import pytest

from yieldpoint.config import RunConfig
from yieldpoint.desugar import desugar_all
from yieldpoint.examples import corpus_text
from yieldpoint.incrementalize import incrementalize_with_ledger, stored_invariants
from yieldpoint.parser import parse
from yieldpoint.syntax import Program
from yieldpoint.wellformed import require_well_formed

MINIMAL_HEADER = "configuration fifo reliable;\n"


@functools.lru_cache(maxsize=None)
def surface(name: str) -> Program:
    return require_well_formed(parse(corpus_text(name)))


@functools.lru_cache(maxsize=None)
def core(name: str) -> Program:
    """The corpus program `name`, desugared to the core language."""
    return desugar_all(surface(name))


@functools.lru_cache(maxsize=None)
def incremental(name: str) -> Tuple[Program, tuple]:
    """Incrementalized and desugared corpus program with its stored invariants."""
    out, ledger = incrementalize_with_ledger(surface(name))
    return desugar_all(out), tuple(stored_invariants(ledger))


def core_of(text: str) -> Program:
    return desugar_all(require_well_formed(parse(text)))


def config(seed: int = 0, n: int = 3, rounds: int = 1, **changes) -> RunConfig:
    return RunConfig().with_overrides(seed=seed, overrides={"n": n, "rounds": rounds}, **changes)


def seeds(count: int) -> List[int]:
    return list(range(count))


@pytest.fixture
def lamport_orig() -> Program:
    return core("lamport_orig")


@pytest.fixture
def lamport_inc() -> Tuple[Program, tuple]:
    return incremental("lamport_orig")
