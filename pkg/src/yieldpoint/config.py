# File: yieldpoint/config.py
"""Validated run configuration.

A YAML file loads into `RunConfig`; CLI flags are applied on top with
`RunConfig.with_overrides`. Every validation failure surfaces as
`ConfigError`.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from yieldpoint.errors import ConfigError

logger = logging.getLogger(__name__)


class ChannelOverride(BaseModel):
    """Channel behaviour replacing the program's own configuration line."""
    order: Literal["fifo", "unordered"] = "fifo"
    reliability: Literal["reliable", "unreliable"] = "reliable"
    model_config = ConfigDict(frozen=True, extra="forbid")


class SchedulerConfig(BaseModel):
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    policy: Literal["uniform", "round-robin"] = "uniform"
    fairness_bound: int = Field(default=8, ge=1)
    fault_weight: float = Field(default=0.1, gt=0)
    granularity: Literal["atomic", "step"] = "atomic"
    model_config = ConfigDict(frozen=True, extra="forbid")


class RunConfig(BaseModel):
    max_steps: int = Field(default=200_000, ge=1)
    assertions: bool = False
    small_step: bool = False
    scheduler: SchedulerConfig = Field(default_factory=SchedulerConfig)
    channel: Optional[ChannelOverride] = None
    overrides: Dict[str, int] = Field(default_factory=dict)
    model_config = ConfigDict(frozen=True, extra="forbid")

    def with_overrides(self, **changes) -> "RunConfig":
        """A copy with the non-None `changes` applied; scheduler keys are routed to `scheduler`."""
        sched_keys = set(SchedulerConfig.model_fields)
        sched = {k: v for k, v in changes.items() if k in sched_keys and v is not None}
        top = {k: v for k, v in changes.items() if k not in sched_keys and v is not None}
        data = self.model_dump()
        data["scheduler"].update(sched)
        if "overrides" in top:
            data["overrides"] = {**data["overrides"], **top.pop("overrides")}
        data.update(top)
        return validate_run_config(data)


class CliConfig(BaseModel):
    """The flag surface of one CLI invocation."""
    command: Literal["parse", "desugar", "convert", "incrementalize", "run", "bench", "diff"]
    input: Path
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    seeds: int = Field(default=1, ge=1)
    max_steps: int = Field(default=200_000, ge=1)
    channel: Optional[ChannelOverride] = None
    emit: Literal["text", "json", "converted", "incremental"] = "text"
    assertions: bool = False
    model_config = ConfigDict(frozen=True, extra="forbid")


def validate_run_config(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid run configuration: {exc}") from exc


def parse_channel(text: Optional[str]) -> Optional[ChannelOverride]:
    """`fifo,reliable`-style flag value; either word may be omitted."""
    if not text:
        return None
    data = {}
    for word in (w.strip() for w in text.split(",") if w.strip()):
        key = "order" if word in ("fifo", "unordered") else "reliability"
        if key in data:
            raise ConfigError(f"channel override names two {key} values")
        data[key] = word
    try:
        return ChannelOverride.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid channel override {text!r}") from exc


def load_config(path: str | Path) -> RunConfig:
    """Read a YAML run configuration; an empty file gives the defaults."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    logger.debug("loaded configuration from %s", path)
    return validate_run_config(data)


if __name__ == "__main__":
    cfg = RunConfig().with_overrides(seed=3, max_steps=10, overrides={"n": 2})
    assert cfg.scheduler.seed == 3 and cfg.max_steps == 10 and cfg.overrides == {"n": 2}
    assert parse_channel("unordered").order == "unordered"
    print("Self-test passed.")
