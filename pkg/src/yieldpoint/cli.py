# File: yieldpoint/cli.py
"""Command-line surface: parse, desugar, convert, incrementalize, run, bench and diff.

Every command reads one program, either a path or the name of a bundled
corpus program (`lamport_orig`), and writes its artifact to stdout.
Diagnostics go to stderr as JSON lines; a failing command exits with 1, a
run with the exit code of its outcome.
"""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click
from rich.console import Console
from rich.logging import RichHandler

from yieldpoint.astutil import to_json_tree
from yieldpoint.config import CliConfig, RunConfig, load_config, parse_channel
from yieldpoint.desugar import FreshNames, desugar_all, desugar_structure
from yieldpoint.diagnostics import Diagnostic, render_jsonl
from yieldpoint.errors import WellFormednessError, YieldpointError
from yieldpoint.examples import corpus_text
from yieldpoint.harness import EXIT_CODES, Trace, bench, diff_traces, rows_to_csv, run
from yieldpoint.harness.trace import PROJECTIONS
from yieldpoint.incrementalize import (
    build_profile,
    find_expensive_queries,
    incrementalize_with_ledger,
    stored_invariants,
)
from yieldpoint.parser import parse
from yieldpoint.printer import expr_to_str, pretty
from yieldpoint.qrewrite import select_conversion
from yieldpoint.syntax import Program
from yieldpoint.wellformed import require_well_formed

logger = logging.getLogger(__name__)

FAILURE = 1
SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------#
# Helpers

def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def read_source(name: str) -> str:
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    return corpus_text(name)


def load_program(name: str) -> Program:
    """Parse and check a program; raises the first YieldpointError met."""
    return require_well_formed(parse(read_source(name)))


def diagnostics_of(exc: YieldpointError) -> List[Diagnostic]:
    if isinstance(exc, WellFormednessError):
        return exc.diagnostics
    diag = getattr(exc, "diagnostic", None)
    if diag is not None:
        return [diag]
    rule = type(exc).__name__
    return [Diagnostic(rule=rule, message=str(exc))]


def _fail(exc: YieldpointError) -> None:
    click.echo(render_jsonl(diagnostics_of(exc), {"error": type(exc).__name__}), err=True, nl=False)
    sys.exit(FAILURE)


def run_config(config: Optional[str], seed: Optional[int], max_steps: Optional[int], channel: Optional[str],
               assertions: bool, n: Optional[int], rounds: Optional[int],
               policy: Optional[str] = None, granularity: Optional[str] = None) -> RunConfig:
    """File configuration (or defaults) with the flags given on the command line applied."""
    base = load_config(config) if config else RunConfig()
    overrides = {k: v for k, v in (("n", n), ("rounds", rounds)) if v is not None}
    return base.with_overrides(
        seed=seed, max_steps=max_steps, policy=policy, granularity=granularity,
        channel=parse_channel(channel), assertions=assertions or None,
        overrides=overrides or None,
    )


def _ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------#
# Commands

@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log every pass and rule at DEBUG level.")
@click.version_option(package_name="yieldpoint")
def main(verbose: bool) -> None:
    """Compile, optimize and simulate distributed algorithms."""
    _setup_logging(verbose)


@main.command("parse")
@click.argument("source")
def parse_cmd(source: str) -> None:
    """Print the syntax tree of SOURCE as JSON."""
    try:
        p = load_program(source)
    except YieldpointError as exc:
        _fail(exc)
    click.echo(json.dumps({"schema": SCHEMA_VERSION, "program": to_json_tree(p)}, indent=2))


@main.command("desugar")
@click.argument("source")
@click.option("--emit", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--structural", is_flag=True, help="Stop after the structural layer; awaits keep their queries.")
def desugar_cmd(source: str, emit: str, structural: bool) -> None:
    """Print the core program SOURCE translates to."""
    try:
        p = load_program(source)
        fresh = FreshNames.for_program(p)
        core = desugar_structure(p, fresh) if structural else desugar_all(p, fresh)
    except YieldpointError as exc:
        _fail(exc)
    if emit == "json":
        click.echo(json.dumps({"schema": SCHEMA_VERSION, "program": to_json_tree(core)}, indent=2))
    else:
        click.echo(pretty(core))


@main.command("convert")
@click.argument("source")
@click.option("--emit", type=click.Choice(["text", "json", "converted"]), default="text", show_default=True,
              help="text: one line per conjunct; json: the rule ledger; converted: only the results.")
def convert_cmd(source: str, emit: str) -> None:
    """Convert every quantified await conjunct of SOURCE into aggregate queries."""
    try:
        p = load_program(source)
        p = desugar_structure(p, FreshNames.for_program(p))
    except YieldpointError as exc:
        _fail(exc)
    entries, diags = [], []
    for q in find_expensive_queries(p):
        try:
            choice = select_conversion(q, build_profile(p, p.cls(q.cls)))
        except YieldpointError as exc:
            diags.append(Diagnostic.at(q.expr.span, "convert", str(exc), severity="warning"))
            continue
        entries.append((q, choice))
    if emit == "json":
        doc = {"schema": SCHEMA_VERSION,
               "conversions": [dict(choice.to_json(), **{"class": q.cls, "where": q.where}) for q, choice in entries],
               "diagnostics": [json.loads(d.to_json()) for d in diags]}
        click.echo(json.dumps(doc, indent=2))
    else:
        for q, choice in entries:
            if emit == "converted":
                click.echo(expr_to_str(choice.result))
            else:
                click.echo(f"{q.cls} {q.where}: {expr_to_str(q.expr)}")
                click.echo(f"  => {expr_to_str(choice.result)}  [{', '.join(choice.rules)}]")
    if diags:
        click.echo(render_jsonl(diags), err=True, nl=False)


@main.command("incrementalize")
@click.argument("source")
@click.option("--emit", type=click.Choice(["text", "json", "incremental"]), default="text", show_default=True,
              help="text: the program; json: the ledger; incremental: the program, then the ledger.")
def incrementalize_cmd(source: str, emit: str) -> None:
    """Store the results of expensive await conditions and maintain them incrementally."""
    try:
        out, ledger = incrementalize_with_ledger(load_program(source))
    except YieldpointError as exc:
        _fail(exc)
    if emit in ("text", "incremental"):
        click.echo(pretty(out))
    if emit in ("json", "incremental"):
        click.echo(ledger.to_json())
    if ledger.diagnostics:
        click.echo(render_jsonl(ledger.diagnostics), err=True, nl=False)


def _prepare(source: str, incremental: bool, assertions: bool):
    p = load_program(source)
    invariants = []
    if incremental:
        p, ledger = incrementalize_with_ledger(p)
        if assertions:
            invariants = stored_invariants(ledger)
    return desugar_all(p), invariants


def _trace_path(base: Path, seed: int, many: bool) -> Path:
    return base.with_name(f"{base.stem}.seed{seed}{base.suffix}") if many else base


@main.command("run")
@click.argument("source")
@click.option("--n", "n", type=int, help="Number of processes (the `n` assigned in main).")
@click.option("--rounds", type=int, help="Critical sections per process (the `rounds` assigned in main).")
@click.option("--seed", type=int, help="Scheduler seed.  [default: 0]")
@click.option("--seeds", type=int, default=1, show_default=True, help="Run SEEDS consecutive seeds from --seed.")
@click.option("--max-steps", type=int, help="Transition limit.  [default: 200000]")
@click.option("--channel", help="Channel override, e.g. 'unordered,unreliable'.")
@click.option("--policy", type=click.Choice(["uniform", "round-robin"]))
@click.option("--granularity", type=click.Choice(["atomic", "step"]))
@click.option("--incremental", is_flag=True, help="Run the incrementalized program.")
@click.option("--assertions", is_flag=True,
              help="Audit heaps after every transition, and stored results too with --incremental.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="YAML run configuration.")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write the trace here as JSON lines.")
@click.option("--emit", type=click.Choice(["text", "json"]), default="text", show_default=True)
def run_cmd(source: str, n, rounds, seed, seeds, max_steps, channel, policy, granularity, incremental, assertions,
            config_path, trace_path, emit) -> None:
    """Run SOURCE under the seeded scheduler and report outcome and metrics."""
    try:
        cfg = run_config(config_path, seed, max_steps, channel, assertions, n, rounds, policy, granularity)
        CliConfig(command="run", input=Path(source), seed=cfg.scheduler.seed, seeds=seeds,
                  max_steps=cfg.max_steps, channel=cfg.channel, emit=emit, assertions=cfg.assertions)
        program, invariants = _prepare(source, incremental, cfg.assertions)
    except YieldpointError as exc:
        _fail(exc)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    first = cfg.scheduler.seed
    worst = 0
    for s in range(first, first + seeds):
        try:
            result = run(program, cfg.with_overrides(seed=s), invariants)
        except YieldpointError as exc:
            _fail(exc)
        if trace_path:
            result.trace.write(_trace_path(Path(trace_path), s, seeds > 1))
        if emit == "json":
            click.echo(result.metrics.to_json(dict(result.outcome.to_json(), seed=s)))
        else:
            m = result.metrics
            click.echo(f"seed {s}: {result.outcome.kind}  transitions={m.transitions} "
                       f"messages={sum(m.messages_by_tag.values())} cs={m.cs_entries} "
                       f"max_received={m.max_received_length} max_inspections={m.max_inspections} "
                       f"stored_state={m.stored_state}")
            for proc, why in result.outcome.stuck.items():
                click.echo(f"  {proc} stuck: {why}")
        worst = max(worst, result.outcome.exit_code)
    sys.exit(worst)


@main.command("bench")
@click.argument("source")
@click.option("--ns", default="2,3,5", show_default=True, help="Process counts to sweep.")
@click.option("--requests", default="1,5,10", show_default=True, help="Critical sections per process to sweep.")
@click.option("--variant", "variants", multiple=True, type=click.Choice(["original", "incremental"]),
              help="Program variants to run.  [default: both]")
@click.option("--seed", type=int, help="Scheduler seed.  [default: 0]")
@click.option("--max-steps", type=int)
@click.option("--channel")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--no-progress", is_flag=True, help="Hide the progress bar.")
def bench_cmd(source: str, ns: str, requests: str, variants, seed, max_steps, channel, config_path,
              no_progress: bool) -> None:
    """Sweep process and request counts over SOURCE and print a CSV of operation counts."""
    try:
        cfg = run_config(config_path, seed, max_steps, channel, False, None, None)
        p = load_program(source)
        chosen = variants or ("original", "incremental")
        programs = []
        for name in chosen:
            q = incrementalize_with_ledger(p)[0] if name == "incremental" else p
            programs.append((name, desugar_all(q)))
        rows = bench(programs, _ints(ns), _ints(requests), cfg, progress=not no_progress)
    except YieldpointError as exc:
        _fail(exc)
    click.echo(rows_to_csv(rows), nl=False)


@main.command("diff")
@click.argument("left", type=click.Path(exists=True, dir_okay=False))
@click.argument("right", type=click.Path(exists=True, dir_okay=False))
@click.option("--projection", type=click.Choice(sorted(PROJECTIONS)), default="observable", show_default=True)
def diff_cmd(left: str, right: str, projection: str) -> None:
    """Compare two trace files; exit 0 when their projections are equal."""
    try:
        d = diff_traces(Trace.read(left), Trace.read(right), projection)
    except YieldpointError as exc:
        _fail(exc)
    click.echo(d.describe())
    sys.exit(0 if d.equal else FAILURE)


__all__ = ["EXIT_CODES", "main"]


if __name__ == "__main__":
    main()
