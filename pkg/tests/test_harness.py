import pytest

from yieldpoint.config import ChannelOverride, RunConfig, SchedulerConfig
from yieldpoint.errors import ConfigError, TraceError
from yieldpoint.harness import (
    BenchRow,
    Runner,
    Scheduler,
    Trace,
    TraceEvent,
    apply_overrides,
    bench,
    diff_traces,
    rows_to_csv,
    run,
)

from conftest import MINIMAL_HEADER, config, core, core_of


# ---------------------------------------------------------------------------#
# Scheduler

def test_round_robin_cycles_through_candidates():
    sched = Scheduler(SchedulerConfig(policy="round-robin"))
    cands = [("a", 1.0), ("b", 1.0), ("c", 1.0)]
    assert [sched.choose(cands) for _ in range(4)] == ["a", "b", "c", "a"]


def test_uniform_choices_repeat_under_the_same_seed():
    cands = [(k, 1.0) for k in "abcdef"]
    first = Scheduler(SchedulerConfig(seed=11))
    second = Scheduler(SchedulerConfig(seed=11))
    assert [first.choose(cands) for _ in range(30)] == [second.choose(cands) for _ in range(30)]


def test_fairness_bound_forces_a_starved_candidate():
    sched = Scheduler(SchedulerConfig(seed=0, fairness_bound=2))
    cands = [("heavy", 1e9), ("light", 1e-9)]
    picks = [sched.choose(cands, fair=["heavy", "light"]) for _ in range(3)]
    assert "light" in picks


def test_scheduler_needs_a_candidate():
    with pytest.raises(ValueError):
        Scheduler(SchedulerConfig()).choose([])


# ---------------------------------------------------------------------------#
# Runs

def test_same_seed_same_trace():
    p = core("lamport_orig")
    a = run(p, config(seed=4))
    b = run(p, config(seed=4))
    assert a.trace.to_jsonl() == b.trace.to_jsonl()


def test_overrides_set_the_process_count():
    result = run(core("lamport_orig"), config(n=2))
    assert result.outcome.kind == "terminated"
    assert len(result.state.processes()) == 3


def test_unknown_override_is_rejected():
    with pytest.raises(ConfigError):
        apply_overrides(core("lamport_orig"), {"nope": 1})
    with pytest.raises(ConfigError):
        run(core("lamport_orig"), RunConfig(overrides={"nope": 1}))


def test_step_limit():
    result = run(core("lamport_orig"), config(max_steps=10))
    assert result.outcome.kind == "step-limit"
    assert result.outcome.exit_code == 4
    assert result.metrics.transitions <= 10


def test_deadlock_outcome():
    result = run(core_of(MINIMAL_HEADER + "def main():\n  await false\nend"))
    assert result.outcome.kind == "deadlocked"
    assert result.outcome.exit_code == 2


def test_stuck_outcome_names_the_process():
    result = run(core_of(MINIMAL_HEADER + "def main():\n  x = select((1, 2), 5)\nend"))
    assert result.outcome.kind == "stuck"
    assert result.outcome.exit_code == 3
    assert list(result.outcome.stuck) == ["@p0"]


@pytest.mark.parametrize("changes", [
    {"policy": "round-robin"},
    {"granularity": "step"},
    {"small_step": True},
    {"assertions": True},
])
def test_run_modes_all_terminate(changes):
    result = run(core("lamport_orig"), config(seed=2, **changes))
    assert result.outcome.kind == "terminated"
    assert result.metrics.cs_entries == 3


def test_channel_override_replaces_the_configuration_line():
    cfg = config(channel=ChannelOverride(order="unordered", reliability="unreliable"))
    runner = Runner(core("lamport_orig"), cfg)
    assert (runner.machine.order, runner.machine.reliability) == ("unordered", "unreliable")


def test_metrics_json_carries_the_outcome():
    result = run(core("lamport_orig"), config())
    doc = result.metrics.to_json(result.outcome.to_json())
    assert '"outcome"' in doc and '"terminated"' in doc


# ---------------------------------------------------------------------------#
# Traces

def test_trace_file_round_trip(tmp_path):
    result = run(core("lamport_orig"), config(seed=1))
    path = tmp_path / "run.jsonl"
    result.trace.write(path)
    back = Trace.read(path)
    assert back.events == result.trace.events
    assert back.header == result.trace.header
    assert diff_traces(result.trace, back, "all").equal


def test_trace_header_names_seed_and_program():
    trace = run(core("lamport_orig"), config(seed=5)).trace
    assert trace.header["seed"] == 5
    assert len(trace.header["program"]) == 16


@pytest.mark.parametrize("text", [
    "",
    "not json\n",
    '{"schema": 99}\n',
    '{"schema": 1}\n{"step": 1, "rule": "output", "process": "@p0", "payload": {}}\n',
    '{"schema": 1}\n{"step": 0, "process": "@p0"}\n',
])
def test_malformed_traces_are_rejected(text):
    with pytest.raises(TraceError):
        Trace.from_jsonl(text)


def test_missing_trace_file(tmp_path):
    with pytest.raises(TraceError):
        Trace.read(tmp_path / "absent.jsonl")


def output_trace(*values, sends=()):
    events = [TraceEvent(i, "send", "@p1", {"message": m}) for i, m in enumerate(sends)]
    events += [TraceEvent(len(events) + i, "output", "@p0", {"value": v}) for i, v in enumerate(values)]
    return Trace({}, events)


def test_diff_reports_the_first_divergence():
    d = diff_traces(output_trace(1, 2, 3), output_trace(1, 5, 3))
    assert not d.equal and d.index == 1
    assert "first divergence at projected event 1" in d.describe()


def test_diff_of_different_lengths():
    d = diff_traces(output_trace(1, 2), output_trace(1))
    assert not d.equal and d.index == 1 and d.right is None


def test_outputs_projection_ignores_sends():
    left = output_trace(1, sends=[["ack", 1]])
    right = output_trace(1)
    assert not diff_traces(left, right).equal
    assert diff_traces(left, right, "outputs").equal


def test_unknown_projection():
    with pytest.raises(TraceError):
        diff_traces(Trace(), Trace(), "sideways")


# ---------------------------------------------------------------------------#
# Sweeps

def test_bench_rows_and_csv():
    rows = bench([("original", core("lamport_orig"))], [2], [1, 2], RunConfig(), progress=False)
    assert [(r.n, r.requests, r.outcome) for r in rows] == [(2, 1, "terminated"), (2, 2, "terminated")]
    assert [r.messages for r in rows] == [6, 12]
    assert all(r.messages_per_request == 3 for r in rows)
    lines = rows_to_csv(rows).splitlines()
    assert lines[0].split(",") == list(BenchRow.__dataclass_fields__)
    assert lines[1].startswith("original,2,1,terminated,6,")
