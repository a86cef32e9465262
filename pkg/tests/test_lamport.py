"""Lamport mutual exclusion end to end: safety, fairness, message counts and the cost of waiting."""
import pytest

from yieldpoint.harness import check_safety_fairness, diff_traces, measure_message_complexity, run

from conftest import config, core, incremental, seeds

ROUNDS = 3


def variants():
    program, invariants = incremental("lamport_orig")
    return {"original": (core("lamport_orig"), ()), "incremental": (program, invariants)}


def check_run(program, n, seed, invariants=(), **changes):
    result = run(program, config(seed=seed, n=n, rounds=ROUNDS, **changes), invariants)
    assert result.outcome.kind == "terminated", result.outcome.to_json()
    report = check_safety_fairness(result.trace)
    assert report.ok, report.safety_violations + report.fairness_violations
    assert report.entries == n * ROUNDS
    counts = measure_message_complexity(result.trace).counts()
    assert counts == [3 * (n - 1)] * (n * ROUNDS)
    return result


@pytest.mark.parametrize("variant", ["original", "incremental"])
@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("seed", seeds(3))
def test_mutual_exclusion(variant, n, seed):
    program, _ = variants()[variant]
    check_run(program, n, seed)


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["original", "incremental"])
@pytest.mark.parametrize("n", [2, 3, 5])
def test_mutual_exclusion_many_seeds(variant, n):
    program, _ = variants()[variant]
    for seed in seeds(100):
        check_run(program, n, seed)


@pytest.mark.parametrize("seed", seeds(3))
def test_incremental_run_keeps_its_stored_results(seed):
    program, invariants = incremental("lamport_orig")
    check_run(program, 3, seed, invariants, assertions=True)


@pytest.mark.parametrize("seed", seeds(3))
def test_both_versions_behave_the_same(seed):
    orig = run(core("lamport_orig"), config(seed=seed, n=5, rounds=ROUNDS))
    inc = run(incremental("lamport_orig")[0], config(seed=seed, n=5, rounds=ROUNDS))
    diff = diff_traces(orig.trace, inc.trace, "observable")
    assert diff.equal, diff.describe()


def space_by_requests(n, requests):
    program, _ = incremental("lamport_orig")
    inc = [run(program, config(n=n, rounds=r)).metrics.stored_state for r in requests]
    orig = [run(core("lamport_orig"), config(n=n, rounds=r)).metrics for r in requests]
    return inc, [m.max_received_length for m in orig], [m.stored_state for m in orig]


def test_incremental_state_does_not_grow_with_requests():
    inc, received, stored = space_by_requests(3, [1, 4])
    assert inc[0] == inc[1]
    assert received[0] < received[1]
    assert stored[0] < stored[1]


@pytest.mark.slow
def test_space_over_many_requests():
    inc, received, _ = space_by_requests(5, [1, 5, 10, 20])
    assert len(set(inc)) == 1
    assert all(a < b for a, b in zip(received, received[1:]))


def test_waiting_cost():
    program, _ = incremental("lamport_orig")
    inc = [run(program, config(n=n)).metrics.max_inspections for n in (2, 5, 8)]
    assert max(inc) <= 2

    orig = [run(core("lamport_orig"), config(n=n)).metrics.max_inspections for n in (2, 5, 8)]
    assert orig[1] > 2
    assert orig[0] < orig[1] < orig[2]


@pytest.mark.parametrize("name", ["lamport_simple", "lamport_min", "lamport_inc", "lamport_inc_min"])
def test_other_corpus_programs(name):
    result = run(core(name), config(seed=1, n=3, rounds=2))
    assert result.outcome.kind == "terminated"
    assert check_safety_fairness(result.trace).ok


def test_incrementalized_minimal_variant():
    program, invariants = incremental("lamport_min")
    result = run(program, config(seed=3, n=3, rounds=2, assertions=True), invariants)
    assert result.outcome.kind == "terminated"
    assert check_safety_fairness(result.trace).ok
