"""Incrementalization: hand-written golden programs, stored-result soundness and maintenance pieces."""
import dataclasses
import json

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from yieldpoint.alpha import alpha_diff
from yieldpoint.config import RunConfig
from yieldpoint.desugar import desugar_all, desugar_structure, is_generated
from yieldpoint.desugar.fresh import FreshNames
from yieldpoint.harness import diff_traces, run
from yieldpoint.incrementalize import (
    ClassFacts,
    apply_clock_rules,
    apply_table5,
    build_profile,
    find_expensive_queries,
    find_updates,
    incrementalize,
    incrementalize_with_ledger,
    static_match,
    stored_invariants,
)
from yieldpoint.incrementalize.plan import plan_query
from yieldpoint.parser import parse, parse_expr
from yieldpoint.qrewrite import select_conversion
from yieldpoint.syntax import SELF, Aggregate, Binary, Field, Lit, TupleExpr, Unary, Var
from yieldpoint.wellformed import require_well_formed

from conftest import MINIMAL_HEADER, surface


def renamable(*names):
    chosen = frozenset(names)
    return lambda n: is_generated(n) or n in chosen


@pytest.mark.parametrize("source, golden, names", [
    ("lamport_orig", "lamport_inc", ("earlier", "count1", "responded", "count2", "total")),
    ("lamport_min", "lamport_inc_min", ("ds", "responded", "count", "total")),
])
def test_matches_the_hand_written_program(source, golden, names):
    out = incrementalize(surface(source))
    expected = desugar_structure(surface(golden))
    assert alpha_diff(out, expected, renamable_right=renamable(*names)) is None


def test_ledger_for_lamport():
    out, ledger = incrementalize_with_ledger(surface("lamport_orig"))
    assert sorted(i.kind for i in ledger.invariants) == ["count", "count", "count", "set", "set"]
    assert sorted(ledger.eliminated) == ["received", "sent"]
    assert out.configuration.record == ()
    assert len(ledger.conversions) == 2 and all(c["rules"] for c in ledger.conversions)
    assert ledger.diagnostics == []
    doc = json.loads(ledger.to_json())
    assert set(doc) == {"schema", "invariants", "sites", "snippets", "conversions", "handlers",
                        "eliminated", "diagnostics"}
    assert doc["handlers"] and all(h.startswith("P: receive") for h in doc["handlers"])


def test_program_without_expensive_awaits_is_returned_as_is():
    p = surface("lamport_inc")
    out, ledger = incrementalize_with_ledger(p)
    assert out is p and ledger.invariants == []


def test_query_reading_a_method_parameter_is_left_alone():
    text = """
configuration fifo reliable;
class P extends Process:
  def wait(k):
    s = {}
    await some x in s | x > k
  end
  def run():
    wait(1)
  end
end
def main() skip
"""
    out, ledger = incrementalize_with_ledger(require_well_formed(parse(text)))
    assert ledger.invariants == []
    assert [d.rule for d in ledger.diagnostics] == ["inc-local"]


def test_expensive_queries_remember_their_class_and_place():
    text = MINIMAL_HEADER + """class P extends Process:
  def setup():
    s = {}
  end
  def run():
    await each x in s | x > 0
  end
end
def main() skip
"""
    p = desugar_structure(require_well_formed(parse(text)))
    [q] = find_expensive_queries(p)
    assert q.cls == "P"
    assert (q.index, q.clause) == (0, 0)
    assert q.params == frozenset({"s"})


# ---------------------------------------------------------------------------#
# Stored results stay equal to their definitions

def keeper(ops) -> str:
    sends = "\n".join(f"  send {msg} to k" for msg in ops)
    return f"""
tags 'add', 'del', 'clear', 'stop', 'done';
configuration fifo reliable;

class Keeper extends Process:
  def setup(lim):
    s = {{}}
    limit = lim
    stopped = false
  end
  receive ('add', x):
    s.add(x)
  end
  receive ('del', x):
    s.del(x)
  end
  receive ('clear',):
    s = {{}}
  end
  receive ('stop',):
    stopped = true
  end
  def run():
    await stopped and (each x in s | x < limit) and (s == {{}} or max(s) < 8) and sum(s) >= 0
    output ('done', size(s))
  end
end

def main():
  k = new Keeper
  k.setup(5)
  k.start()
{sends}
  send ('stop',) to k
end
"""


messages = st.one_of(
    st.builds(lambda v: f"('add', {v})", st.integers(0, 9)),
    st.builds(lambda v: f"('del', {v})", st.integers(0, 9)),
    st.just("('clear',)"),
)


def check_keeper(ops, seed):
    p = require_well_formed(parse(keeper(ops)))
    out, ledger = incrementalize_with_ledger(p)
    assert ledger.invariants
    cfg = RunConfig().with_overrides(seed=seed, assertions=True)
    inc = run(desugar_all(out), cfg, stored_invariants(ledger))
    orig = run(desugar_all(p), RunConfig().with_overrides(seed=seed))
    assert inc.outcome.kind == orig.outcome.kind
    assert inc.outcome.kind in ("terminated", "deadlocked")
    assert diff_traces(orig.trace, inc.trace, "outputs").equal


def test_stored_sum_is_defined_by_the_aggregate():
    p = require_well_formed(parse(keeper(["('add', 3)", "('add', 4)"])))
    out, ledger = incrementalize_with_ledger(p)
    [total] = [i for i in ledger.invariants if i.kind == "sum"]
    assert total.query == Aggregate("sum", Field(SELF, "s"))
    cfg = RunConfig().with_overrides(seed=0, assertions=True)
    result = run(desugar_all(out), cfg, stored_invariants(ledger))
    assert result.outcome.kind == "terminated"


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(ops=st.lists(messages, max_size=8), seed=st.integers(0, 2 ** 16))
def test_stored_results_match_their_definitions(ops, seed):
    check_keeper(ops, seed)


@pytest.mark.slow
@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(ops=st.lists(messages, max_size=16), seed=st.integers(0, 2 ** 32))
def test_stored_results_match_their_definitions_at_length(ops, seed):
    check_keeper(ops, seed)


@pytest.mark.parametrize("seed", range(5))
def test_lamport_stored_results_hold_under_assertions(seed):
    out, ledger = incrementalize_with_ledger(surface("lamport_orig"))
    cfg = RunConfig().with_overrides(seed=seed, overrides={"n": 3, "rounds": 2}, assertions=True)
    result = run(desugar_all(out), cfg, stored_invariants(ledger))
    assert result.outcome.kind == "terminated"


# ---------------------------------------------------------------------------#
# Pieces

def request_pattern():
    q = parse_expr("some ('request', c2, p2) in q | true")
    return q.iterators[0].pattern


def test_static_match_of_a_tuple_expression():
    pat = request_pattern()
    tag = Lit(pat.items[0].value, "request")
    m = static_match(pat, TupleExpr((tag, Var("a"), Var("b"))))
    assert m is not None
    assert m.shape == [] and m.guards == []
    assert m.theta == {"c2": Var("a"), "p2": Var("b")}


def test_static_match_rejects_another_tag():
    pat = request_pattern()
    other = Lit(pat.items[0].value - 1, "ack")
    assert static_match(pat, TupleExpr((other, Var("a"), Var("b")))) is None
    assert static_match(pat, TupleExpr((Var("a"), Var("b")))) is None


def test_static_match_of_an_opaque_value_tests_its_shape():
    m = static_match(request_pattern(), Var("x"))
    assert Unary("isTuple", Var("x")) in m.shape
    assert Binary("is", Unary("len", Var("x")), Lit(3)) in m.shape
    assert m.theta["c2"] == Binary("select", Var("x"), Lit(2))


def test_static_match_repeated_variable_adds_a_guard():
    pat = parse_expr("some (a, a) in q | true").iterators[0].pattern
    m = static_match(pat, TupleExpr((Var("u"), Var("v"))))
    assert m.guards == [Binary("is", Var("v"), Var("u"))]


def first_lamport_query():
    p = desugar_structure(surface("lamport_orig"))
    c = p.cls("P")
    q = find_expensive_queries(p)[0]
    facts = ClassFacts.of(p, c)
    profile = build_profile(p, c)
    fresh = FreshNames.for_program(p)
    planned = plan_query(q, select_conversion(q, profile).result, facts, profile, fresh, {})
    return facts, fresh, find_updates(p, q), planned.new


def test_size_rules_alone_recompute_at_the_clock_read():
    facts, fresh, sites, invariants = first_lamport_query()
    plan = apply_table5(facts, fresh, sites, invariants)
    at_clock = [s for s in plan.snippets if s.site.field == "c"]
    assert at_clock
    assert all(s.cost.startswith("O(") for s in plan.snippets)


def test_clock_rules_specialize_the_clock_read():
    facts, fresh, sites, invariants = first_lamport_query()
    clock = apply_clock_rules(facts, fresh, sites, invariants)
    assert clock and all(s.site.field == "c" for s in clock)
    plain = [s for s in apply_table5(facts, fresh, sites, invariants).snippets if s.site.field == "c"]
    assert clock[0].before + clock[0].after != plain[0].before + plain[0].after


def test_clock_rules_need_a_lamport_clock():
    p = desugar_structure(surface("lamport_orig"))
    p = dataclasses.replace(p, configuration=dataclasses.replace(p.configuration, clock="none"))
    c = p.cls("P")
    q = find_expensive_queries(p)[0]
    facts = ClassFacts.of(p, c)
    assert not facts.lamport
    assert apply_clock_rules(facts, FreshNames.for_program(p), find_updates(p, q), []) == []
