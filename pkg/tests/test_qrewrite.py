import pytest

from yieldpoint.desugar import desugar_structure
from yieldpoint.errors import UnsupportedQueryError
from yieldpoint.incrementalize import build_profile, find_expensive_queries
from yieldpoint.parser import parse_expr
from yieldpoint.printer import expr_to_str
from yieldpoint.qrewrite import (
    CONST,
    CollectionUpdates,
    LINEAR,
    LOG,
    QUADRATIC,
    UpdateProfile,
    convert_nested,
    convert_order,
    convert_single,
    cost_rank,
    cost_str,
    decompose,
    select_conversion,
    worst,
)
from yieldpoint.rules.base import has_quant

from conftest import surface


def test_cost_ladder():
    assert [cost_rank(c) for c in (CONST, LOG, LINEAR, QUADRATIC)] == [0, 1, 2, 3]
    assert cost_rank(worst(CONST, LINEAR, LOG)) == 2
    assert cost_str(CONST) == "O(1)"
    assert cost_str(LINEAR) == "O(n)"


def test_convert_single_offers_both_each_conversions():
    choices = convert_single(parse_expr("each x in s | x > p"))
    assert sorted(c.rules[0] for c in choices) == ["t1.r2", "t1.r3"]


def test_convert_single_prefers_the_sized_form_when_negation_does_not_simplify():
    q = parse_expr("each x in s | x > p")
    assert convert_single(q)[0].rules == ("t1.r3",)
    sized = UpdateProfile(sized=frozenset({"s"}))
    q2 = parse_expr("each x in s | t.contains(x)")
    assert convert_single(q2, sized)[0].rules == ("t1.r2",)
    assert convert_single(q2)[0].rules == ("t1.r3",)


def test_convert_nested_and_order():
    assert convert_nested(parse_expr("each x in s | some y in t | x is y")).rules == ("t2.r2",)
    assert convert_nested(parse_expr("some x in s | x > p")) is None
    assert convert_order(parse_expr("each x in s | p < x")).rules == ("t3.r13",)
    assert convert_order(parse_expr("some x in s | x is p")) is None


def test_two_alternations_are_unsupported():
    q = parse_expr("each x in s | some y in t | each z in u | x < z")
    with pytest.raises(UnsupportedQueryError) as info:
        select_conversion(q)
    assert info.value.query == q


def test_decompose_splits_conjunctions():
    d = decompose(parse_expr("each x in s | x > 0 and p < x"))
    assert expr_to_str(d) == expr_to_str(parse_expr("(each x in s | x > 0) and (each x in s | p < x)"))


def test_quantifier_free_conjunct_comes_back_unchanged():
    e = parse_expr("count == total")
    choice = select_conversion(e)
    assert choice.result == e and choice.rules == ()


def test_order_conversion_is_cheaper_under_additions_only():
    q = parse_expr("some x in s | p < x")
    growing = select_conversion(q, UpdateProfile.additions_only("s"))
    assert growing.rules == ("t3.r5",)
    assert cost_rank(growing.time) == 0


def test_choice_json():
    doc = select_conversion(parse_expr("some x in s | x > p")).to_json()
    assert set(doc) == {"source", "result", "rules", "time", "space"}
    assert doc["source"] == "some x in s | x > p"


def test_lamport_conjuncts():
    p = desugar_structure(surface("lamport_orig"))
    queries = find_expensive_queries(p)
    assert len(queries) == 2
    assert all(q.cls == "P" and q.where == "method cs" for q in queries)
    profile = build_profile(p, p.cls("P"))
    first, second = (select_conversion(q, profile) for q in queries)
    assert "t1.r3" in first.rules
    assert "t2.r2" in second.rules
    assert not has_quant(first.result) and not has_quant(second.result)


def test_lamport_profile():
    p = desugar_structure(surface("lamport_orig"))
    profile = build_profile(p, p.cls("P"))
    assert profile.collections["q"].may_add and profile.collections["q"].may_delete
    assert profile.collections["s"] == CollectionUpdates(False, False)
