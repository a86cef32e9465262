"""Every registered rewrite rule preserves the truth value of the query it rewrites.

Queries range over two sets `s` and `t` of small integers with a free
integer `p`; the original and the rewritten query are evaluated by the
runtime evaluator in the same environment.
"""
import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from yieldpoint.errors import StuckError, UnsupportedQueryError
from yieldpoint.parser import parse, parse_expr
from yieldpoint.printer import expr_to_str
from yieldpoint.qrewrite import decompose, select_conversion
from yieldpoint.registry import all_registered_rules, get_rule_for_key, rules_in_category
from yieldpoint.runtime.classes import ClassTable
from yieldpoint.runtime.evaluator import Evaluator
from yieldpoint.runtime.objects import SetObj
from yieldpoint.syntax import Binary, Iterator, Lit, PVar, Quant, Unary, Var
from yieldpoint.values import Address

from conftest import MINIMAL_HEADER

CLASSES = ClassTable(parse(MINIMAL_HEADER + "def main() skip"))
S, T = Address(0), Address(1)
ELEMENTS = (0, 1, 2, 3)
ALL_KEYS = list(all_registered_rules())


def evaluator(s, t) -> Evaluator:
    heap = {S: SetObj(s), T: SetObj(t)}
    return Evaluator(CLASSES, {S: "Set", T: "Set"}, heap)


def truth(e, s, t, p) -> bool:
    return evaluator(s, t).truth(e, {"s": S, "t": T, "p": p})


def subsets(items):
    return [set(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


# ---------------------------------------------------------------------------#
# Query generator

def atoms(bound):
    operands = st.sampled_from([Var(v) for v in bound] + [Var("p"), Lit(0), Lit(1), Lit(2)])
    ops = st.sampled_from(["lt", "le", "gt", "ge", "is", "ne"])
    return st.builds(Binary, ops, operands, operands)


def bodies(bound, depth=2):
    leaf = atoms(bound)
    if depth == 0:
        return leaf
    sub = bodies(bound, depth - 1)
    return st.one_of(
        leaf,
        st.builds(Binary, st.sampled_from(["and", "or", "implies"]), sub, sub),
        st.builds(lambda e: Unary("not", e), sub),
    )


def quantified(kind, var, domain, body):
    return Quant(kind, (Iterator(PVar(var), Var(domain)),), body)


kinds = st.sampled_from(["some", "each"])

single_queries = st.builds(lambda k, b: quantified(k, "x", "s", b), kinds, bodies(("x",)))
nested_queries = st.builds(
    lambda k1, k2, b: quantified(k1, "x", "s", quantified(k2, "y", "t", b)),
    kinds, kinds, bodies(("x", "y"), depth=1))
queries = st.one_of(single_queries, nested_queries)

small_sets = st.sets(st.sampled_from(ELEMENTS), max_size=4)
params = st.integers(min_value=-1, max_value=4)


@settings(max_examples=600, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(q=queries, s=small_sets, t=small_sets, p=params)
def test_every_applicable_rule_preserves_truth(q, s, t, p):
    expected = truth(q, s, t, p)
    for key in ALL_KEYS:
        rewritten = get_rule_for_key(key)().apply(q)
        if rewritten is None:
            continue
        assert truth(rewritten, s, t, p) == expected, f"{key}: {expr_to_str(q)} -> {expr_to_str(rewritten)}"


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(q=queries, s=small_sets, t=small_sets, p=params)
def test_selected_conversion_preserves_truth(q, s, t, p):
    try:
        choice = select_conversion(q)
    except UnsupportedQueryError:
        return
    assert truth(choice.result, s, t, p) == truth(q, s, t, p), choice.describe()


@settings(max_examples=200, deadline=None)
@given(q=queries, s=small_sets, t=small_sets, p=params)
def test_decomposition_preserves_truth(q, s, t, p):
    assert truth(decompose(q), s, t, p) == truth(q, s, t, p)


@pytest.mark.slow
@pytest.mark.parametrize("key", ALL_KEYS)
def test_rule_exhaustively_on_its_own_shape(key):
    """Each rule on a representative query, over every pair of subsets and every p."""
    samples = [parse_expr(text) for text in SHAPES]
    applied = [(q, r) for q in samples if (r := get_rule_for_key(key)().apply(q)) is not None]
    assert applied, f"no sample query fits {key}"
    for q, r in applied:
        for s, t in itertools.product(subsets(ELEMENTS), repeat=2):
            for p in range(-1, 5):
                assert truth(r, s, t, p) == truth(q, s, t, p), (key, expr_to_str(q), s, t, p)


COMPARISONS = ("lt", "le", "gt", "ge", "is", "ne")
ENVIRONMENTS = [(s, t, p) for s, t in itertools.product(subsets(ELEMENTS), repeat=2) for p in range(-1, 5)]


def comparisons(bound):
    operands = [Var(v) for v in bound] + [Var("p"), Lit(0), Lit(1), Lit(2)]
    return [Binary(op, a, b) for op in COMPARISONS for a in operands for b in operands]


def enumerated_bodies(bound):
    """Comparisons, their negations and connectives over shifted pairs of them, in a fixed order."""
    leaves = comparisons(bound)
    pairs = list(zip(leaves, leaves[37:]))
    return (leaves + [Unary("not", a) for a in leaves]
            + [Binary(c, a, b) for c in ("and", "or", "implies") for a, b in pairs])


def check_every_environment(queries):
    checked = 0
    for q in queries:
        rewrites = [(key, r) for key in ALL_KEYS if (r := get_rule_for_key(key)().apply(q)) is not None]
        for s, t, p in ENVIRONMENTS:
            expected = truth(q, s, t, p)
            for key, r in rewrites:
                assert truth(r, s, t, p) == expected, (key, expr_to_str(q), s, t, p)
        checked += len(rewrites)
    return checked


@pytest.mark.slow
def test_rules_on_enumerated_single_queries():
    bodies = enumerated_bodies(("x",))
    assert len(bodies) >= 500
    assert check_every_environment(quantified(k, "x", "s", b) for b in bodies for k in ("some", "each"))


@pytest.mark.slow
def test_rules_on_enumerated_nested_queries():
    bodies = comparisons(("x", "y"))[::3]
    queries = (quantified(k1, "x", "s", quantified(k2, "y", "t", b))
               for b in bodies for k1 in ("some", "each") for k2 in ("some", "each"))
    assert check_every_environment(queries)


SHAPES = [
    "some x in s | x > p",
    "each x in s | x > p",
    "some x in s | x != p and x < 2",
    "each x in s | not x is p",
    "some x in s | not x is p",
    "some x in s | x is 1 or p < x",
    "some x in s | x is 1 implies p < x",
    "each x in s | x is 1 and p < x",
    "each x in s | x is 1 or p < x",
    "each x in s | x is 1 implies p < x",
    "some x in s | some y in t | x < y",
    "each x in s | some y in t | x is y",
    "some x in s | each y in t | x <= y",
    "each x in s | each y in t | x != y",
] + [f"{k} x in s | {body}" for k in ("some", "each")
     for body in ("p <= x", "x >= p", "p >= x", "x <= p", "p < x", "x > p", "p > x", "x < p")]


def test_order_rows_cover_all_sixteen_shapes():
    keys = set()
    for text in SHAPES[-16:]:
        q = parse_expr(text)
        fitting = [k for k in rules_in_category("order") if get_rule_for_key(k)().apply(q) is not None]
        assert len(fitting) == 1, text
        keys.update(fitting)
    assert keys == {f"t3.r{i}" for i in range(1, 17)}


def test_rules_leave_unfitting_queries_alone():
    q = parse_expr("some x in s | x > p")
    assert get_rule_for_key("t1.r2")().apply(q) is None
    assert get_rule_for_key("t2.r1")().apply(q) is None
    assert get_rule_for_key("t4.r2")().apply(q) is None


def test_rule_results_match_their_descriptions():
    assert expr_to_str(get_rule_for_key("t1.r1")().apply(parse_expr("some x in s | x > p"))) \
        == expr_to_str(parse_expr("size({x in s | x > p}) != 0"))
    assert expr_to_str(get_rule_for_key("t1.r3")().apply(parse_expr("each x in s | x > p"))) \
        == expr_to_str(parse_expr("size({x in s | x <= p}) == 0"))
    assert expr_to_str(get_rule_for_key("t3.r5")().apply(parse_expr("some x in s | p < x"))) \
        == expr_to_str(parse_expr("s != {} and p < max(s)"))


def test_max_of_empty_domain_is_never_evaluated():
    r = get_rule_for_key("t3.r5")().apply(parse_expr("some x in s | p < x"))
    assert truth(r, set(), set(), 0) is False
    with pytest.raises(StuckError):
        evaluator(set(), set()).truth(parse_expr("p < max(s)"), {"s": S, "t": T, "p": 0})
