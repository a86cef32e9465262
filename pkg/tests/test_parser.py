import pytest

from yieldpoint.errors import LexError, ParseError
from yieldpoint.examples import corpus_names, corpus_text
from yieldpoint.parser import parse, parse_expr, parse_or_diagnostics
from yieldpoint.printer import expr_to_str, pretty
from yieldpoint.syntax import (
    Aggregate,
    Assign,
    Await,
    Binary,
    Comprehension,
    Defined,
    EmptySet,
    Field,
    If,
    Iterator,
    Lit,
    PTuple,
    PVar,
    PWild,
    Quant,
    Skip,
    TupleExpr,
    Unary,
    Var,
)
from yieldpoint.values import Address, tag_value

from conftest import MINIMAL_HEADER


def body_of(text: str):
    return parse(MINIMAL_HEADER + "def main():\n" + text + "\nend\n").main.body


def test_configuration_line():
    p = parse("tags 'a', 'b';\nconfiguration unordered unreliable lamport stamps 'b' 2 record sent;\n"
              "def main() skip")
    conf = p.configuration
    assert (conf.order, conf.reliability, conf.clock) == ("unordered", "unreliable", "lamport")
    assert conf.stamps == (("b", 2),)
    assert conf.record == ("sent",)
    assert p.tags == ("a", "b")


def test_record_none_and_default():
    assert parse("configuration fifo reliable record none; def main() skip").configuration.record == ()
    assert parse("configuration fifo reliable; def main() skip").configuration.record == ("received", "sent")


def test_tags_interned_in_order_of_first_appearance():
    p = parse("configuration fifo reliable;\ndef main():\n  output ('b', 'a', 'b')\nend")
    assert p.tags == ("b", "a")
    msg = p.main.body.expr
    assert msg == TupleExpr((Lit(tag_value(0), "b"), Lit(tag_value(1), "a"), Lit(tag_value(0), "b")))


def test_augmented_assignment():
    s = body_of("  x += 1")
    assert s == Assign(Var("x"), Binary("plus", Var("x"), Lit(1)))


def test_undefined_comparisons():
    assert parse_expr("x != undefined") == Defined(Var("x"))
    assert parse_expr("x == undefined") == Unary("not", Defined(Var("x")))


def test_undefined_elsewhere_is_rejected():
    with pytest.raises(ParseError):
        parse_expr("x < undefined")


def test_precedence():
    e = parse_expr("a or b and not c implies d")
    assert e == Binary("implies",
                       Binary("or", Var("a"), Binary("and", Var("b"), Unary("not", Var("c")))),
                       Var("d"))


def test_quantifier_with_history_iterator():
    e = parse_expr("some received('ack', c2, =p2) | c2 > c")
    assert isinstance(e, Quant) and e.kind == "some"
    (it,) = e.iterators
    assert it.domain == Var("received")
    assert isinstance(it.pattern, PTuple)
    msg, peer = it.pattern.items
    assert isinstance(peer, PWild)
    assert msg.items[1] == PVar("c2")


def test_history_iterator_with_peer():
    e = parse_expr("each sent(m to p) | true")
    (it,) = e.iterators
    assert it.domain == Var("sent")
    assert it.pattern == PTuple((PVar("m"), PVar("p")))


def test_comprehensions_and_aggregates():
    assert parse_expr("{x : x in s | x != self}") == Comprehension(
        Var("x"), (Iterator(PVar("x"), Var("s")),), Binary("ne", Var("x"), Var("self")))
    assert parse_expr("{x in s | x > 0}") == Comprehension(
        None, (Iterator(PVar("x"), Var("s")),), Binary("gt", Var("x"), Lit(0)))
    assert parse_expr("size(s)") == Aggregate("size", Var("s"))
    assert parse_expr("{}") == EmptySet()


def test_address_literals():
    assert parse_expr("@p3") == Lit(Address(3, True))
    assert parse_expr("@4") == Lit(Address(4, False))


def test_if_without_else_gets_skip():
    s = body_of("  if x:\n    y = 1\n  end")
    assert isinstance(s, If) and s.orelse == Skip()


def test_labeled_await_takes_the_label():
    s = body_of("  -- wait\n  await x > 0")
    assert isinstance(s, Await) and s.label == "wait"


def test_field_chain_target():
    s = body_of("  a.b = 1")
    assert s == Assign(Field(Var("a"), "b"), Lit(1))


def test_lex_error_position():
    with pytest.raises(LexError) as info:
        parse("configuration fifo reliable;\ndef main():\n  x = 1 $ 2\nend")
    assert info.value.line == 3


def test_parse_error_at_end_of_input():
    text = "configuration fifo reliable; def main() send (1,) to"
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == 1
    assert info.value.column == len(text) + 1


def test_parse_or_diagnostics():
    diags = parse_or_diagnostics("configuration fifo;")
    assert isinstance(diags, list) and diags[0].severity == "error"


def test_wrong_builtin_arity():
    with pytest.raises(ParseError):
        parse_expr("size(a, b)")


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_round_trips_through_printer(name):
    p = parse(corpus_text(name))
    assert parse(pretty(p)) == p


@pytest.mark.parametrize("text", [
    "each ('request', c2, p2) in q | (c2, p2) != (c, self) implies (c, self) < (c2, p2)",
    "(ds.is_empty() or (c, self) < ds.min()) and count == total",
    "not (a and b) or c",
    "x in s and y not in t",
    "plus(a, minus(b, 1)) >= 3",
])
def test_expressions_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(expr_to_str(e)) == e
