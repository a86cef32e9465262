"""Transition rules of the interleaving machine: rule families on whole programs, then one rule at a time."""
import itertools

import pytest

from yieldpoint.astutil import substitute
from yieldpoint.errors import StuckError
from yieldpoint.parser import parse, parse_expr
from yieldpoint.runtime import (
    ClassTable,
    ClockEvent,
    DSObj,
    Evaluator,
    FieldObj,
    Machine,
    SeqObj,
    SetObj,
    check_clock_recurrence,
    copy_into,
    deep_copy,
    evaluate_small,
    is_copy,
    split,
    step_expr,
)
from yieldpoint.syntax import (
    FALSE,
    TRUE,
    Assign,
    Await,
    AwaitClause,
    Binary,
    Call,
    CallStmt,
    Defined,
    Field,
    For,
    ForTuple,
    If,
    IsInstance,
    Iterator,
    Lit,
    NewAssign,
    Output,
    PVar,
    Quant,
    Send,
    Seq,
    Skip,
    TupleExpr,
    Unary,
    Var,
    While,
    seq,
)
from yieldpoint.values import Address, tag_value

from conftest import MINIMAL_HEADER, core_of

P0 = Address(0, True)
P1 = Address(1, True)
P2 = Address(2, True)


def drive(m: Machine, state, a: Address, limit: int = 10_000):
    """Step `a` until it terminates or blocks; returns the transitions taken."""
    taken = []
    for _ in range(limit):
        t = m.step(state, a)
        if t is None:
            return taken
        taken.append(t)
    raise AssertionError(f"{a} did not settle in {limit} steps")


def advance_to_await(m: Machine, state, a: Address) -> None:
    while not isinstance(split(state.residual[a])[0], Await):
        assert m.step(state, a) is not None


def machine_for(text: str, **kw):
    m = Machine(core_of(text), **kw)
    return m, m.initial_state()


def fields(state, a: Address) -> dict:
    return state.heaps[a][a].fields


SEQUENTIAL = MINIMAL_HEADER + """
def main():
  x = 1
  if x == 1:
    y = 2
  else:
    y = 3
  end
  if x == 2:
    z = 1
  end
  s = {}
  s.add(4); s.add(5); s.add(6)
  s.del(5)
  total = 0
  for v in s:
    total += v
  end
  i = 0
  while i < 2:
    i += 1
  end
  output (y, total, i)
end
"""


def test_sequential_rules():
    m, st = machine_for(SEQUENTIAL)
    taken = drive(m, st, P0)
    rules = {t.rule for t in taken}
    assert {"call", "seq", "assign", "if-true", "if-false", "new", "add", "del",
            "for", "intuple", "intuple-end", "while", "output"} <= rules
    (out,) = [t for t in taken if t.rule == "output"]
    assert out.payload["value"] == (2, 10, 2)
    assert m.status(st, P0) == "terminated"
    assert m.classify(st) == "terminated"
    assert "z" not in fields(st, P0)


def test_new_allocates_a_typed_object():
    m, st = machine_for(MINIMAL_HEADER + "def main():\n  s = {}\nend")
    taken = drive(m, st, P0)
    (new,) = [t for t in taken if t.rule == "new"]
    a = new.payload["address"]
    assert not a.process
    assert st.heap_type[a] == "Set"
    assert isinstance(st.heaps[P0][a], SetObj)
    assert fields(st, P0)["s"] == a


PING = """
tags 'ping';
configuration fifo reliable;
class P extends Process:
  def run():
    got = 0
    await got == 1
    output ('done', got)
  end
  receive ('ping', v) from q:
    got = v
    who = q
  end
end
def main():
  p = new P
  p.start()
  send ('ping', 1) to p
end
"""


def test_start_send_arrive_handle():
    m, st = machine_for(PING)
    taken = drive(m, st, P0)
    assert [t.rule for t in taken if t.rule in ("new", "start", "send")] == ["new", "start", "send"]
    assert st.channels[(P0, P1)] == [(tag_value(0), 1)]
    assert st.history(P0, "sent").linearize() == [((tag_value(0), 1), P1)]

    assert drive(m, st, P1)
    assert m.status(st, P1) == "blocked"
    assert m.classify(st) == "running"

    t = m.arrive(st, (P0, P1))
    assert t.rule == "arrive" and t.process == P1
    assert st.channels[(P0, P1)] == []
    assert m.status(st, P1) == "ready"

    taken = drive(m, st, P1)
    assert taken[0].rule == "handle" and taken[0].payload["from"] == P0
    assert "await" in [t.rule for t in taken]
    assert fields(st, P1)["got"] == 1
    assert fields(st, P1)["who"] == P0
    assert st.history(P1, "received").linearize() == [((tag_value(0), 1), P0)]
    assert m.classify(st) == "terminated"


def test_started_process_gets_its_own_heap():
    m, st = machine_for(PING)
    drive(m, st, P0)
    assert P1 in st.heaps
    assert P1 not in st.heaps[P0]
    me = fields(st, P1)
    assert st.heap_type[me["received"]] == "Sequence"
    assert me["received"] in st.heaps[P1]


SEND_TO_SET = """
tags 'hi';
configuration fifo reliable;
class P extends Process:
  def run() skip
end
def main():
  a = new P
  b = new P
  ps = {}
  ps.add(a); ps.add(b)
  a.start()
  b.start()
  send ('hi',) to ps
end
"""


def test_send_to_a_set_unfolds_into_sends():
    m, st = machine_for(SEND_TO_SET)
    rules = [t.rule for t in drive(m, st, P0)]
    assert rules.count("send-set") == 1
    assert rules.count("send") == 2
    assert st.channels[(P0, P1)] == [(tag_value(0),)]
    assert st.channels[(P0, P2)] == [(tag_value(0),)]


def test_send_to_a_set_records_a_copy():
    text = SEND_TO_SET.replace("send ('hi',) to ps", "s = {}\n  s.add(1)\n  send ('hi', s) to ps\n  s.add(2)")
    m, st = machine_for(text)
    drive(m, st, P0)
    live = fields(st, P0)["s"]
    (msg, dest), *rest = st.history(P0, "sent").linearize()
    assert dest == fields(st, P0)["ps"]
    assert len(rest) == 2
    assert msg[1] != live
    assert st.heaps[P0][msg[1]].linearize() == [1]
    assert st.heaps[P0][live].linearize() == [1, 2]


def test_timeout_fires_when_no_clause_holds():
    text = MINIMAL_HEADER + """
def main():
  x = 0
  await x == 1:
    output 1
  timeout 5:
    output 2
  end
end
"""
    m, st = machine_for(text)
    taken = drive(m, st, P0)
    assert "timeout" in [t.rule for t in taken]
    assert [t.payload["value"] for t in taken if t.rule == "output"] == [2]


def test_await_offers_every_true_clause():
    text = MINIMAL_HEADER + """
def main():
  x = 0
  await x == 0:
    output 1
    skip
  or x == 0:
    output 2
  end
end
"""
    m, st = machine_for(text)
    advance_to_await(m, st, P0)
    successors = [s for rule, s in m.enabled_steps(st) if rule == "await"]
    assert len(successors) == 2
    outputs = {m.step(s, P0).payload["value"] for s in successors}
    assert outputs == {1, 2}
    with pytest.raises(StuckError):
        m.step(st.copy(), P0, clause=3)


def test_blocked_forever_is_a_deadlock():
    m, st = machine_for(MINIMAL_HEADER + "def main():\n  await false\nend")
    drive(m, st, P0)
    assert m.status(st, P0) == "blocked"
    assert m.classify(st) == "deadlocked"
    assert m.enabled_steps(st) == []


CHANNEL_FAULTS = """
tags 'm';
configuration unordered unreliable;
class P extends Process:
  def run():
    await false
  end
end
def main():
  p = new P
  p.start()
  send ('m', 1) to p
  send ('m', 2) to p
end
"""


def test_reorder_and_lose():
    m, st = machine_for(CHANNEL_FAULTS)
    drive(m, st, P0)
    drive(m, st, P1)
    ch = (P0, P1)
    rules = sorted(rule for rule, _ in m.enabled_steps(st))
    assert rules.count("arrive") == 1 and rules.count("reorder") == 1 and rules.count("lose") == 1
    assert m.reorder(st, ch, 0).rule == "reorder"
    assert st.channels[ch] == [(tag_value(0), 2), (tag_value(0), 1)]
    assert m.lose(st, ch).rule == "lose"
    assert st.channels[ch] == [(tag_value(0), 1)]


def test_fifo_reliable_channels_refuse_faults():
    m, st = machine_for(CHANNEL_FAULTS, order="fifo", reliability="reliable")
    drive(m, st, P0)
    drive(m, st, P1)
    with pytest.raises(StuckError):
        m.reorder(st, (P0, P1), 0)
    with pytest.raises(StuckError):
        m.lose(st, (P0, P1))
    assert [rule for rule, _ in m.enabled_steps(st)] == ["arrive"]


CLOCKS = """
tags 'm';
configuration fifo reliable lamport stamps 'm' 2;
class P extends Process:
  def run():
    await false
  end
  receive ('m', t):
    c = logical_clock()
  end
end
def main():
  p = new P
  p.start()
  a = logical_clock()
  b = logical_clock()
  send ('m', 10) to p
end
"""


def test_logical_clocks_follow_the_recurrence():
    m, st = machine_for(CLOCKS)
    drive(m, st, P0)
    assert (fields(st, P0)["a"], fields(st, P0)["b"]) == (1, 2)
    drive(m, st, P1)
    m.arrive(st, (P0, P1))
    drive(m, st, P1)
    assert fields(st, P1)["c"] == 12
    assert [e.kind for e in m.clock_events] == ["read", "read", "receive", "read"]
    assert check_clock_recurrence(m.clock_events) == []


def test_clock_recurrence_reports_a_bad_read():
    events = [ClockEvent("read", P0, value=1), ClockEvent("receive", P0, stamp=7),
              ClockEvent("read", P0, value=8)]
    problems = check_clock_recurrence(events)
    assert len(problems) == 1 and "expected 9" in problems[0]


def test_clock_needs_lamport_configuration():
    m, st = machine_for(MINIMAL_HEADER + "def main():\n  a = logical_clock()\nend")
    with pytest.raises(StuckError):
        drive(m, st, P0)


def test_small_step_reduces_operands_one_rule_at_a_time():
    m, st = machine_for(MINIMAL_HEADER + "def main():\n  x = (1 + 2) + 3\nend", small_step=True)
    rules = [t.rule for t in drive(m, st, P0)]
    assert rules.count("ctx:plus") == 2
    assert rules[-1] == "assign"
    assert fields(st, P0)["x"] == 6


# ---------------------------------------------------------------------------#
# Expressions

S = Address(0)
CLASSES = ClassTable(parse(MINIMAL_HEADER + "def main() skip"))


@pytest.mark.parametrize("text", [
    "(1 + 2 == 3) or false",
    "not (4 - 1 < 2) and true",
    "some x in s | x > 2",
    "some x in s | x > 5",
    "(1, 2) < (1, 3)",
    "s.contains(3) and not s.contains(2)",
])
def test_small_step_agrees_with_the_evaluator(text):
    h = {S: SetObj([1, 3])}
    ht = {S: "Set"}
    e = substitute(parse_expr(text), {"s": Lit(S)})
    assert evaluate_small(CLASSES, ht, h, e) == Evaluator(CLASSES, ht, h).eval(e)


# ---------------------------------------------------------------------------#
# Objects and copying

def test_ds_keeps_multiplicities():
    ds = DSObj([3, 1, 2, 1])
    assert (ds.min(), ds.max(), ds.size()) == (1, 3, 4)
    ds.delete(1)
    assert ds.min() == 1
    ds.delete(1)
    assert ds.min() == 2
    ds.delete(3)
    assert ds.max() == 2
    assert ds.copy() == ds
    ds.delete(2)
    assert ds.is_empty()
    with pytest.raises(StuckError):
        ds.min()


def test_ds_survives_many_deletions():
    ds = DSObj(range(100))
    for i in range(99):
        ds.delete(i)
    assert ds.min() == ds.max() == 99
    assert ds.linearize() == [99]
    assert ds.size() == 1


def test_ds_size_follows_adds_and_deletes():
    ds = DSObj()
    ds.add(4)
    ds.add(4)
    ds.delete(9)
    assert ds.size() == 2
    ds.delete(4)
    assert ds.size() == 1
    assert ds.copy().size() == 1


def object_graph():
    a_set, a_obj, peer = Address(0), Address(1), Address(7, True)
    h = {a_set: SetObj([1, a_obj]), a_obj: FieldObj({"f": 2})}
    ht = {a_set: "Set", a_obj: "Obj"}
    return (5, a_set, peer), h, ht


def fresh_from(start: int):
    counter = itertools.count(start)
    return lambda: Address(next(counter))


def test_copy_duplicates_objects_but_not_processes():
    v, h, ht = object_graph()
    dst, ht2 = {}, dict(ht)
    vbar = copy_into(v, h, dst, ht2, fresh_from(10))
    assert vbar[0] == 5 and vbar[2] == v[2]
    assert vbar[1] not in h and vbar[1] in dst
    assert is_copy(v, h, {}, ht, vbar, dst, ht2)


def test_is_copy_rejects_shared_or_altered_objects():
    v, h, ht = object_graph()
    dst, ht2 = {}, dict(ht)
    vbar = copy_into(v, h, dst, ht2, fresh_from(10))
    assert not is_copy(v, h, {}, ht, v, dst, ht2)
    dst[vbar[1]] = SetObj([1])
    assert not is_copy(v, h, {}, ht, vbar, dst, ht2)


def test_deep_copy_leaves_its_inputs_alone():
    v, h, ht = object_graph()
    dst = {}
    vbar, dst2, ht2 = deep_copy(v, h, dst, ht, fresh_from(10))
    assert dst == {} and set(ht) == {Address(0), Address(1)}
    assert is_copy(v, h, dst, ht, vbar, dst2, ht2)


def test_dangling_address_cannot_be_copied():
    with pytest.raises(StuckError):
        copy_into((Address(3),), {}, {}, {}, fresh_from(10))


# ---------------------------------------------------------------------------#
# One rule at a time: the exact successor of a single transition

RULES = """
tags 'm';
configuration fifo reliable;
class C extends Process:
  defun twice(x) = x + x
  def bump(k):
    n = k
  end
  def run() skip
end
def main() skip
"""

RECEIVED, SENT = Address(0), Address(1)
C1 = Address(1, True)
MSG = (tag_value(0), 1)
NEXT = Output(Lit(0))


def poised(head, **kw):
    """A machine whose initial process is about to run `head`, followed by NEXT."""
    m, st = machine_for(RULES, **kw)
    st.residual[P0] = seq(head, NEXT)
    return m, st


def allocate(st, cls: str, obj) -> Address:
    a = st.fresh_address(cls == "C")
    st.heap_type[a] = cls
    st.heaps[P0][a] = obj
    return a


def started_peer(m, st) -> Address:
    """Start a C instance and return its address."""
    c = allocate(st, "C", FieldObj())
    st.residual[P0] = seq(CallStmt(Lit(c), "start", ()), st.residual[P0])
    assert m.step(st, P0).rule == "start"
    assert m.step(st, P0).rule == "seq"
    return c


def step_once(m, st, rule: str, a: Address = P0):
    t = m.step(st, a)
    assert t is not None and t.rule == rule
    return t


def test_initial_state_shape():
    m, st = machine_for(RULES)
    assert st.processes() == [P0]
    assert st.residual == {P0: CallStmt(Lit(P0), "main", ())}
    assert st.heap_type == {P0: "Process", RECEIVED: "Sequence", SENT: "Sequence"}
    assert st.heaps == {P0: {P0: FieldObj({"received": RECEIVED, "sent": SENT}),
                             RECEIVED: SeqObj(), SENT: SeqObj()}}
    assert st.channels == {} and st.mq == {}
    assert m.status(st, P0) == "ready"


def test_rule_seq():
    m, st = poised(Skip())
    before = st.copy()
    step_once(m, st, "seq")
    assert st.residual[P0] == NEXT
    assert st.heaps == before.heaps and st.channels == before.channels


def test_rule_assign():
    m, st = poised(Assign(Field(Lit(P0), "x"), Binary("plus", Lit(1), Lit(2))))
    step_once(m, st, "assign")
    assert st.residual[P0] == Seq((Skip(), NEXT))
    assert st.heaps[P0][P0] == FieldObj({"received": RECEIVED, "sent": SENT, "x": 3})


def test_rule_new_collection():
    m, st = poised(NewAssign(Field(Lit(P0), "s"), "Set"))
    t = step_once(m, st, "new")
    s = Address(2)
    assert t.payload == {"class": "Set", "address": s}
    assert st.residual[P0] == Seq((Skip(), NEXT))
    assert st.heap_type[s] == "Set"
    assert st.heaps[P0][s] == SetObj()
    assert st.heaps[P0][P0].fields["s"] == s


def test_rule_new_process_object():
    m, st = poised(NewAssign(Field(Lit(P0), "p"), "C"))
    step_once(m, st, "new")
    assert st.heap_type[C1] == "C"
    assert st.heaps[P0][C1] == FieldObj()
    assert st.heaps[P0][P0].fields["p"] == C1
    assert C1 not in st.heaps and st.processes() == [P0]


def test_rule_if_true():
    m, st = poised(If(TRUE, Output(Lit(1)), Output(Lit(2))))
    step_once(m, st, "if-true")
    assert st.residual[P0] == Seq((Output(Lit(1)), NEXT))


def test_rule_if_false():
    m, st = poised(If(FALSE, Output(Lit(1)), Output(Lit(2))))
    step_once(m, st, "if-false")
    assert st.residual[P0] == Seq((Output(Lit(2)), NEXT))


def test_rule_while():
    loop = While(Var("c"), Output(Lit(1)))
    m, st = poised(loop)
    step_once(m, st, "while")
    assert st.residual[P0] == Seq((If(Var("c"), Seq((Output(Lit(1)), loop)), Skip()), NEXT))


def test_rule_for():
    m, st = machine_for(RULES)
    s = allocate(st, "Set", SetObj([3, 1]))
    body = Output(Var("v"))
    st.residual[P0] = seq(For(Iterator(PVar("v"), Lit(s)), body), NEXT)
    step_once(m, st, "for")
    assert st.residual[P0] == Seq((ForTuple("v", (1, 3), body), NEXT))


def test_rule_intuple():
    body = Output(Var("v"))
    m, st = poised(ForTuple("v", (1, 3), body))
    step_once(m, st, "intuple")
    assert st.residual[P0] == Seq((Output(Lit(1)), ForTuple("v", (3,), body), NEXT))


def test_rule_intuple_end():
    m, st = poised(ForTuple("v", (), Output(Var("v"))))
    step_once(m, st, "intuple-end")
    assert st.residual[P0] == Seq((Skip(), NEXT))


def test_rule_add():
    m, st = machine_for(RULES)
    s = allocate(st, "Set", SetObj([1]))
    st.residual[P0] = seq(CallStmt(Lit(s), "add", (Lit(5),)), NEXT)
    step_once(m, st, "add")
    assert st.residual[P0] == Seq((Skip(), NEXT))
    assert st.heaps[P0][s] == SetObj([1, 5])


def test_rule_del():
    m, st = machine_for(RULES)
    s = allocate(st, "Set", SetObj([1, 5]))
    st.residual[P0] = seq(CallStmt(Lit(s), "del", (Lit(1),)), NEXT)
    step_once(m, st, "del")
    assert st.heaps[P0][s] == SetObj([5])


def test_rule_call():
    m, st = machine_for(RULES)
    c = allocate(st, "C", FieldObj())
    st.residual[P0] = seq(CallStmt(Lit(c), "bump", (Lit(7),)), NEXT)
    step_once(m, st, "call")
    assert st.residual[P0] == Seq((Assign(Field(Lit(c), "n"), Lit(7)), NEXT))
    step_once(m, st, "assign")
    assert st.heaps[P0][c] == FieldObj({"n": 7})


def test_rule_start():
    m, st = machine_for(RULES)
    c = allocate(st, "C", None)
    s = allocate(st, "Set", SetObj([1]))
    st.heaps[P0][c] = FieldObj({"f": s})
    st.residual[P0] = seq(CallStmt(Lit(c), "start", ()), NEXT)
    step_once(m, st, "start")
    copied, received, sent = Address(3), Address(4), Address(5)
    assert st.residual[P0] == Seq((Skip(), NEXT))
    assert st.residual[c] == CallStmt(Lit(c), "run", ())
    assert c not in st.heaps[P0] and s in st.heaps[P0]
    assert st.heaps[c] == {c: FieldObj({"f": copied, "received": received, "sent": sent}),
                           copied: SetObj([1]), received: SeqObj(), sent: SeqObj()}
    assert st.heap_type[copied] == "Set"


def test_rule_send():
    m, st = machine_for(RULES)
    c = started_peer(m, st)
    st.residual[P0] = seq(Send(Lit(MSG), Lit(c)), NEXT)
    t = step_once(m, st, "send")
    assert t.payload == {"message": MSG, "to": c}
    assert st.residual[P0] == Seq((Skip(), NEXT))
    assert st.channels == {(P0, c): [MSG]}
    assert st.history(P0, "sent").linearize() == [(MSG, c)]


def test_rule_send_to_a_set():
    m, st = machine_for(RULES)
    ps = allocate(st, "Set", SetObj([P1]))
    st.residual[P0] = seq(Send(Lit(MSG), Lit(ps)), NEXT)
    step_once(m, st, "send-set")
    loop = For(Iterator(PVar("__x"), Lit(ps)), Send(Lit(MSG), Var("__x")))
    assert st.residual[P0] == Seq((loop, NEXT))
    assert st.channels == {}
    assert st.history(P0, "sent").linearize() == [(MSG, ps)]


def test_rule_output():
    m, st = poised(Output(Lit(4)))
    t = step_once(m, st, "output")
    assert t.payload == {"value": 4}
    assert st.residual[P0] == Seq((Skip(), NEXT))


def test_rule_await():
    m, st = poised(Await("l1", (AwaitClause(TRUE, Output(Lit(1))),)))
    t = step_once(m, st, "await")
    assert t.payload == {"label": "l1", "clause": 0}
    assert st.residual[P0] == Seq((Output(Lit(1)), NEXT))


def test_rule_await_blocks():
    aw = Await("l1", (AwaitClause(FALSE, Output(Lit(1))),))
    m, st = poised(aw)
    assert m.step(st, P0) is None
    assert st.residual[P0] == Seq((aw, NEXT))


def test_rule_timeout():
    m, st = poised(Await("l1", (AwaitClause(FALSE, Output(Lit(1))),), AwaitClause(Lit(5), Output(Lit(2)))))
    step_once(m, st, "timeout")
    assert st.residual[P0] == Seq((Output(Lit(2)), NEXT))


def test_rule_handle():
    aw = Await("l1", (AwaitClause(FALSE, Output(Lit(1))),))
    m, st = poised(aw)
    st.mq[P0] = [(MSG, P1)]
    t = step_once(m, st, "handle")
    assert t.payload == {"message": MSG, "from": P1, "label": "l1"}
    assert st.mq[P0] == []
    assert st.residual[P0] == Seq((Skip(), aw, NEXT))
    assert st.history(P0, "received").linearize() == [(MSG, P1)]


def test_rule_arrive():
    m, st = machine_for(RULES)
    st.channels[(P0, P1)] = [MSG, (tag_value(0), 2)]
    t = m.arrive(st, (P0, P1))
    assert (t.rule, t.process) == ("arrive", P1)
    assert st.channels[(P0, P1)] == [(tag_value(0), 2)]
    assert st.mq[P1] == [(MSG, P0)]


def test_rule_reorder():
    m, st = machine_for(RULES, order="unordered")
    st.channels[(P0, P1)] = [MSG, (tag_value(0), 2)]
    m.reorder(st, (P0, P1), 0)
    assert st.channels[(P0, P1)] == [(tag_value(0), 2), MSG]
    assert st.mq == {}


def test_rule_lose():
    m, st = machine_for(RULES, reliability="unreliable")
    st.channels[(P0, P1)] = [MSG, (tag_value(0), 2)]
    m.lose(st, (P0, P1))
    assert st.channels[(P0, P1)] == [(tag_value(0), 2)]
    assert st.mq == {}


@pytest.mark.parametrize("head", [
    Assign(Field(Lit(RECEIVED), "x"), Lit(1)),
    CallStmt(Lit(RECEIVED), "del", (Lit(1),)),
    CallStmt(Lit(P0), "nope", ()),
    NewAssign(Field(Lit(P0), "x"), "Nowhere"),
    Send(Lit(MSG), Lit(3)),
], ids=["assign-to-collection", "del-on-sequence", "unknown-def", "unknown-class", "bad-destination"])
def test_statement_rules_get_stuck(head):
    m, st = poised(head)
    with pytest.raises(StuckError):
        m.step(st, P0)


E = Address(5)
EXPR_HEAP = {C1: FieldObj({"f": 2}), S: SetObj([1, 3]), E: SetObj()}
EXPR_TYPES = {C1: "C", S: "Set", E: "Set"}


def reduce_once(redex):
    return step_expr(ClassTable(core_of(RULES)), EXPR_TYPES, EXPR_HEAP, redex)


@pytest.mark.parametrize("redex, expected", [
    (TupleExpr((Lit(1), Lit(2))), Lit((1, 2))),
    (Binary("or", TRUE, Var("y")), TRUE),
    (Binary("or", FALSE, Var("y")), Var("y")),
    (Field(Lit(C1), "f"), Lit(2)),
    (Call(Lit(C1), "twice", (Lit(3),)), Binary("plus", Lit(3), Lit(3))),
    (Call(Lit(S), "contains", (Lit(3),)), TRUE),
    (Call(Lit(S), "size", ()), Lit(2)),
    (Quant("some", (Iterator(PVar("x"), Lit(S)),), Binary("gt", Var("x"), Lit(2))),
     Binary("or", Binary("gt", Lit(1), Lit(2)), Binary("gt", Lit(3), Lit(2)))),
    (Quant("some", (Iterator(PVar("x"), Lit(E)),), Binary("gt", Var("x"), Lit(2))), FALSE),
    (Unary("isTuple", Lit((1, 2))), TRUE),
    (Unary("isTuple", Lit(4)), FALSE),
    (Unary("len", Lit((1, 2, 3))), Lit(3)),
    (Unary("not", TRUE), FALSE),
    (Binary("select", Lit((4, 5)), Lit(2)), Lit(5)),
    (Binary("plus", Lit(2), Lit(3)), Lit(5)),
    (Binary("minus", Lit(2), Lit(3)), Lit(-1)),
    (Binary("is", Lit((1, 2)), Lit((1, 2))), TRUE),
    (Binary("lt", Lit((1, 2)), Lit((1, 3))), TRUE),
    (IsInstance(Lit(C1), "C"), TRUE),
    (IsInstance(Lit(S), "C"), FALSE),
    (Defined(Field(Lit(C1), "f")), TRUE),
    (Defined(Field(Lit(C1), "g")), FALSE),
], ids=["tuple", "or-true", "or-false", "field", "defun", "contains", "size", "some", "some-empty",
        "is-tuple", "is-tuple-not", "len", "not", "select", "plus", "minus", "is", "lt",
        "isinstance", "isinstance-not", "defined", "defined-not"])
def test_expression_rule(redex, expected):
    assert reduce_once(redex) == expected


@pytest.mark.parametrize("redex", [
    Field(Lit(C1), "g"),
    Field(Lit(S), "f"),
    Binary("select", Lit((4, 5)), Lit(3)),
    Unary("len", Lit(4)),
    Call(Lit(C1), "twice", ()),
    Binary("or", Lit(1), TRUE),
], ids=["missing-field", "field-of-collection", "select-out-of-range", "len-of-non-tuple",
        "defun-arity", "or-of-non-boolean"])
def test_expression_rule_gets_stuck(redex):
    with pytest.raises(StuckError):
        reduce_once(redex)
