import pytest

from yieldpoint.astutil import walk
from yieldpoint.desugar import FreshNames, desugar_all, desugar_structure, is_generated
from yieldpoint.errors import DesugarError
from yieldpoint.harness import run
from yieldpoint.parser import parse
from yieldpoint.syntax import (
    SELF,
    Aggregate,
    Assign,
    Await,
    Comprehension,
    Field,
    Labeled,
    Lit,
    NewAssign,
    NewMany,
    PEq,
    PWild,
    Seq,
    While,
)

from conftest import MINIMAL_HEADER, core, core_of, surface


def main_stmts(p):
    body = p.main.body
    return body.stmts if isinstance(body, Seq) else (body,)


def test_implicit_self_in_main():
    p = desugar_structure(parse(MINIMAL_HEADER + "def main():\n  n = 3\nend"))
    assert main_stmts(p) == (Assign(Field(SELF, "n"), Lit(3)),)


def test_empty_set_assignment_becomes_new_set():
    p = desugar_structure(parse(MINIMAL_HEADER + "def main():\n  s = {}\nend"))
    assert main_stmts(p) == (NewAssign(Field(SELF, "s"), "Set"),)


def test_new_many_expands_into_a_counting_loop():
    p = desugar_structure(surface("lamport_orig"))
    assert not any(isinstance(n, NewMany) for n in walk(p))
    loops = [n for n in walk(p.main) if isinstance(n, While)]
    assert len(loops) == 1
    counter = loops[0].cond.left
    assert isinstance(counter, Field) and is_generated(counter.name)


def test_every_await_is_labeled_and_at_lists_grow():
    text = MINIMAL_HEADER + """
class P extends Process:
  def run():
    -- named
    await x > 0
    await y > 0
  end
  receive m at named:
    skip
  end
end
def main():
  skip
end
"""
    p = desugar_structure(parse(text))
    awaits = [n for n in walk(p) if isinstance(n, Await)]
    assert [a.label for a in awaits][0] == "named"
    generated = awaits[1].label
    assert is_generated(generated)
    assert p.classes[0].receives[0].labels == ("named", generated)


def test_labeled_statement_gets_a_marker_await():
    text = MINIMAL_HEADER + "class P extends Process:\n  def run():\n    -- here\n    x = 1\n  end\nend\n" \
                            "def main() skip"
    p = desugar_structure(parse(text))
    assert not any(isinstance(n, Labeled) for n in walk(p))
    assert any(isinstance(n, Await) and n.label == "here" for n in walk(p))


def test_wildcards_become_fresh_variables():
    p = desugar_structure(surface("lamport_orig"))
    assert not any(isinstance(n, PWild) for n in walk(p))


def test_assignment_to_parameter_is_rejected():
    text = MINIMAL_HEADER + "class P extends Process:\n  def f(a):\n    a = 1\n  end\nend\ndef main() skip"
    with pytest.raises(DesugarError):
        desugar_structure(parse(text))


def test_call_on_started_process_is_rejected():
    text = MINIMAL_HEADER + """
class P extends Process:
  def f():
    skip
  end
end
def main():
  p = new P
  p.f()
  p.start()
  p.f()
end
"""
    with pytest.raises(DesugarError) as info:
        desugar_structure(parse(text))
    assert info.value.diagnostic.rule == "desugar-rmi"


def test_call_on_other_object_inside_class_is_rejected():
    text = MINIMAL_HEADER + """
class P extends Process:
  def f(q):
    q.f(q)
  end
end
def main() skip
"""
    with pytest.raises(DesugarError):
        desugar_structure(parse(text))


def test_aggregate_in_defun_is_rejected():
    text = MINIMAL_HEADER + "class P extends Process:\n  defun total() = sum(s)\nend\ndef main() skip"
    with pytest.raises(DesugarError):
        desugar_all(parse(text))


def test_statements_are_query_free_after_desugaring():
    p = core("lamport_orig")
    nodes = list(walk(p))
    assert not any(isinstance(n, (NewMany, PEq, PWild, Labeled)) for n in nodes)
    assigned = [n for n in nodes if isinstance(n, Assign)]
    assert not any(isinstance(a.value, (Comprehension, Aggregate)) for a in assigned)


def test_desugar_all_is_idempotent():
    p = core("lamport_orig")
    assert desugar_all(p) == p


def test_fresh_names_avoid_program_names():
    p = parse(MINIMAL_HEADER + "def main():\n  __x0 = 1\nend")
    fresh = FreshNames.for_program(p)
    assert fresh("x") == "__x1"


def test_desugared_queries_compute_the_query_values():
    text = MINIMAL_HEADER + """
def main():
  s = {}
  s.add(1); s.add(2); s.add(5)
  t = {}
  t.add(('a', 1)); t.add(('b', 7)); t.add(('a', 3))
  z = 3
  output (each x in s | x > 0, some x in s | x > 4, size(s), sum(s), max(s), min(s),
          size({x : x in s | x > 1}), some ('a', y) in t | y > 2, each ('a', y) in t | y > 2,
          size({('a', y) in t | true}), size({('a', =z) in t | true}))
end
"""
    result = run(core_of(text))
    assert result.outcome.kind == "terminated"
    (event,) = result.trace.outputs()
    assert event.payload["value"] == [True, True, 3, 8, 5, 1, 2, True, False, 2, 1]


def test_max_of_empty_set_gets_stuck():
    text = MINIMAL_HEADER + "def main():\n  s = {}\n  m = max(s)\nend"
    result = run(core_of(text))
    assert result.outcome.kind == "stuck"
    assert "@p0" in result.outcome.stuck
