import pytest

from yieldpoint.errors import WellFormednessError
from yieldpoint.examples import corpus_names, corpus_text
from yieldpoint.parser import parse
from yieldpoint.wellformed import check_well_formed, require_well_formed

from conftest import MINIMAL_HEADER


def rules_of(text: str):
    return [d.rule for d in check_well_formed(parse(MINIMAL_HEADER + text))]


@pytest.mark.parametrize("name", corpus_names())
def test_corpus_is_well_formed(name):
    assert check_well_formed(parse(corpus_text(name))) == []


def test_top_level_method_must_be_main():
    assert rules_of("def start() skip") == ["wf1"]


def test_predefined_and_duplicate_classes():
    text = """
class Set extends Process:
  def run() skip
end
class P extends Process:
  def run() skip
end
class P extends Process:
  def run() skip
end
def main() skip
"""
    assert sorted(rules_of(text)) == ["wf-duplicate", "wf-predefined"]


def test_unknown_superclass():
    assert rules_of("class P extends Q:\n  def run() skip\nend\ndef main() skip") == ["wf-superclass"]


def test_at_clause_must_name_a_label_of_the_class():
    text = """
class P extends Process:
  def run():
    -- ready
    await x
  end
  receive m at ready, gone:
    skip
  end
end
def main() skip
"""
    diags = check_well_formed(parse(MINIMAL_HEADER + text))
    assert [d.rule for d in diags] == ["wf2"]
    assert "gone" in diags[0].message


def test_def_in_expression_and_defun_as_statement():
    text = """
class P extends Process:
  def act() skip
  defun value() = 1
  def run():
    x = act()
    value()
  end
end
def main() skip
"""
    assert sorted(rules_of(text)) == ["wf3", "wf3"]


def test_predefined_methods_are_allowed_in_both_positions():
    text = """
class P extends Process:
  def run():
    s = {}
    s.add(1)
    x = s.contains(1)
  end
end
def main() skip
"""
    assert rules_of(text) == []


def test_require_well_formed_raises_with_all_diagnostics():
    with pytest.raises(WellFormednessError) as info:
        require_well_formed(parse(MINIMAL_HEADER + "class P extends Q:\n  def run() skip\nend\ndef start() skip"))
    assert {d.rule for d in info.value.diagnostics} == {"wf1", "wf-superclass"}
