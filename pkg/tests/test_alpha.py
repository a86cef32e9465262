from yieldpoint.alpha import alpha_diff, alpha_equivalent
from yieldpoint.desugar import desugar_all
from yieldpoint.desugar.fresh import FreshNames
from yieldpoint.syntax import SELF, Assign, Binary, Field, Lit, Seq

from conftest import surface


def store(name, value=0):
    return Assign(Field(SELF, name), Lit(value))


def test_generated_names_rename_consistently():
    left = Seq((store("__res1"), store("__count2")))
    right = Seq((store("__res8"), store("__count9")))
    assert alpha_equivalent(left, right)


def test_renaming_must_be_one_to_one():
    left = Seq((store("__res1"), store("__res2")))
    right = Seq((store("__res8"), store("__res8")))
    assert not alpha_equivalent(left, right)
    assert not alpha_equivalent(right, left)


def test_user_names_are_fixed():
    assert not alpha_equivalent(store("__res1"), store("total"))
    assert alpha_equivalent(store("__res1"), store("total"), renamable_right=lambda n: n == "total")


def test_diff_names_the_first_difference():
    d = alpha_diff(store("x", 1), store("x", 2))
    assert d is not None and "value" in d
    assert alpha_diff(store("x"), Binary("is", Lit(0), Lit(0))).startswith("Assign")


def test_fresh_counters_do_not_matter():
    p = surface("lamport_orig")
    a = desugar_all(p, FreshNames.for_program(p))
    fresh = FreshNames.for_program(p)
    fresh.counter = 500
    b = desugar_all(p, fresh)
    assert alpha_equivalent(a, b)
