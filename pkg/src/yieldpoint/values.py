# File: yieldpoint/values.py
"""Runtime values shared by the syntax tree (address literals) and the interpreter.

Val = Bool | Int | Address | tuple of Val. Python's ``bool`` is a subclass
of ``int``, so every comparison between values goes through ``value_key``,
which tags the kind first; ``True`` and ``1`` are different values here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Tuple, Union


@dataclass(frozen=True, order=False)
class Address:
    """A heap address. Process addresses double as global process identifiers."""
    index: int
    process: bool = False

    def __str__(self) -> str:
        return f"@p{self.index}" if self.process else f"@{self.index}"


Value = Union[bool, int, Address, Tuple[Any, ...]]

# Kind ranks fix the canonical total order used to linearize sets.
_RANK_BOOL = 0
_RANK_INT = 1
_RANK_ADDR = 2
_RANK_TUPLE = 3


def is_value(v: Any) -> bool:
    if isinstance(v, (bool, int, Address)):
        return True
    if isinstance(v, tuple):
        return all(is_value(x) for x in v)
    return False


def value_key(v: Value) -> tuple:
    """Canonical, hashable, totally ordered key of a value.

    Tuples compare lexicographically component by component, which is also
    the order the `<` operator uses on pairs such as (timestamp, pid).
    """
    if isinstance(v, bool):
        return (_RANK_BOOL, int(v))
    if isinstance(v, int):
        return (_RANK_INT, v)
    if isinstance(v, Address):
        return (_RANK_ADDR, v.index, v.process)
    if isinstance(v, tuple):
        return (_RANK_TUPLE, tuple(value_key(x) for x in v))
    raise TypeError(f"not a value: {v!r}")


def values_equal(a: Value, b: Value) -> bool:
    """The `is` relation: identity on addresses, structural on literals and tuples."""
    return value_key(a) == value_key(b)


def kind_of(v: Value) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, Address):
        return "address"
    if isinstance(v, tuple):
        return "tuple"
    raise TypeError(f"not a value: {v!r}")


def addresses_in(v: Value):
    """Yield every address occurring syntactically in v (not through the heap)."""
    if isinstance(v, Address):
        yield v
    elif isinstance(v, tuple):
        for x in v:
            yield from addresses_in(x)


def format_value(v: Value, tags: Tuple[str, ...] = ()) -> str:
    """Render a value in the concrete syntax, naming interned tags when known."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        name = tag_name(v, tags)
        return f"'{name}'" if name is not None else str(v)
    if isinstance(v, Address):
        return str(v)
    if isinstance(v, tuple):
        inner = ", ".join(format_value(x, tags) for x in v)
        return f"({inner},)" if len(v) == 1 else f"({inner})"
    raise TypeError(f"not a value: {v!r}")


def tag_value(index: int) -> int:
    """Interned integer of the index'th declared tag (0-based)."""
    return -(index + 1)


def tag_name(v: int, tags: Tuple[str, ...]) -> str | None:
    if isinstance(v, bool) or v >= 0:
        return None
    i = -v - 1
    return tags[i] if i < len(tags) else None


def to_jsonable(v: Value, tags: Tuple[str, ...] = ()) -> Any:
    """JSON form used in traces: tags by name, addresses as strings."""
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        name = tag_name(v, tags)
        return name if name is not None else v
    if isinstance(v, Address):
        return str(v)
    if isinstance(v, tuple):
        return [to_jsonable(x, tags) for x in v]
    return repr(v)


if __name__ == "__main__":
    assert not values_equal(True, 1)
    assert values_equal((1, Address(3, True)), (1, Address(3, True)))
    assert value_key((1, Address(2))) < value_key((1, Address(3)))
    assert value_key((2, Address(0))) > value_key((1, Address(9)))
    print(format_value((tag_value(0), 5, Address(1, True)), ("request",)))
    print("Self-test passed.")
