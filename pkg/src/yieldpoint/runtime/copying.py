# File: yieldpoint/runtime/copying.py
"""Copying values between local heaps.

Non-process objects reachable from a value are duplicated at fresh
addresses; process addresses are global identifiers and stay as they are.
`is_copy` checks the copy relation itself and is what the tests use.
"""
from __future__ import annotations

from typing import Callable, Dict, List, Optional, Set, Tuple

from yieldpoint.errors import StuckError
from yieldpoint.runtime.objects import DSObj, FieldObj, HeapObject, SeqObj, SetObj
from yieldpoint.runtime.state import HeapType, LocalHeap
from yieldpoint.values import Address, Value, value_key

# ---------------------------------------------------------------------------#


def _object_values(obj: HeapObject) -> List[Value]:
    return list(obj.values())


def addrs(v: Value, h: LocalHeap) -> Set[Address]:
    """Addresses occurring in `v` or in any object reachable from it through `h`."""
    out: Set[Address] = set()
    stack = [v]
    while stack:
        x = stack.pop()
        if isinstance(x, Address):
            if x in out:
                continue
            out.add(x)
            if not x.process and x in h:
                stack.extend(_object_values(h[x]))
        elif isinstance(x, tuple):
            stack.extend(x)
    return out


def _rebuild(obj: HeapObject, fn: Callable[[Value], Value]) -> HeapObject:
    if isinstance(obj, FieldObj):
        return FieldObj({k: fn(v) for k, v in obj.fields.items()})
    if isinstance(obj, SetObj):
        return SetObj(fn(v) for v in obj.linearize())
    if isinstance(obj, SeqObj):
        return SeqObj(fn(v) for v in obj.items)
    if isinstance(obj, DSObj):
        return DSObj(fn(v) for v in obj.linearize())
    raise TypeError(f"not a heap object: {obj!r}")


def copy_into(v: Value, src: LocalHeap, dst: LocalHeap, heap_type: HeapType,
              fresh: Callable[[], Address]) -> Value:
    """Copy `v` into `dst`, mutating `dst` and `heap_type`; returns the copied value."""
    mapping: Dict[Address, Address] = {}
    pending: List[Address] = []

    def translate(x: Value) -> Value:
        if isinstance(x, Address):
            if x.process:
                return x
            if x not in mapping:
                if x not in src:
                    raise StuckError(f"dangling address {x} in copied value")
                mapping[x] = fresh()
                pending.append(x)
            return mapping[x]
        if isinstance(x, tuple):
            return tuple(translate(i) for i in x)
        return x

    out = translate(v)
    while pending:
        old = pending.pop()
        new = mapping[old]
        dst[new] = _rebuild(src[old], translate)
        heap_type[new] = heap_type[old]
    return out


def deep_copy(v: Value, src: LocalHeap, dst: LocalHeap, heap_type: HeapType,
              fresh: Callable[[], Address]) -> Tuple[Value, LocalHeap, HeapType]:
    """Non-mutating form of copy_into(): returns the copy, the new heap and the new heap types."""
    dst2 = dict(dst)
    ht2 = dict(heap_type)
    out = copy_into(v, src, dst2, ht2, fresh)
    return out, dst2, ht2


# ---------------------------------------------------------------------------#
# The copy relation

def _corresponds(v: Value, vbar: Value, h: LocalHeap, hbar: LocalHeap,
                 new: Set[Address], f: Dict[Address, Address]) -> Optional[Dict[Address, Address]]:
    """Extend `f` (new address -> old address) so that `vbar` is `v` with addresses replaced."""
    if isinstance(v, Address) and not v.process:
        if not isinstance(vbar, Address) or vbar not in new:
            return None
        if vbar in f:
            return f if f[vbar] == v else None
        if v in f.values() or v not in h or vbar not in hbar:
            return None
        f2 = dict(f)
        f2[vbar] = v
        return _objects_correspond(h[v], hbar[vbar], h, hbar, new, f2)
    if isinstance(v, tuple):
        if not isinstance(vbar, tuple) or len(v) != len(vbar):
            return None
        for a, b in zip(v, vbar):
            f = _corresponds(a, b, h, hbar, new, f)
            if f is None:
                return None
        return f
    if isinstance(vbar, Address) and not vbar.process:
        return None
    return f if value_key(v) == value_key(vbar) else None


def _objects_correspond(o: HeapObject, obar: HeapObject, h, hbar, new, f):
    if type(o) is not type(obar):
        return None
    if isinstance(o, FieldObj):
        if set(o.fields) != set(obar.fields):
            return None
        for k in sorted(o.fields):
            f = _corresponds(o.fields[k], obar.fields[k], h, hbar, new, f)
            if f is None:
                return None
        return f
    if isinstance(o, SeqObj):
        return _corresponds(tuple(o.items), tuple(obar.items), h, hbar, new, f)
    return _match_unordered(o.linearize(), obar.linearize(), h, hbar, new, f)


def _match_unordered(xs: List[Value], ys: List[Value], h, hbar, new, f):
    # backtracking pairing; element order depends on the fresh addresses
    if not xs:
        return f if not ys else None
    if len(xs) != len(ys):
        return None
    first, rest = xs[0], xs[1:]
    for i, y in enumerate(ys):
        f2 = _corresponds(first, y, h, hbar, new, f)
        if f2 is not None:
            f3 = _match_unordered(rest, ys[:i] + ys[i + 1:], h, hbar, new, f2)
            if f3 is not None:
                return f3
    return None


def is_copy(v: Value, h: LocalHeap, hbar: LocalHeap, ht: HeapType,
            vbar: Value, hbar2: LocalHeap, ht2: HeapType) -> bool:
    """The copy predicate: `vbar` in `hbar2` is a fresh copy of `v` in `h`.

    `hbar` and `ht` are the destination heap and heap types before the copy,
    `hbar2` and `ht2` after it.
    """
    new = set(hbar2) - set(hbar)
    if new & set(ht) or any(a.process for a in new):
        return False
    if set(ht2) != set(ht) | new or set(hbar2) != set(hbar) | new:
        return False
    if any(ht2[a] != ht[a] for a in ht) or any(hbar2[a] != hbar[a] for a in hbar):
        return False
    f = _corresponds(v, vbar, h, hbar2, new, {})
    if f is None:
        return False
    wanted = {a for a in addrs(v, h) if not a.process}
    if set(f) != new or set(f.values()) != wanted:
        return False
    return all(ht2[a] == ht[f[a]] for a in new)
