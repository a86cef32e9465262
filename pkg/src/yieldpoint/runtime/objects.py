# File: yieldpoint/runtime/objects.py
"""Heap objects: field maps, sets, sequences and the ordered multiset `DS`."""
from __future__ import annotations

import heapq
from collections import Counter
from typing import Dict, Iterator, List, Optional

from yieldpoint.errors import StuckError
from yieldpoint.values import Value, value_key

# ---------------------------------------------------------------------------#


class FieldObj:
    """Instance of a user class (process objects included)."""

    kind = "fields"

    def __init__(self, fields: Optional[Dict[str, Value]] = None):
        self.fields: Dict[str, Value] = dict(fields or {})

    def get(self, name: str) -> Value:
        try:
            return self.fields[name]
        except KeyError:
            raise StuckError(f"read of undefined field {name}") from None

    def copy(self) -> "FieldObj":
        return FieldObj(self.fields)

    def values(self) -> Iterator[Value]:
        return iter(self.fields.values())

    def __eq__(self, other):
        return isinstance(other, FieldObj) and _keyed(self.fields) == _keyed(other.fields)

    def __repr__(self):
        return f"FieldObj({self.fields!r})"


def _keyed(d: Dict[str, Value]) -> Dict[str, tuple]:
    return {k: value_key(v) for k, v in d.items()}


class SetObj:
    """Set of values under the `is` relation; iterates in canonical order."""

    kind = "set"

    def __init__(self, items=()):
        self.items: Dict[tuple, Value] = {}
        for v in items:
            self.add(v)

    def add(self, v: Value) -> None:
        self.items.setdefault(value_key(v), v)

    def delete(self, v: Value) -> None:
        self.items.pop(value_key(v), None)

    def contains(self, v: Value) -> bool:
        return value_key(v) in self.items

    def size(self) -> int:
        return len(self.items)

    def linearize(self) -> List[Value]:
        return [self.items[k] for k in sorted(self.items)]

    def values(self) -> Iterator[Value]:
        return iter(self.items.values())

    def min(self) -> Value:
        if not self.items:
            raise StuckError("min of an empty set")
        return self.items[min(self.items)]

    def max(self) -> Value:
        if not self.items:
            raise StuckError("max of an empty set")
        return self.items[max(self.items)]

    def copy(self) -> "SetObj":
        out = SetObj()
        out.items = dict(self.items)
        return out

    def __eq__(self, other):
        return isinstance(other, SetObj) and self.items.keys() == other.items.keys()

    def __repr__(self):
        return f"SetObj({self.linearize()!r})"


class SeqObj:
    """Append-only sequence (the `received` and `sent` histories among others)."""

    kind = "sequence"

    def __init__(self, items=()):
        self.items: List[Value] = list(items)

    def add(self, v: Value) -> None:
        self.items.append(v)

    def delete(self, v: Value) -> None:
        raise StuckError("Sequence has no del method")

    def contains(self, v: Value) -> bool:
        k = value_key(v)
        return any(value_key(x) == k for x in self.items)

    def size(self) -> int:
        return len(self.items)

    def linearize(self) -> List[Value]:
        return list(self.items)

    def values(self) -> Iterator[Value]:
        return iter(self.items)

    def copy(self) -> "SeqObj":
        return SeqObj(self.items)

    def __eq__(self, other):
        return (isinstance(other, SeqObj)
                and [value_key(x) for x in self.items] == [value_key(x) for x in other.items])

    def __repr__(self):
        return f"SeqObj({self.items!r})"


class _Desc:
    """Reverses the heap order so one heapq module serves both ends."""
    __slots__ = ("key",)

    def __init__(self, key):
        self.key = key

    def __lt__(self, other):
        return self.key > other.key


class DSObj:
    """Ordered multiset with O(log n) add/del and amortized O(1) min/max.

    Two heaps share one multiplicity table; deleted entries are discarded
    lazily when they surface at a heap top.
    """

    kind = "ds"

    def __init__(self, items=()):
        self.counts: Counter = Counter()
        self.total = 0
        self.by_key: Dict[tuple, Value] = {}
        self._low: list = []
        self._high: list = []
        for v in items:
            self.add(v)

    def add(self, v: Value) -> None:
        k = value_key(v)
        self.counts[k] += 1
        self.total += 1
        self.by_key[k] = v
        heapq.heappush(self._low, k)
        heapq.heappush(self._high, _Desc(k))

    def delete(self, v: Value) -> None:
        k = value_key(v)
        if self.counts[k] <= 0:
            return
        self.counts[k] -= 1
        self.total -= 1
        if self.counts[k] == 0:
            del self.counts[k]
            del self.by_key[k]
        if len(self._low) > 2 * len(self.counts) + 16:
            self._compact()

    def _compact(self) -> None:
        self._low = list(self.counts)
        heapq.heapify(self._low)
        self._high = [_Desc(k) for k in self.counts]
        heapq.heapify(self._high)

    def _live_top(self, heap, unwrap) -> tuple:
        while heap:
            k = unwrap(heap[0])
            if self.counts.get(k, 0) > 0:
                return k
            heapq.heappop(heap)
        raise StuckError("min/max of an empty DS")

    def min(self) -> Value:
        return self.by_key[self._live_top(self._low, lambda k: k)]

    def max(self) -> Value:
        return self.by_key[self._live_top(self._high, lambda d: d.key)]

    def contains(self, v: Value) -> bool:
        return self.counts.get(value_key(v), 0) > 0

    def size(self) -> int:
        return self.total

    def is_empty(self) -> bool:
        return not self.counts

    def linearize(self) -> List[Value]:
        out: List[Value] = []
        for k in sorted(self.counts):
            out.extend([self.by_key[k]] * self.counts[k])
        return out

    def values(self) -> Iterator[Value]:
        return iter(self.linearize())

    def copy(self) -> "DSObj":
        return DSObj(self.linearize())

    def __eq__(self, other):
        return isinstance(other, DSObj) and self.counts == other.counts

    def __repr__(self):
        return f"DSObj({self.linearize()!r})"


HeapObject = FieldObj | SetObj | SeqObj | DSObj

COLLECTION_CLASSES = {"Set": SetObj, "Sequence": SeqObj, "DS": DSObj}


def new_object(cls_name: str) -> HeapObject:
    factory = COLLECTION_CLASSES.get(cls_name)
    return factory() if factory else FieldObj()
