# File: yieldpoint/runtime/state.py
"""Global states of the interleaving machine."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from yieldpoint.runtime.objects import FieldObj, HeapObject, SeqObj
from yieldpoint.syntax import CallStmt, Lit, Program, Stmt
from yieldpoint.values import Address, Value

LocalHeap = Dict[Address, HeapObject]
HeapType = Dict[Address, str]
Channel = Tuple[Address, Address]


@dataclass
class GlobalState:
    """Residual statements, heap types, local heaps, channels and message queues.

    `clocks` holds the hidden Lamport counter of every process; `stuck`
    records processes halted by an error together with the reason.
    """

    residual: Dict[Address, Stmt] = field(default_factory=dict)
    heap_type: HeapType = field(default_factory=dict)
    heaps: Dict[Address, LocalHeap] = field(default_factory=dict)
    channels: Dict[Channel, List[Value]] = field(default_factory=dict)
    mq: Dict[Address, List[Tuple[Value, Address]]] = field(default_factory=dict)
    clocks: Dict[Address, int] = field(default_factory=dict)
    stuck: Dict[Address, str] = field(default_factory=dict)
    next_process: int = 0
    next_object: int = 0

    # -- allocation -------------------------------------------------------#
    def fresh_address(self, process: bool) -> Address:
        if process:
            a = Address(self.next_process, True)
            self.next_process += 1
        else:
            a = Address(self.next_object, False)
            self.next_object += 1
        return a

    # -- views ------------------------------------------------------------#
    def processes(self) -> List[Address]:
        return sorted(self.residual, key=lambda a: a.index)

    def channel(self, sender: Address, receiver: Address) -> List[Value]:
        return self.channels.setdefault((sender, receiver), [])

    def queue(self, a: Address) -> List[Tuple[Value, Address]]:
        return self.mq.setdefault(a, [])

    def nonempty_channels(self) -> List[Channel]:
        keys = [k for k, q in self.channels.items() if q]
        return sorted(keys, key=lambda k: (k[0].index, k[1].index))

    def history(self, a: Address, name: str) -> SeqObj:
        obj = self.heaps[a][a]
        assert isinstance(obj, FieldObj)
        seq_obj = self.heaps[a][obj.fields[name]]
        assert isinstance(seq_obj, SeqObj)
        return seq_obj

    def copy(self) -> "GlobalState":
        return GlobalState(
            residual=dict(self.residual),
            heap_type=dict(self.heap_type),
            heaps={a: {k: o.copy() for k, o in h.items()} for a, h in self.heaps.items()},
            channels={k: list(q) for k, q in self.channels.items()},
            mq={k: list(q) for k, q in self.mq.items()},
            clocks=dict(self.clocks),
            stuck=dict(self.stuck),
            next_process=self.next_process,
            next_object=self.next_object,
        )


def initial_state(p: Program) -> GlobalState:
    """One process running `main`, with empty received and sent sequences."""
    s = GlobalState()
    a_p = s.fresh_address(True)
    a_r = s.fresh_address(False)
    a_s = s.fresh_address(False)
    s.heap_type.update({a_p: "Process", a_r: "Sequence", a_s: "Sequence"})
    s.heaps[a_p] = {a_p: FieldObj({"received": a_r, "sent": a_s}), a_r: SeqObj(), a_s: SeqObj()}
    s.residual[a_p] = CallStmt(Lit(a_p), p.main.name, ())
    return s
