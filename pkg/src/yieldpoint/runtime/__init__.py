# File: yieldpoint/runtime/__init__.py
"""Interleaving interpreter for core programs."""
from yieldpoint.runtime.audit import audit_heaps, check_invariants, process_object_size
from yieldpoint.runtime.classes import ClassTable
from yieldpoint.runtime.clock import ClockEvent, check_clock_recurrence, logical_clock_ops
from yieldpoint.runtime.copying import addrs, copy_into, deep_copy, is_copy
from yieldpoint.runtime.evaluator import Evaluator, TempSet
from yieldpoint.runtime.machine import Machine, Transition, split
from yieldpoint.runtime.matching import match_rcv_def, match_receive, receive_at_label
from yieldpoint.runtime.objects import DSObj, FieldObj, SeqObj, SetObj, new_object
from yieldpoint.runtime.smallstep import decompose, evaluate_small, step_expr
from yieldpoint.runtime.state import GlobalState, initial_state

__all__ = [
    "ClassTable",
    "ClockEvent",
    "DSObj",
    "Evaluator",
    "FieldObj",
    "GlobalState",
    "Machine",
    "SeqObj",
    "SetObj",
    "TempSet",
    "Transition",
    "addrs",
    "audit_heaps",
    "check_clock_recurrence",
    "check_invariants",
    "copy_into",
    "decompose",
    "deep_copy",
    "evaluate_small",
    "initial_state",
    "is_copy",
    "logical_clock_ops",
    "match_rcv_def",
    "match_receive",
    "new_object",
    "process_object_size",
    "receive_at_label",
    "split",
    "step_expr",
]
