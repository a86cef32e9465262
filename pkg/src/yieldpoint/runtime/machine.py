# File: yieldpoint/runtime/machine.py
"""The interleaving machine: statement transitions over global states.

A process's residual statement is kept flat; its first statement is the
next one to execute and the rest is the enclosing sequential context.
Operands are evaluated atomically by default (a local heap only changes
when its owner steps, so this is a valid schedule of the expression
rules); with ``small_step=True`` every expression reduction is a
transition of its own.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from yieldpoint.astutil import substitute
from yieldpoint.errors import StuckError
from yieldpoint.runtime.classes import ClassTable
from yieldpoint.runtime.clock import ClockEvent, logical_clock_ops, message_stamp, stamp_positions
from yieldpoint.runtime.copying import addrs, copy_into
from yieldpoint.runtime.evaluator import Evaluator
from yieldpoint.runtime.matching import match_receive
from yieldpoint.runtime.objects import FieldObj, SeqObj, new_object
from yieldpoint.runtime.smallstep import decompose, is_value, rule_name, step_expr
from yieldpoint.runtime.state import Channel, GlobalState, initial_state
from yieldpoint.syntax import (
    PREDEFINED_CLASSES,
    Assign,
    Await,
    CallStmt,
    ClockRead,
    Expr,
    Field,
    For,
    ForTuple,
    If,
    Iterator,
    Lit,
    NewAssign,
    Output,
    Program,
    PVar,
    Send,
    Seq,
    Skip,
    Stmt,
    Var,
    While,
    seq,
)
from yieldpoint.values import Address

logger = logging.getLogger(__name__)

# Variable of the loop a send to a set of processes unfolds into.
_SEND_VAR = "__x"


@dataclass(frozen=True)
class Transition:
    rule: str
    process: Optional[Address]
    payload: Dict[str, Any] = field(default_factory=dict)


def split(s: Stmt) -> Tuple[Stmt, Tuple[Stmt, ...]]:
    """Head statement and the rest of a residual."""
    if isinstance(s, Seq):
        return s.stmts[0], s.stmts[1:]
    return s, ()


def _operands(s: Stmt) -> Optional[Tuple[List[Expr], Callable[[List[Expr]], Stmt]]]:
    """Expressions a statement evaluates, left to right, and how to rebuild it."""
    if isinstance(s, Assign) and isinstance(s.target, Field):
        return [s.target.obj, s.value], lambda xs: Assign(Field(xs[0], s.target.name), xs[1])
    if isinstance(s, NewAssign) and isinstance(s.target, Field):
        return [s.target.obj], lambda xs: NewAssign(Field(xs[0], s.target.name), s.cls)
    if isinstance(s, If):
        return [s.cond], lambda xs: If(xs[0], s.then, s.orelse)
    if isinstance(s, For):
        return [s.iterator.domain], lambda xs: For(Iterator(s.iterator.pattern, xs[0]), s.body)
    if isinstance(s, CallStmt) and s.target is not None:
        return [s.target, *s.args], lambda xs: CallStmt(xs[0], s.method, tuple(xs[1:]))
    if isinstance(s, Send):
        return [s.message, s.dest], lambda xs: Send(xs[0], xs[1])
    if isinstance(s, Output):
        return [s.expr], lambda xs: Output(xs[0])
    return None


class Machine:
    """Transition relation of one core program.

    `on_await(process, label, inspections)` is called after every await
    evaluation; `clock_events` logs every clock read and stamped receive.
    """

    def __init__(self, program: Program, *, order: Optional[str] = None,
                 reliability: Optional[str] = None, record: Optional[Tuple[str, ...]] = None,
                 small_step: bool = False,
                 on_await: Optional[Callable[[Address, str, int], None]] = None):
        conf = program.configuration
        self.program = program
        self.classes = ClassTable(program)
        self.order = order or conf.order
        self.reliability = reliability or conf.reliability
        self.lamport = conf.clock == "lamport"
        self.stamps = stamp_positions(conf, program.tags)
        self.record = frozenset(conf.record if record is None else record)
        self.small_step = small_step
        self.on_await = on_await
        self.clock_events: List[ClockEvent] = []

    def initial_state(self) -> GlobalState:
        return initial_state(self.program)

    # -- helpers ----------------------------------------------------------#
    def _evaluator(self, state: GlobalState, a: Address) -> Evaluator:
        def tick() -> int:
            if not self.lamport:
                raise StuckError("logical_clock() needs 'lamport' in the configuration")
            v = logical_clock_ops(state, ClockEvent("read", a))
            self.clock_events.append(ClockEvent("read", a, value=v))
            return v
        return Evaluator(self.classes, state.heap_type, state.heaps[a], tick)

    def _fresh(self, state: GlobalState) -> Callable[[], Address]:
        return lambda: state.fresh_address(False)

    def _field_target(self, ev: Evaluator, target: Expr) -> Tuple[FieldObj, str]:
        if not isinstance(target, Field):
            raise StuckError("assignment target is not a field")
        o = ev.obj(ev.value(target.obj))
        if not isinstance(o, FieldObj):
            raise StuckError(f"cannot set field {target.name} of a collection")
        return o, target.name

    # -- process transitions ----------------------------------------------#
    def status(self, state: GlobalState, a: Address) -> str:
        """terminated, stuck, blocked or ready; evaluation errors mark the process stuck."""
        if a in state.stuck:
            return "stuck"
        head, rest = split(state.residual[a])
        if isinstance(head, Skip) and not rest:
            return "terminated"
        if isinstance(head, Await) and not state.mq.get(a):
            try:
                options = self.await_options(state, a, head)
            except StuckError as exc:
                state.stuck[a] = str(exc)
                return "stuck"
            return "ready" if options else "blocked"
        return "ready"

    def await_options(self, state: GlobalState, a: Address, s: Await) -> List[int]:
        """Indices of the true clauses; [-1] when only the timeout can fire."""
        ev = Evaluator(self.classes, state.heap_type, state.heaps[a])
        true = [i for i, c in enumerate(s.clauses) if ev.truth(c.cond)]
        if self.on_await is not None:
            self.on_await(a, s.label or "", ev.inspections)
        if not true and s.timeout is not None:
            return [-1]
        return true

    def step(self, state: GlobalState, a: Address, clause: Optional[int] = None) -> Optional[Transition]:
        """Apply one transition of process `a` in place.

        Returns None when `a` has terminated or is blocked at an await;
        raises StuckError when no rule applies.
        """
        head, rest = split(state.residual[a])
        if isinstance(head, Skip):
            if not rest:
                return None
            state.residual[a] = seq(*rest)
            return Transition("seq", a)
        if self.small_step and not isinstance(head, Await):
            reduced = self._reduce_operand(state, a, head)
            if reduced is not None:
                new_head, rule = reduced
                state.residual[a] = seq(new_head, *rest)
                return Transition(rule, a)
        handler = self._handlers.get(type(head))
        if handler is None:
            raise StuckError(f"{type(head).__name__} is not a core statement")
        result = handler(self, state, a, head, clause)
        if result is None:
            return None
        new_head, rule, payload = result
        state.residual[a] = seq(new_head, *rest)
        return Transition(rule, a, payload)

    def _reduce_operand(self, state: GlobalState, a: Address, head: Stmt) -> Optional[Tuple[Stmt, str]]:
        ops = _operands(head)
        if ops is None:
            return None
        exprs, rebuild = ops
        for i, e in enumerate(exprs):
            if is_value(e):
                continue
            plug, redex = decompose(e)
            if isinstance(redex, ClockRead):
                new, rule = Lit(self._evaluator(state, a).eval(redex)), "clock"
            else:
                new = step_expr(self.classes, state.heap_type, state.heaps[a], redex)
                rule = rule_name(redex)
            exprs = list(exprs)
            exprs[i] = plug(new)
            return rebuild(exprs), f"ctx:{rule}"
        return None

    # -- statement rules --------------------------------------------------#
    def _assign(self, state, a, s: Assign, clause):
        ev = self._evaluator(state, a)
        o, name = self._field_target(ev, s.target)
        o.fields[name] = ev.value(s.value)
        return Skip(), "assign", {"field": name}

    def _new(self, state, a, s: NewAssign, clause):
        ev = self._evaluator(state, a)
        o, name = self._field_target(ev, s.target)
        if not (self.classes.is_user_class(s.cls) or s.cls in PREDEFINED_CLASSES):
            raise StuckError(f"unknown class {s.cls}")
        created = state.fresh_address(self.classes.extends(s.cls, "Process"))
        state.heap_type[created] = s.cls
        state.heaps[a][created] = new_object(s.cls)
        o.fields[name] = created
        return Skip(), "new", {"class": s.cls, "address": created}

    def _if(self, state, a, s: If, clause):
        if self._evaluator(state, a).truth(s.cond):
            return s.then, "if-true", {}
        return s.orelse, "if-false", {}

    def _for(self, state, a, s: For, clause):
        if not isinstance(s.iterator.pattern, PVar):
            raise StuckError("for loop over a pattern that is not a variable")
        ev = self._evaluator(state, a)
        items = ev.collection(ev.eval(s.iterator.domain)).linearize()
        return ForTuple(s.iterator.pattern.name, tuple(items), s.body), "for", {}

    def _for_tuple(self, state, a, s: ForTuple, clause):
        if not s.values:
            return Skip(), "intuple-end", {}
        first = substitute(s.body, {s.var: Lit(s.values[0])})
        return seq(first, ForTuple(s.var, s.values[1:], s.body)), "intuple", {}

    def _while(self, state, a, s: While, clause):
        return If(s.cond, seq(s.body, s), Skip()), "while", {}

    def _call(self, state, a, s: CallStmt, clause):
        if s.target is None:
            raise StuckError(f"call of {s.method} without a target")
        ev = self._evaluator(state, a)
        target = ev.value(s.target)
        args = [ev.value(x) for x in s.args]
        heap = state.heaps[a]
        o = ev.obj(target)
        cls = state.heap_type[target]
        if not isinstance(o, FieldObj):
            if s.method == "add" and len(args) == 1:
                o.add(args[0])
                return Skip(), "add", {}
            if s.method == "del" and len(args) == 1:
                o.delete(args[0])
                return Skip(), "del", {}
            raise StuckError(f"{cls} has no statement method {s.method}")
        if s.method == "start" and not args and self.classes.extends(cls, "Process") \
                and self.classes.method(cls, "start") is None:
            return self._start(state, a, target, heap), "start", {"started": target}
        m = self.classes.method(cls, s.method)
        if m is None or m.kind != "def":
            raise StuckError(f"{cls} has no def {s.method}")
        if len(m.params) != len(args):
            raise StuckError(f"{s.method} expects {len(m.params)} argument(s)")
        mapping = {"self": Lit(target), **{x: Lit(v) for x, v in zip(m.params, args)}}
        return substitute(m.body, mapping), "call", {"method": s.method}

    def _start(self, state: GlobalState, a: Address, target: Address, heap) -> Stmt:
        if target in state.heaps or not target.process:
            raise StuckError(f"{target} cannot be started")
        o = heap.pop(target)
        new_heap = {}
        names = sorted(o.fields)
        copied = copy_into(tuple(o.fields[n] for n in names), heap, new_heap,
                           state.heap_type, self._fresh(state))
        fields = dict(zip(names, copied))
        a_r = state.fresh_address(False)
        a_s = state.fresh_address(False)
        state.heap_type[a_r] = state.heap_type[a_s] = "Sequence"
        fields.update(received=a_r, sent=a_s)
        new_heap.update({target: FieldObj(fields), a_r: SeqObj(), a_s: SeqObj()})
        state.heaps[target] = new_heap
        state.residual[target] = CallStmt(Lit(target), "run", ())
        logger.debug("started %s (%s)", target, state.heap_type[target])
        return Skip()

    def _send(self, state, a, s: Send, clause):
        ev = self._evaluator(state, a)
        v = ev.value(s.message)
        d = ev.value(s.dest)
        heap = state.heaps[a]
        if isinstance(d, Address) and d.process:
            if "sent" in self.record:
                v1 = copy_into(v, heap, heap, state.heap_type, self._fresh(state))
                state.history(a, "sent").add((v1, d))
            dst = state.heaps.get(d)
            if dst is None:
                if any(not x.process for x in addrs(v, heap)):
                    raise StuckError(f"objects sent to {d} before it started")
                v2 = v
            else:
                v2 = copy_into(v, heap, dst, state.heap_type, self._fresh(state))
            state.channel(a, d).append(v2)
            return Skip(), "send", {"message": v, "to": d}
        if isinstance(d, Address) and d in heap and state.heap_type.get(d) == "Set":
            if "sent" in self.record:
                v1 = copy_into(v, heap, heap, state.heap_type, self._fresh(state))
                state.history(a, "sent").add((v1, d))
            loop = For(Iterator(PVar(_SEND_VAR), Lit(d)), Send(Lit(v), Var(_SEND_VAR)))
            return loop, "send-set", {}
        raise StuckError(f"send destination {d!r} is neither a process nor a set of processes")

    def _output(self, state, a, s: Output, clause):
        return Skip(), "output", {"value": self._evaluator(state, a).value(s.expr)}

    def _await(self, state, a, s: Await, clause):
        q = state.mq.get(a)
        if q:
            return self._handle(state, a, s)
        options = self.await_options(state, a, s)
        if not options:
            return None
        chosen = options[0] if clause is None else clause
        if chosen not in options:
            raise StuckError(f"await clause {chosen} is not enabled")
        if chosen == -1:
            return s.timeout.body, "timeout", {"label": s.label}
        return s.clauses[chosen].body, "await", {"label": s.label, "clause": chosen}

    def _handle(self, state: GlobalState, a: Address, s: Await):
        m, sender = state.mq[a].pop(0)
        heap = state.heaps[a]
        if "received" in self.record:
            copy = copy_into((m, sender), heap, heap, state.heap_type, self._fresh(state))
            state.history(a, "received").add(copy)
        if self.lamport:
            ts = message_stamp(m, self.stamps)
            if ts is not None:
                logical_clock_ops(state, ClockEvent("receive", a, ts))
                self.clock_events.append(ClockEvent("receive", a, ts))
        body = match_receive(m, sender, s.label, state.heap_type[a], heap,
                             state.heap_type, self.classes, a)
        return seq(body, s), "handle", {"message": m, "from": sender, "label": s.label}

    _handlers = {
        Assign: _assign,
        NewAssign: _new,
        If: _if,
        For: _for,
        ForTuple: _for_tuple,
        While: _while,
        CallStmt: _call,
        Send: _send,
        Output: _output,
        Await: _await,
    }

    # -- channel transitions ----------------------------------------------#
    def arrive(self, state: GlobalState, ch: Channel) -> Transition:
        sender, receiver = ch
        m = state.channels[ch].pop(0)
        state.queue(receiver).append((m, sender))
        return Transition("arrive", receiver, {"message": m, "from": sender})

    def reorder(self, state: GlobalState, ch: Channel, i: int) -> Transition:
        if self.order != "unordered":
            raise StuckError("reordering on a fifo channel")
        q = state.channels[ch]
        q[i], q[i + 1] = q[i + 1], q[i]
        return Transition("reorder", ch[1], {"from": ch[0], "position": i})

    def lose(self, state: GlobalState, ch: Channel) -> Transition:
        if self.reliability != "unreliable":
            raise StuckError("message loss on a reliable channel")
        m = state.channels[ch].pop(0)
        return Transition("lose", ch[1], {"message": m, "from": ch[0]})

    # -- enumeration ------------------------------------------------------#
    def enabled_steps(self, state: GlobalState) -> List[Tuple[str, GlobalState]]:
        """Every applicable transition with its successor; `state` is left unchanged."""
        out: List[Tuple[str, GlobalState]] = []
        for a in state.processes():
            if a in state.stuck:
                continue
            head, rest = split(state.residual[a])
            if isinstance(head, Skip) and not rest:
                continue
            choices: List[Optional[int]] = [None]
            if isinstance(head, Await) and not state.mq.get(a):
                try:
                    choices = self.await_options(state.copy(), a, head)
                except StuckError:
                    continue
            for choice in choices:
                succ = state.copy()
                try:
                    t = self.step(succ, a, choice)
                except StuckError:
                    continue
                if t is not None:
                    out.append((t.rule, succ))
        for ch in state.nonempty_channels():
            succ = state.copy()
            out.append((self.arrive(succ, ch).rule, succ))
            if self.order == "unordered":
                for i in range(len(state.channels[ch]) - 1):
                    succ = state.copy()
                    out.append((self.reorder(succ, ch, i).rule, succ))
            if self.reliability == "unreliable":
                succ = state.copy()
                out.append((self.lose(succ, ch).rule, succ))
        return out

    def classify(self, state: GlobalState) -> str:
        """terminated, stuck or deadlocked once nothing is enabled; running otherwise."""
        statuses = [self.status(state, a) for a in state.processes()]
        if state.nonempty_channels() or "ready" in statuses:
            return "running"
        if all(s == "terminated" for s in statuses):
            return "terminated"
        if "stuck" in statuses:
            return "stuck"
        return "deadlocked"


