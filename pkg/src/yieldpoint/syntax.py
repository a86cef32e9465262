# File: yieldpoint/syntax.py
"""Abstract syntax of the distributed-algorithm language.

One frozen dataclass per production, surface sugar included; the desugar
passes rewrite sugared nodes into core ones. Source spans never take part in
equality, so a re-parsed program compares equal to the original.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from yieldpoint.values import Value, value_key

# ---------------------------------------------------------------------------#
# Operator tables

CORE_BINARY = frozenset({"is", "plus", "minus", "select", "lt", "le", "gt", "ge", "or"})
SUGAR_BINARY = frozenset({"and", "ne", "implies", "in", "notin"})
ORDER_OPS = frozenset({"lt", "le", "gt", "ge"})
UNARY_OPS = frozenset({"not", "isTuple", "len"})
AGGREGATES = frozenset({"size", "sum", "max", "min"})

# Flipping the operands of an order comparison.
FLIP = {"lt": "gt", "gt": "lt", "le": "ge", "ge": "le", "is": "is", "ne": "ne"}
# Negating an order comparison.
NEGATE = {"lt": "ge", "ge": "lt", "gt": "le", "le": "gt", "is": "ne", "ne": "is"}

PREDEFINED_CLASSES = ("Object", "Process", "Set", "Sequence", "DS")
HISTORIES = ("received", "sent")


@dataclass(frozen=True)
class Span:
    line: int
    column: int


@dataclass(frozen=True)
class Node:
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


# ---------------------------------------------------------------------------#
# Expressions

class Expr(Node):
    pass


@dataclass(frozen=True, eq=False)
class Lit(Expr):
    """Literal or, in residual programs, any value (addresses, tuples of values)."""
    value: Value
    tag: Optional[str] = None

    def __eq__(self, other):
        if not isinstance(other, Lit):
            return NotImplemented
        return self.tag == other.tag and value_key(self.value) == value_key(other.value)

    def __hash__(self):
        return hash(("Lit", self.tag, value_key(self.value)))


@dataclass(frozen=True)
class Var(Expr):
    """Parameter, bound variable or `self`; before name resolution also a bare field."""
    name: str


@dataclass(frozen=True)
class Field(Expr):
    obj: Expr
    name: str


@dataclass(frozen=True)
class TupleExpr(Expr):
    items: Tuple[Expr, ...]


@dataclass(frozen=True)
class Call(Expr):
    """Method call expression; a missing target means the implicit `self`."""
    target: Optional[Expr]
    method: str
    args: Tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class IsInstance(Expr):
    operand: Expr
    cls: str


@dataclass(frozen=True)
class Quant(Expr):
    kind: str                      # "some" | "each"
    iterators: Tuple["Iterator", ...]
    cond: Expr


@dataclass(frozen=True)
class Comprehension(Expr):
    """`{elem : it, ... | cond}`; elem None is the filter form `{P in s | cond}`."""
    elem: Optional[Expr]
    iterators: Tuple["Iterator", ...]
    cond: Expr


@dataclass(frozen=True)
class Aggregate(Expr):
    op: str
    arg: Expr


@dataclass(frozen=True)
class Defined(Expr):
    """Intrinsic definedness test, written `e != undefined`."""
    operand: Expr


@dataclass(frozen=True)
class ClockRead(Expr):
    """`logical_clock()`."""


@dataclass(frozen=True)
class EmptySet(Expr):
    """`{}` in expression position."""


# ---------------------------------------------------------------------------#
# Patterns

class Pattern(Node):
    pass


@dataclass(frozen=True)
class PVar(Pattern):
    name: str


@dataclass(frozen=True, eq=False)
class PLit(Pattern):
    value: Value
    tag: Optional[str] = None

    def __eq__(self, other):
        if not isinstance(other, PLit):
            return NotImplemented
        return self.tag == other.tag and value_key(self.value) == value_key(other.value)

    def __hash__(self):
        return hash(("PLit", self.tag, value_key(self.value)))


@dataclass(frozen=True)
class PEq(Pattern):
    """`=x`: matches only the current value of x."""
    expr: Expr


@dataclass(frozen=True)
class PWild(Pattern):
    pass


@dataclass(frozen=True)
class PTuple(Pattern):
    items: Tuple[Pattern, ...]


@dataclass(frozen=True)
class Iterator(Node):
    pattern: Pattern
    domain: Expr


# ---------------------------------------------------------------------------#
# Statements

class Stmt(Node):
    pass


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Assign(Stmt):
    """`target = value`; a Comprehension value is the comprehension statement."""
    target: Expr
    value: Expr


@dataclass(frozen=True)
class NewAssign(Stmt):
    target: Expr
    cls: str


@dataclass(frozen=True)
class NewMany(Stmt):
    """`target = count new C`: a set of `count` fresh instances."""
    target: Expr
    count: Expr
    cls: str


@dataclass(frozen=True)
class Seq(Stmt):
    stmts: Tuple[Stmt, ...]


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: Stmt
    orelse: Stmt = Skip()


@dataclass(frozen=True)
class For(Stmt):
    iterator: Iterator
    body: Stmt


@dataclass(frozen=True)
class ForTuple(Stmt):
    """Residual `for x intuple (v1, ..., vn): s`."""
    var: str
    values: Tuple[Value, ...]
    body: Stmt


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass(frozen=True)
class CallStmt(Stmt):
    target: Optional[Expr]
    method: str
    args: Tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Send(Stmt):
    message: Expr
    dest: Expr


@dataclass(frozen=True)
class AwaitClause(Node):
    cond: Expr
    body: Stmt


@dataclass(frozen=True)
class Await(Stmt):
    label: Optional[str]
    clauses: Tuple[AwaitClause, ...]
    timeout: Optional[AwaitClause] = None


@dataclass(frozen=True)
class Labeled(Stmt):
    """A label on a statement other than `await` (sugar)."""
    label: str
    stmt: Stmt


@dataclass(frozen=True)
class Output(Stmt):
    """Observable event; changes nothing but the trace."""
    expr: Expr


# ---------------------------------------------------------------------------#
# Declarations

@dataclass(frozen=True)
class Method(Node):
    kind: str                      # "def" | "defun"
    name: str
    params: Tuple[str, ...]
    body: Union[Stmt, Expr]


@dataclass(frozen=True)
class ReceivePattern(Node):
    pattern: Pattern
    sender: Optional[str] = None


@dataclass(frozen=True)
class ReceiveDef(Node):
    patterns: Tuple[ReceivePattern, ...]
    labels: Optional[Tuple[str, ...]]      # None: every yield point
    body: Stmt


@dataclass(frozen=True)
class ProcessClass(Node):
    name: str
    superclass: str
    methods: Tuple[Method, ...] = ()
    receives: Tuple[ReceiveDef, ...] = ()

    def method(self, name: str) -> Optional[Method]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class Configuration(Node):
    order: str = "fifo"                    # fifo | unordered
    reliability: str = "reliable"          # reliable | unreliable
    clock: str = "none"                    # lamport | none
    handling: str = "all"
    stamps: Tuple[Tuple[str, int], ...] = ()
    record: Tuple[str, ...] = HISTORIES


@dataclass(frozen=True)
class Program(Node):
    configuration: Configuration
    classes: Tuple[ProcessClass, ...]
    main: Method
    tags: Tuple[str, ...] = ()

    def cls(self, name: str) -> Optional[ProcessClass]:
        for c in self.classes:
            if c.name == name:
                return c
        return None


# ---------------------------------------------------------------------------#
# Small constructors used across passes

TRUE = Lit(True)
FALSE = Lit(False)
SELF = Var("self")


def seq(*stmts: Stmt) -> Stmt:
    """Flattened sequence; a single statement stays itself, none is `skip`."""
    flat = []
    for s in stmts:
        if isinstance(s, Seq):
            flat.extend(s.stmts)
        else:
            flat.append(s)
    if not flat:
        return Skip()
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


def stmts_of(s: Stmt) -> Tuple[Stmt, ...]:
    return s.stmts if isinstance(s, Seq) else (s,)


def not_(e: Expr) -> Expr:
    return Unary("not", e)


def and_(*es: Expr) -> Expr:
    out = es[0]
    for e in es[1:]:
        out = Binary("and", out, e)
    return out


def or_(*es: Expr) -> Expr:
    out = es[0]
    for e in es[1:]:
        out = Binary("or", out, e)
    return out


def self_field(name: str) -> Field:
    return Field(SELF, name)


def is_literal(e: Expr) -> bool:
    return isinstance(e, Lit)
