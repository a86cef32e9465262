# File: yieldpoint/printer.py
"""Deterministic pretty-printer; its output re-parses to an equal tree."""
from __future__ import annotations

from typing import List

from yieldpoint.syntax import (
    HISTORIES,
    Aggregate,
    Assign,
    Await,
    Binary,
    Call,
    CallStmt,
    ClockRead,
    Comprehension,
    Configuration,
    Defined,
    EmptySet,
    Expr,
    Field,
    For,
    ForTuple,
    If,
    IsInstance,
    Iterator,
    Labeled,
    Lit,
    Method,
    NewAssign,
    NewMany,
    Node,
    Output,
    PEq,
    PLit,
    PTuple,
    PVar,
    PWild,
    Pattern,
    ProcessClass,
    Program,
    Quant,
    ReceiveDef,
    Send,
    Seq,
    Skip,
    Stmt,
    TupleExpr,
    Unary,
    Var,
    While,
)
from yieldpoint.values import Address, format_value

_INDENT = "  "

# precedence levels, loosest first
_QUANT, _IMPLIES, _OR, _AND, _NOT, _CMP, _ADD, _ATOM = range(8)

_INFIX = {
    "implies": ("implies", _IMPLIES),
    "or": ("or", _OR),
    "and": ("and", _AND),
    "is": ("==", _CMP), "ne": ("!=", _CMP),
    "lt": ("<", _CMP), "le": ("<=", _CMP), "gt": (">", _CMP), "ge": (">=", _CMP),
    "in": ("in", _CMP), "notin": ("not in", _CMP),
    "plus": ("+", _ADD), "minus": ("-", _ADD),
}


def _lit(value, tag) -> str:
    if tag is not None:
        return f"'{tag}'"
    if isinstance(value, Address):
        return str(value)
    return format_value(value)


def _paren(text: str, level: int, context: int) -> str:
    return f"({text})" if level < context else text


def expr_to_str(e: Expr, context: int = _QUANT) -> str:
    """Render an expression for a position that binds at least as tight as `context`."""
    text, level = _expr(e)
    return _paren(text, level, context)


def _expr(e: Expr) -> tuple[str, int]:
    if isinstance(e, Lit):
        return _lit(e.value, e.tag), _ATOM
    if isinstance(e, Var):
        return e.name, _ATOM
    if isinstance(e, Field):
        return f"{expr_to_str(e.obj, _ATOM)}.{e.name}", _ATOM
    if isinstance(e, TupleExpr):
        return _tuple([expr_to_str(i) for i in e.items]), _ATOM
    if isinstance(e, Call):
        args = ", ".join(expr_to_str(a) for a in e.args)
        if e.target is None:
            return f"{e.method}({args})", _ATOM
        return f"{expr_to_str(e.target, _ATOM)}.{e.method}({args})", _ATOM
    if isinstance(e, Unary):
        if e.op == "not":
            if isinstance(e.operand, Defined):
                return f"{expr_to_str(e.operand.operand, _ADD)} == undefined", _CMP
            return f"not {expr_to_str(e.operand, _NOT)}", _NOT
        return f"{e.op}({expr_to_str(e.operand)})", _ATOM
    if isinstance(e, Binary):
        if e.op == "select":
            return f"select({expr_to_str(e.left)}, {expr_to_str(e.right)})", _ATOM
        sym, level = _INFIX[e.op]
        if level == _IMPLIES:
            left, right = expr_to_str(e.left, _OR), expr_to_str(e.right, _IMPLIES)
        elif level in (_OR, _AND):
            left, right = expr_to_str(e.left, level), expr_to_str(e.right, level + 1)
        elif level == _CMP:
            left, right = expr_to_str(e.left, _ADD), expr_to_str(e.right, _ADD)
        else:
            left, right = expr_to_str(e.left, _ADD), expr_to_str(e.right, _ATOM)
            if isinstance(e.right, Lit) and e.right.tag is None and _negative(e.right.value):
                right = f"({right})"
        return f"{left} {sym} {right}", level
    if isinstance(e, IsInstance):
        return f"isinstance({expr_to_str(e.operand)}, {e.cls})", _ATOM
    if isinstance(e, Quant):
        iters = ", ".join(iterator_to_str(i) for i in e.iterators)
        return f"{e.kind} {iters} | {expr_to_str(e.cond)}", _QUANT
    if isinstance(e, Comprehension):
        cond = expr_to_str(e.cond)
        if e.elem is None:
            it = e.iterators[0]
            return f"{{{pattern_to_str(it.pattern)} in {expr_to_str(it.domain, _ADD)} | {cond}}}", _ATOM
        iters = ", ".join(iterator_to_str(i) for i in e.iterators)
        return f"{{{expr_to_str(e.elem)} : {iters} | {cond}}}", _ATOM
    if isinstance(e, Aggregate):
        return f"{e.op}({expr_to_str(e.arg)})", _ATOM
    if isinstance(e, Defined):
        return f"{expr_to_str(e.operand, _ADD)} != undefined", _CMP
    if isinstance(e, ClockRead):
        return "logical_clock()", _ATOM
    if isinstance(e, EmptySet):
        return "{}", _ATOM
    raise TypeError(f"cannot print expression {e!r}")


def _negative(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v < 0


def _tuple(items: List[str]) -> str:
    if len(items) == 1:
        return f"({items[0]},)"
    return f"({', '.join(items)})"


def pattern_to_str(p: Pattern) -> str:
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PWild):
        return "_"
    if isinstance(p, PLit):
        return _lit(p.value, p.tag)
    if isinstance(p, PEq):
        return f"={expr_to_str(p.expr, _ATOM)}"
    if isinstance(p, PTuple):
        return _tuple([pattern_to_str(i) for i in p.items])
    raise TypeError(f"cannot print pattern {p!r}")


def _history_iterator(it: Iterator) -> bool:
    return (isinstance(it.domain, Var) and it.domain.name in HISTORIES
            and isinstance(it.pattern, PTuple) and len(it.pattern.items) == 2)


def iterator_to_str(it: Iterator) -> str:
    if _history_iterator(it):
        msg, peer = it.pattern.items
        if isinstance(msg, PTuple) and len(msg.items) >= 2:
            inner = ", ".join(pattern_to_str(i) for i in msg.items)
        else:
            inner = pattern_to_str(msg)
        if not isinstance(peer, PWild):
            word = "from" if it.domain.name == "received" else "to"
            inner += f" {word} {pattern_to_str(peer)}"
        return f"{it.domain.name}({inner})"
    return f"{pattern_to_str(it.pattern)} in {expr_to_str(it.domain, _ADD)}"


# ---------------------------------------------------------------------------#
def stmt_lines(s: Stmt, depth: int = 0) -> List[str]:
    pad = _INDENT * depth
    if isinstance(s, Seq):
        out: List[str] = []
        for item in s.stmts:
            out.extend(stmt_lines(item, depth))
        return out
    if isinstance(s, Skip):
        return [pad + "skip"]
    if isinstance(s, Assign):
        return [f"{pad}{expr_to_str(s.target, _ATOM)} = {expr_to_str(s.value)}"]
    if isinstance(s, NewAssign):
        return [f"{pad}{expr_to_str(s.target, _ATOM)} = new {s.cls}"]
    if isinstance(s, NewMany):
        return [f"{pad}{expr_to_str(s.target, _ATOM)} = {expr_to_str(s.count, _ADD)} new {s.cls}"]
    if isinstance(s, CallStmt):
        args = ", ".join(expr_to_str(a) for a in s.args)
        head = s.method if s.target is None else f"{expr_to_str(s.target, _ATOM)}.{s.method}"
        return [f"{pad}{head}({args})"]
    if isinstance(s, Send):
        return [f"{pad}send {expr_to_str(s.message)} to {expr_to_str(s.dest)}"]
    if isinstance(s, Output):
        return [f"{pad}output {expr_to_str(s.expr)}"]
    if isinstance(s, If):
        out = [f"{pad}if {expr_to_str(s.cond)}:"] + stmt_lines(s.then, depth + 1)
        if not isinstance(s.orelse, Skip):
            out += [f"{pad}else:"] + stmt_lines(s.orelse, depth + 1)
        return out + [pad + "end"]
    if isinstance(s, For):
        return ([f"{pad}for {iterator_to_str(s.iterator)}:"]
                + stmt_lines(s.body, depth + 1) + [pad + "end"])
    if isinstance(s, ForTuple):
        return ([f"{pad}for {s.var} intuple {format_value(tuple(s.values))}:"]
                + stmt_lines(s.body, depth + 1) + [pad + "end"])
    if isinstance(s, While):
        return [f"{pad}while {expr_to_str(s.cond)}:"] + stmt_lines(s.body, depth + 1) + [pad + "end"]
    if isinstance(s, Await):
        out = [f"{pad}-- {s.label}"] if s.label else []
        first = s.clauses[0]
        if len(s.clauses) == 1 and isinstance(first.body, Skip) and s.timeout is None:
            return out + [f"{pad}await {expr_to_str(first.cond)}"]
        out += [f"{pad}await {expr_to_str(first.cond)}:"] + stmt_lines(first.body, depth + 1)
        for c in s.clauses[1:]:
            out += [f"{pad}or {expr_to_str(c.cond)}:"] + stmt_lines(c.body, depth + 1)
        if s.timeout is not None:
            out += [f"{pad}timeout {expr_to_str(s.timeout.cond)}:"] + stmt_lines(s.timeout.body, depth + 1)
        return out + [pad + "end"]
    if isinstance(s, Labeled):
        return [f"{pad}-- {s.label}"] + stmt_lines(s.stmt, depth)
    raise TypeError(f"cannot print statement {s!r}")


def _method_lines(m: Method, depth: int) -> List[str]:
    pad = _INDENT * depth
    params = ", ".join(m.params)
    if m.kind == "defun":
        return [f"{pad}defun {m.name}({params}) = {expr_to_str(m.body)}"]
    return [f"{pad}def {m.name}({params}):"] + stmt_lines(m.body, depth + 1) + [pad + "end"]


def _receive_lines(r: ReceiveDef, depth: int) -> List[str]:
    pad = _INDENT * depth
    pats = []
    for rp in r.patterns:
        text = pattern_to_str(rp.pattern)
        pats.append(f"{text} from {rp.sender}" if rp.sender else text)
    head = f"{pad}receive {', '.join(pats)}"
    if r.labels:
        head += f" at {', '.join(r.labels)}"
    return [head + ":"] + stmt_lines(r.body, depth + 1) + [pad + "end"]


def _class_lines(c: ProcessClass) -> List[str]:
    out = [f"class {c.name} extends {c.superclass}:"]
    for m in c.methods:
        out += _method_lines(m, 1)
    for r in c.receives:
        out += _receive_lines(r, 1)
    return out + ["end"]


def configuration_to_str(conf: Configuration) -> str:
    parts = ["configuration", conf.order, conf.reliability]
    if conf.clock == "lamport":
        parts.append("lamport")
    if conf.stamps:
        parts.append("stamps " + ", ".join(f"'{t}' {pos}" for t, pos in conf.stamps))
    if tuple(conf.record) != HISTORIES:
        parts.append("record " + (", ".join(conf.record) if conf.record else "none"))
    return " ".join(parts) + ";"


def pretty(node: Node) -> str:
    """Render a program (or any statement or expression) in concrete syntax."""
    if isinstance(node, Program):
        out: List[str] = []
        if node.tags:
            out.append("tags " + ", ".join(f"'{t}'" for t in node.tags) + ";")
        out.append(configuration_to_str(node.configuration))
        for c in node.classes:
            out.append("")
            out += _class_lines(c)
        out.append("")
        out += _method_lines(node.main, 0)
        return "\n".join(out) + "\n"
    if isinstance(node, Stmt):
        return "\n".join(stmt_lines(node)) + "\n"
    if isinstance(node, Expr):
        return expr_to_str(node)
    if isinstance(node, Method):
        return "\n".join(_method_lines(node, 0)) + "\n"
    raise TypeError(f"cannot print {type(node).__name__}")
