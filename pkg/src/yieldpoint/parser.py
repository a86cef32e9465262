# File: yieldpoint/parser.py
"""Concrete syntax front end.

Blocks are delimited by ``:`` ... ``end``; labels are written ``-- name``
on the line before the statement they label; ``#`` starts a comment.
Message tags such as ``'request'`` are interned to negative integers in
order of first appearance (an explicit ``tags`` line fixes the order).
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import List, Optional, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from yieldpoint.astutil import walk
from yieldpoint.diagnostics import Diagnostic
from yieldpoint.errors import LexError, ParseError, YieldpointError
from yieldpoint.syntax import (
    HISTORIES,
    Aggregate,
    Assign,
    Await,
    AwaitClause,
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
    ReceivePattern,
    Send,
    Skip,
    Span,
    TRUE,
    TupleExpr,
    Unary,
    Var,
    While,
    not_,
    seq,
)
from yieldpoint.values import Address, tag_value

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: tags_decl? configuration class_def* method_def

tags_decl: "tags" TAG ("," TAG)* ";"

configuration: "configuration" order_kw reliability_kw LAMPORT? stamps? record? ";"
?order_kw: FIFO | UNORDERED
?reliability_kw: RELIABLE | UNRELIABLE
stamps: "stamps" stamp ("," stamp)*
stamp: TAG INT
record: "record" history_kw ("," history_kw)*
      | "record" NONE                                  -> record_none
?history_kw: RECEIVED | SENT

class_def: "class" NAME "extends" NAME ":" member* "end"
?member: method_def | receive_def

method_def: "def" NAME "(" params? ")" ":" block "end"  -> def_block
          | "def" NAME "(" params? ")" simple_stmt       -> def_simple
          | "defun" NAME "(" params? ")" "=" expr         -> defun
params: NAME ("," NAME)*

receive_def: "receive" rpat ("," rpat)* at_clause? ":" block "end"
at_clause: "at" NAME ("," NAME)*
rpat: add_e ("from" NAME)?

block: (stmt ";"?)*

?stmt: simple_stmt | compound_stmt | labeled
labeled: "--" NAME stmt

?simple_stmt: "skip"                                   -> skip
    | target "=" expr                                  -> assign
    | target AUGOP expr                                -> aug_assign
    | target "=" "new" NAME ("(" ")")?                 -> new_assign
    | target "=" add_e "new" NAME ("(" ")")?           -> new_many
    | callee "(" args? ")"                             -> call_stmt
    | "send" expr "to" expr                            -> send
    | "output" expr                                    -> output
    | "await" expr                                     -> await_simple

?compound_stmt: "if" expr ":" block else_part? "end"   -> if_stmt
    | "for" add_e "in" expr ":" block "end"            -> for_stmt
    | "for" NAME "intuple" expr ":" block "end"        -> for_tuple
    | "while" expr ":" block "end"                     -> while_stmt
    | "await" expr ":" block await_or* await_timeout? "end" -> await_block
else_part: "else" ":" block
await_or: "or" expr ":" block
await_timeout: "timeout" expr ":" block

target: NAME ("." NAME)*
callee: NAME ("." NAME)*
args: expr ("," expr)*

?expr: quant | implies_e
quant: quant_kw iter ("," iter)* "|" expr
?quant_kw: SOME | EACH
iter: add_e "in" add_e                                 -> iter_in
    | history_kw "(" add_e ("," add_e)* peer? ")"      -> iter_history
peer: "from" add_e | "to" add_e

?implies_e: or_e
    | or_e "implies" implies_e                         -> implies_op
?or_e: and_e
    | or_e "or" and_e                                  -> or_op
?and_e: not_e
    | and_e "and" not_e                                -> and_op
?not_e: cmp_e
    | "not" not_e                                      -> not_op
?cmp_e: add_e
    | add_e CMPOP add_e                                -> compare
    | add_e "is" add_e                                 -> is_op
    | add_e "in" add_e                                 -> in_op
    | add_e "not" "in" add_e                           -> notin_op
?add_e: postfix
    | add_e "+" postfix                                -> plus_op
    | add_e "-" postfix                                -> minus_op
?postfix: atom
    | postfix "." NAME                                 -> field
    | postfix "." NAME "(" args? ")"                   -> method_call

?atom: INT                                             -> int_lit
    | "-" INT                                          -> neg_int
    | TRUE                                             -> bool_lit
    | FALSE                                            -> bool_lit
    | TAG                                              -> tag_lit
    | ADDRESS                                          -> address_lit
    | UNDEFINED                                        -> undefined_lit
    | NAME                                             -> var
    | history_kw                                       -> var
    | NAME "(" args? ")"                               -> bare_call
    | "(" expr ")"
    | "(" ")"                                          -> unit
    | "(" expr "," ")"                                 -> tuple1
    | "(" expr ("," expr)+ ")"                         -> tuple_n
    | "{" "}"                                          -> empty_set
    | "{" expr "|" expr "}"                            -> filter_comp
    | "{" expr ":" iter ("," iter)* ("|" expr)? "}"    -> comp
    | "=" postfix                                      -> eq_marker
    | "or" "(" expr "," expr ")"                       -> or_prefix
    | "and" "(" expr "," expr ")"                      -> and_prefix
    | "is" "(" expr "," expr ")"                       -> is_prefix

FIFO: "fifo"
UNORDERED: "unordered"
RELIABLE: "reliable"
UNRELIABLE: "unreliable"
LAMPORT: "lamport"
NONE: "none"
RECEIVED: "received"
SENT: "sent"
SOME: "some"
EACH: "each"
TRUE: "true"
FALSE: "false"
UNDEFINED: "undefined"

CMPOP: "==" | "!=" | "<=" | ">=" | "<" | ">"
AUGOP: "+=" | "-="
TAG: /'[A-Za-z_][A-Za-z0-9_]*'/
ADDRESS: /@p?[0-9]+/
INT: /[0-9]+/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_CMP = {"==": "is", "!=": "ne", "<": "lt", "<=": "le", ">": "gt", ">=": "ge"}

# Bare calls with a built-in meaning; everything else is an implicit-self defun call.
_BINARY_CALLS = {"plus", "minus", "select"}
_UNARY_CALLS = {"len", "isTuple"}
_AGGREGATE_CALLS = {"size", "sum", "max", "min"}
RESERVED_CALLS = frozenset(_BINARY_CALLS | _UNARY_CALLS | _AGGREGATE_CALLS
                           | {"isinstance", "logical_clock", "defined"})


@functools.cache
def _parser() -> Lark:
    """Create/retrieve the singleton Lark parser."""
    return Lark(GRAMMAR, parser="earley", lexer="basic", propagate_positions=True)


# ---------------------------------------------------------------------------#
# Markers that only survive inside patterns or comparisons

@dataclass(frozen=True)
class _UndefinedMarker(Expr):
    pass


@dataclass(frozen=True)
class _EqMarker(Expr):
    expr: Expr


@dataclass(frozen=True)
class _Peer:
    expr: Expr


@dataclass(frozen=True)
class _Timeout:
    clause: AwaitClause


@dataclass(frozen=True)
class _Else:
    stmt: object


def _span(meta) -> Optional[Span]:
    if getattr(meta, "empty", True):
        return None
    return Span(meta.line, meta.column)


def _tok_span(tok: Token) -> Optional[Span]:
    return Span(tok.line, tok.column) if tok.line is not None else None


def _fail(message: str, span: Optional[Span]) -> ParseError:
    line, col = (span.line, span.column) if span else (0, 0)
    diag = Diagnostic(line=line, column=col, rule="syntax", message=message)
    return ParseError(message, line, col, diag)


def to_pattern(e: Expr) -> Pattern:
    """Reinterpret an expression parsed in pattern position."""
    if isinstance(e, Var):
        return PWild(span=e.span) if e.name == "_" else PVar(e.name, span=e.span)
    if isinstance(e, Lit):
        return PLit(e.value, e.tag, span=e.span)
    if isinstance(e, _EqMarker):
        return PEq(e.expr, span=e.span)
    if isinstance(e, TupleExpr):
        return PTuple(tuple(to_pattern(i) for i in e.items), span=e.span)
    raise _fail(f"not a pattern: {type(e).__name__}", e.span)


def _literal_value(e: Expr):
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, TupleExpr):
        return tuple(_literal_value(i) for i in e.items)
    raise _fail("intuple expects a tuple of values", e.span)


def _chain(names: List[Token]) -> Expr:
    out: Expr = Var(str(names[0]), span=_tok_span(names[0]))
    for n in names[1:]:
        out = Field(out, str(n), span=_tok_span(n))
    return out


# ---------------------------------------------------------------------------#
@v_args(meta=True)
class _ToAst(Transformer):
    """Build syntax nodes; holds the tag table of one parse."""

    def __init__(self):
        super().__init__()
        self.tags: List[str] = []

    def _tag(self, tok: Token) -> Lit:
        name = str(tok)[1:-1]
        if name not in self.tags:
            self.tags.append(name)
        return Lit(tag_value(self.tags.index(name)), name, span=_tok_span(tok))

    # -- top level --------------------------------------------------------#
    def start(self, meta, children):
        conf = next(c for c in children if isinstance(c, Configuration))
        classes = tuple(c for c in children if isinstance(c, ProcessClass))
        main = children[-1]
        return Program(conf, classes, main, tuple(self.tags), span=_span(meta))

    def tags_decl(self, meta, children):
        for tok in children:
            self._tag(tok)
        return None

    def configuration(self, meta, children):
        kw = {"order": str(children[0]), "reliability": str(children[1])}
        for c in children[2:]:
            if isinstance(c, Token) and c.type == "LAMPORT":
                kw["clock"] = "lamport"
            elif isinstance(c, tuple) and c[0] == "stamps":
                kw["stamps"] = c[1]
            elif isinstance(c, tuple) and c[0] == "record":
                kw["record"] = c[1]
        return Configuration(span=_span(meta), **kw)

    def stamps(self, meta, children):
        return ("stamps", tuple(children))

    def stamp(self, meta, children):
        return (self._tag(children[0]).tag, int(children[1]))

    def record(self, meta, children):
        return ("record", tuple(h for h in HISTORIES if h in {str(c) for c in children}))

    def record_none(self, meta, children):
        return ("record", ())

    def class_def(self, meta, children):
        name, sup, *members = children
        methods = tuple(m for m in members if isinstance(m, Method))
        receives = tuple(m for m in members if isinstance(m, ReceiveDef))
        return ProcessClass(str(name), str(sup), methods, receives, span=_span(meta))

    def _method(self, kind, meta, children):
        name = str(children[0])
        params = children[1] if len(children) == 3 else ()
        return Method(kind, name, params, children[-1], span=_span(meta))

    def def_block(self, meta, children):
        return self._method("def", meta, children)

    def def_simple(self, meta, children):
        return self._method("def", meta, children)

    def defun(self, meta, children):
        return self._method("defun", meta, children)

    def params(self, meta, children):
        return tuple(str(c) for c in children)

    def receive_def(self, meta, children):
        pats = tuple(c for c in children if isinstance(c, ReceivePattern))
        labels = next((c for c in children if isinstance(c, tuple)), None)
        return ReceiveDef(pats, labels, children[-1], span=_span(meta))

    def at_clause(self, meta, children):
        return tuple(str(c) for c in children)

    def rpat(self, meta, children):
        sender = str(children[1]) if len(children) > 1 else None
        return ReceivePattern(to_pattern(children[0]), sender, span=_span(meta))

    # -- statements -------------------------------------------------------#
    def block(self, meta, children):
        return seq(*children)

    def labeled(self, meta, children):
        name, stmt = str(children[0]), children[1]
        if isinstance(stmt, Await) and stmt.label is None:
            return Await(name, stmt.clauses, stmt.timeout, span=stmt.span)
        return Labeled(name, stmt, span=_span(meta))

    def skip(self, meta, children):
        return Skip(span=_span(meta))

    def assign(self, meta, children):
        return Assign(children[0], children[1], span=_span(meta))

    def aug_assign(self, meta, children):
        target, op, value = children
        binop = "plus" if str(op) == "+=" else "minus"
        return Assign(target, Binary(binop, target, value, span=value.span), span=_span(meta))

    def new_assign(self, meta, children):
        return NewAssign(children[0], str(children[1]), span=_span(meta))

    def new_many(self, meta, children):
        return NewMany(children[0], children[1], str(children[2]), span=_span(meta))

    def call_stmt(self, meta, children):
        target, method = children[0]
        args = tuple(children[1]) if len(children) > 1 else ()
        return CallStmt(target, method, args, span=_span(meta))

    def send(self, meta, children):
        return Send(children[0], children[1], span=_span(meta))

    def output(self, meta, children):
        return Output(children[0], span=_span(meta))

    def await_simple(self, meta, children):
        clause = AwaitClause(children[0], Skip(), span=_span(meta))
        return Await(None, (clause,), None, span=_span(meta))

    def await_block(self, meta, children):
        cond, body, *rest = children
        clauses = [AwaitClause(cond, body, span=_span(meta))]
        timeout = None
        for r in rest:
            if isinstance(r, _Timeout):
                timeout = r.clause
            else:
                clauses.append(r)
        return Await(None, tuple(clauses), timeout, span=_span(meta))

    def await_or(self, meta, children):
        return AwaitClause(children[0], children[1], span=_span(meta))

    def await_timeout(self, meta, children):
        return _Timeout(AwaitClause(children[0], children[1], span=_span(meta)))

    def if_stmt(self, meta, children):
        orelse = children[2].stmt if len(children) > 2 else Skip()
        return If(children[0], children[1], orelse, span=_span(meta))

    def else_part(self, meta, children):
        return _Else(children[0])

    def for_stmt(self, meta, children):
        pat, dom, body = children
        return For(Iterator(to_pattern(pat), dom, span=_span(meta)), body, span=_span(meta))

    def for_tuple(self, meta, children):
        var, values, body = children
        vals = _literal_value(values)
        if not isinstance(vals, tuple):
            raise _fail("intuple expects a tuple of values", values.span)
        return ForTuple(str(var), vals, body, span=_span(meta))

    def while_stmt(self, meta, children):
        return While(children[0], children[1], span=_span(meta))

    def target(self, meta, children):
        return _chain(children)

    def callee(self, meta, children):
        if len(children) == 1:
            return (None, str(children[0]))
        return (_chain(children[:-1]), str(children[-1]))

    def args(self, meta, children):
        return list(children)

    # -- expressions ------------------------------------------------------#
    def quant(self, meta, children):
        kind, *iters, cond = children
        return Quant(str(kind), tuple(iters), cond, span=_span(meta))

    def iter_in(self, meta, children):
        return Iterator(to_pattern(children[0]), children[1], span=_span(meta))

    def iter_history(self, meta, children):
        hist, *items = children
        peer = PWild()
        if items and isinstance(items[-1], _Peer):
            peer = to_pattern(items.pop().expr)
        msg = items[0] if len(items) == 1 else TupleExpr(tuple(items), span=_span(meta))
        pat = PTuple((to_pattern(msg), peer), span=_span(meta))
        return Iterator(pat, Var(str(hist), span=_tok_span(hist)), span=_span(meta))

    def peer(self, meta, children):
        return _Peer(children[0])

    def implies_op(self, meta, children):
        return Binary("implies", children[0], children[1], span=_span(meta))

    def or_op(self, meta, children):
        return Binary("or", children[0], children[1], span=_span(meta))

    def and_op(self, meta, children):
        return Binary("and", children[0], children[1], span=_span(meta))

    def not_op(self, meta, children):
        return Unary("not", children[0], span=_span(meta))

    def compare(self, meta, children):
        left, op, right = children
        name = _CMP[str(op)]
        if isinstance(right, _UndefinedMarker) and name in ("is", "ne"):
            defined = Defined(left, span=_span(meta))
            return not_(defined) if name == "is" else defined
        return Binary(name, left, right, span=_span(meta))

    def is_op(self, meta, children):
        return Binary("is", children[0], children[1], span=_span(meta))

    def in_op(self, meta, children):
        return Binary("in", children[0], children[1], span=_span(meta))

    def notin_op(self, meta, children):
        return Binary("notin", children[0], children[1], span=_span(meta))

    def plus_op(self, meta, children):
        return Binary("plus", children[0], children[1], span=_span(meta))

    def minus_op(self, meta, children):
        return Binary("minus", children[0], children[1], span=_span(meta))

    def field(self, meta, children):
        return Field(children[0], str(children[1]), span=_span(meta))

    def method_call(self, meta, children):
        args = tuple(children[2]) if len(children) > 2 else ()
        return Call(children[0], str(children[1]), args, span=_span(meta))

    def int_lit(self, meta, children):
        return Lit(int(children[0]), span=_span(meta))

    def neg_int(self, meta, children):
        return Lit(-int(children[0]), span=_span(meta))

    def bool_lit(self, meta, children):
        return Lit(children[0].type == "TRUE", span=_span(meta))

    def tag_lit(self, meta, children):
        return self._tag(children[0])

    def address_lit(self, meta, children):
        text = str(children[0])[1:]
        process = text.startswith("p")
        return Lit(Address(int(text.lstrip("p")), process), span=_span(meta))

    def undefined_lit(self, meta, children):
        return _UndefinedMarker(span=_span(meta))

    def var(self, meta, children):
        return Var(str(children[0]), span=_span(meta))

    def bare_call(self, meta, children):
        name = str(children[0])
        args = tuple(children[1]) if len(children) > 1 else ()
        span = _span(meta)
        arity = {**{n: 2 for n in _BINARY_CALLS}, **{n: 1 for n in _UNARY_CALLS},
                 **{n: 1 for n in _AGGREGATE_CALLS}, "isinstance": 2, "logical_clock": 0,
                 "defined": 1}.get(name)
        if arity is not None and len(args) != arity:
            raise _fail(f"{name}() takes {arity} argument(s), got {len(args)}", span)
        if name in _BINARY_CALLS:
            return Binary(name, args[0], args[1], span=span)
        if name in _UNARY_CALLS:
            return Unary(name, args[0], span=span)
        if name in _AGGREGATE_CALLS:
            return Aggregate(name, args[0], span=span)
        if name == "isinstance":
            if not isinstance(args[1], Var):
                raise _fail("isinstance() expects a class name", span)
            return IsInstance(args[0], args[1].name, span=span)
        if name == "logical_clock":
            return ClockRead(span=span)
        if name == "defined":
            return Defined(args[0], span=span)
        return Call(None, name, args, span=span)

    def unit(self, meta, children):
        return TupleExpr((), span=_span(meta))

    def tuple1(self, meta, children):
        return TupleExpr((children[0],), span=_span(meta))

    def tuple_n(self, meta, children):
        return TupleExpr(tuple(children), span=_span(meta))

    def empty_set(self, meta, children):
        return EmptySet(span=_span(meta))

    def filter_comp(self, meta, children):
        member, cond = children
        if not (isinstance(member, Binary) and member.op == "in"):
            raise _fail("set filter must start with a membership 'P in s'", _span(meta))
        it = Iterator(to_pattern(member.left), member.right, span=member.span)
        return Comprehension(None, (it,), cond, span=_span(meta))

    def comp(self, meta, children):
        elem, *rest = children
        iters = tuple(c for c in rest if isinstance(c, Iterator))
        cond = rest[-1] if rest and not isinstance(rest[-1], Iterator) else TRUE
        return Comprehension(elem, iters, cond, span=_span(meta))

    def eq_marker(self, meta, children):
        return _EqMarker(children[0], span=_span(meta))

    def or_prefix(self, meta, children):
        return Binary("or", children[0], children[1], span=_span(meta))

    def and_prefix(self, meta, children):
        return Binary("and", children[0], children[1], span=_span(meta))

    def is_prefix(self, meta, children):
        return Binary("is", children[0], children[1], span=_span(meta))


# ---------------------------------------------------------------------------#
def _end_position(text: str) -> tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def _translate(exc: UnexpectedInput, text: str) -> YieldpointError:
    if isinstance(exc, UnexpectedCharacters):
        diag = Diagnostic.from_lark(exc, "lexical")
        return LexError(diag.message, diag.line, diag.column, diag)
    diag = Diagnostic.from_lark(exc, "syntax")
    at_end = isinstance(exc, UnexpectedEOF) or getattr(getattr(exc, "token", None), "type", None) == "$END"
    if at_end or diag.line <= 0:
        line, column = _end_position(text)
        diag = diag.model_copy(update={"line": line, "column": column})
    return ParseError(diag.message, diag.line, diag.column, diag)


def parse(source_text: str) -> Program:
    """Parse one program. Raises LexError or ParseError with a line and column."""
    try:
        tree = _parser().parse(source_text)
    except UnexpectedInput as exc:
        raise _translate(exc, source_text) from None
    try:
        program = _ToAst().transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, YieldpointError):
            raise exc.orig_exc from None
        raise
    for node in walk(program):
        if isinstance(node, _UndefinedMarker):
            raise _fail("'undefined' may only be compared with == or !=", node.span)
        if isinstance(node, _EqMarker):
            raise _fail("'=' prefix is only allowed in patterns", node.span)
    logger.debug("parsed %d class(es), %d tag(s)", len(program.classes), len(program.tags))
    return program


def parse_or_diagnostics(source_text: str) -> Union[Program, List[Diagnostic]]:
    """Like parse(), but returns the diagnostics instead of raising."""
    try:
        return parse(source_text)
    except (LexError, ParseError) as exc:
        return [exc.diagnostic]


def parse_expr(text: str) -> Expr:
    """Parse a single expression (tests and the CLI use this)."""
    program = parse(f"configuration fifo reliable; defun main() = {text}")
    return program.main.body


if __name__ == "__main__":
    p = parse("configuration fifo reliable; def main() skip")
    assert p.main.name == "main" and p.classes == ()
    try:
        parse("configuration fifo reliable; def main() send (1,) to")
    except ParseError as e:
        print("expected error:", e.line, e.column, e)
    print("Self-test passed.")
