# File: yieldpoint/astutil.py
"""Generic traversal, rebuilding and substitution over the syntax tree."""
from __future__ import annotations

import dataclasses
from typing import Callable, Dict, Iterable, Iterator as PyIterator, Mapping, Set

from yieldpoint.syntax import (
    Comprehension,
    Expr,
    Field,
    For,
    ForTuple,
    Iterator,
    Lit,
    Node,
    PEq,
    PLit,
    PTuple,
    PVar,
    Pattern,
    Quant,
    ReceiveDef,
    SELF,
    Seq,
    Skip,
    TupleExpr,
    Var,
    seq,
)

# ---------------------------------------------------------------------------#
_FIELD_CACHE: Dict[type, tuple] = {}


def _field_names(cls: type) -> tuple:
    names = _FIELD_CACHE.get(cls)
    if names is None:
        names = tuple(f.name for f in dataclasses.fields(cls) if f.name != "span")
        _FIELD_CACHE[cls] = names
    return names


def iter_children(node: Node) -> PyIterator[Node]:
    for name in _field_names(type(node)):
        val = getattr(node, name)
        if isinstance(val, Node):
            yield val
        elif isinstance(val, tuple):
            for item in val:
                if isinstance(item, Node):
                    yield item


def walk(node: Node) -> PyIterator[Node]:
    """Pre-order traversal."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(iter_children(n))))


def map_children(node: Node, fn: Callable[[Node], Node]) -> Node:
    """Rebuild `node` with `fn` applied to every direct child; identity if nothing changed."""
    changes = {}
    for name in _field_names(type(node)):
        val = getattr(node, name)
        if isinstance(val, Node):
            new = fn(val)
            if new is not val:
                changes[name] = new
        elif isinstance(val, tuple) and any(isinstance(i, Node) for i in val):
            new_items = tuple(fn(i) if isinstance(i, Node) else i for i in val)
            if any(a is not b for a, b in zip(new_items, val)):
                changes[name] = new_items
    if not changes:
        return node
    return dataclasses.replace(node, **changes)


def transform(node: Node, fn: Callable[[Node], Node]) -> Node:
    """Bottom-up rewrite: children first, then `fn` on the rebuilt node."""
    return fn(map_children(node, lambda c: transform(c, fn)))


def contains(node: Node, pred: Callable[[Node], bool]) -> bool:
    return any(pred(n) for n in walk(node))


# ---------------------------------------------------------------------------#
# Variables and binders

def pattern_vars(p: Pattern) -> list[str]:
    if isinstance(p, PVar):
        return [p.name]
    if isinstance(p, PTuple):
        out: list[str] = []
        for item in p.items:
            out.extend(pattern_vars(item))
        return out
    return []


def iterators_bind(iterators: Iterable[Iterator]) -> Set[str]:
    names: Set[str] = set()
    for it in iterators:
        names.update(pattern_vars(it.pattern))
    return names


def substitute(node: Node, mapping: Mapping[str, Expr]) -> Node:
    """Replace free variables by expressions, respecting quantifier, comprehension and loop binders."""
    if not mapping:
        return node
    return _subst(node, dict(mapping))


def _subst(node: Node, m: Dict[str, Expr]) -> Node:
    if isinstance(node, Var):
        return m.get(node.name, node)
    if isinstance(node, (Quant, Comprehension)):
        new_its = []
        inner = m
        for it in node.iterators:
            new_its.append(Iterator(_subst_pattern(it.pattern, inner),
                                    _subst(it.domain, inner), span=it.span))
            bound = pattern_vars(it.pattern)
            if any(b in inner for b in bound):
                inner = {k: v for k, v in inner.items() if k not in bound}
        changes = {"iterators": tuple(new_its), "cond": _subst(node.cond, inner) if inner else node.cond}
        if isinstance(node, Comprehension) and node.elem is not None:
            changes["elem"] = _subst(node.elem, inner) if inner else node.elem
        return dataclasses.replace(node, **changes)
    if isinstance(node, For):
        it = node.iterator
        new_it = Iterator(_subst_pattern(it.pattern, m), _subst(it.domain, m), span=it.span)
        bound = pattern_vars(it.pattern)
        inner = {k: v for k, v in m.items() if k not in bound}
        body = _subst(node.body, inner) if inner else node.body
        return dataclasses.replace(node, iterator=new_it, body=body)
    if isinstance(node, ForTuple):
        inner = {k: v for k, v in m.items() if k != node.var}
        body = _subst(node.body, inner) if inner else node.body
        return dataclasses.replace(node, body=body) if body is not node.body else node
    if isinstance(node, ReceiveDef):
        bound = set(iterators_bind(Iterator(rp.pattern, SELF) for rp in node.patterns))
        bound.update(rp.sender for rp in node.patterns if rp.sender)
        inner = {k: v for k, v in m.items() if k not in bound}
        return dataclasses.replace(node, body=_subst(node.body, inner)) if inner else node
    return map_children(node, lambda c: _subst(c, m))


def _subst_pattern(p: Pattern, m: Dict[str, Expr]) -> Pattern:
    # only `=x` elements read variables
    if isinstance(p, PEq):
        return PEq(_subst(p.expr, m), span=p.span)
    if isinstance(p, PTuple):
        return PTuple(tuple(_subst_pattern(i, m) for i in p.items), span=p.span)
    return p


def free_vars(node: Node, bound: frozenset = frozenset()) -> Set[str]:
    """Names of variables read but not bound inside `node`."""
    out: Set[str] = set()
    _free(node, set(bound), out)
    return out


def _free(node: Node, bound: Set[str], out: Set[str]) -> None:
    if isinstance(node, Var):
        if node.name not in bound:
            out.add(node.name)
        return
    if isinstance(node, (Quant, Comprehension)):
        inner = set(bound)
        for it in node.iterators:
            _free(it.domain, inner, out)
            _free_pattern(it.pattern, inner, out)
            inner.update(pattern_vars(it.pattern))
        _free(node.cond, inner, out)
        if isinstance(node, Comprehension) and node.elem is not None:
            _free(node.elem, inner, out)
        return
    if isinstance(node, For):
        _free(node.iterator.domain, bound, out)
        _free_pattern(node.iterator.pattern, bound, out)
        _free(node.body, bound | set(pattern_vars(node.iterator.pattern)), out)
        return
    if isinstance(node, ForTuple):
        _free(node.body, bound | {node.var}, out)
        return
    for c in iter_children(node):
        _free(c, bound, out)


def _free_pattern(p: Pattern, bound: Set[str], out: Set[str]) -> None:
    if isinstance(p, PEq):
        _free(p.expr, bound, out)
    elif isinstance(p, PTuple):
        for i in p.items:
            _free_pattern(i, bound, out)


def self_fields_read(node: Node) -> Set[str]:
    """Fields of `self` mentioned anywhere in `node`."""
    return {n.name for n in walk(node) if isinstance(n, Field) and n.obj == SELF}


def flatten_seqs(node: Node) -> Node:
    """Splice nested sequences into their parent and drop `skip` members."""
    def flat(n: Node) -> Node:
        if isinstance(n, Seq):
            items = [s for s in n.stmts if not isinstance(s, Skip)]
            if len(items) == len(n.stmts) and not any(isinstance(s, Seq) for s in items):
                return n
            return seq(*items)
        return n
    return transform(node, flat)


def pattern_expr(p: Pattern) -> Expr:
    """The expression a pattern matches exactly (variables read as themselves)."""
    if isinstance(p, PVar):
        return Var(p.name, span=p.span)
    if isinstance(p, PLit):
        return Lit(p.value, p.tag, span=p.span)
    if isinstance(p, PEq):
        return p.expr
    if isinstance(p, PTuple):
        return TupleExpr(tuple(pattern_expr(i) for i in p.items), span=p.span)
    raise TypeError(f"pattern {p!r} has no expression form")


def to_json_tree(node) -> object:
    """A JSON-ready rendering of a syntax tree: one object per node, named by its class."""
    if isinstance(node, Node):
        out = {"node": type(node).__name__}
        if node.span is not None:
            out["line"] = node.span.line
        for name in _field_names(type(node)):
            out[name] = to_json_tree(getattr(node, name))
        return out
    if isinstance(node, (tuple, list, frozenset)):
        return [to_json_tree(x) for x in node]
    if node is None or isinstance(node, (bool, int, float, str)):
        return node
    return str(node)
