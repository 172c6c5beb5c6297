"""Generic traversal over the syntax tree."""

from __future__ import annotations

import dataclasses
from typing import Iterator

from . import ast as A


def children(node) -> Iterator:
    """Direct child nodes of ``node`` (dataclass fields holding nodes or tuples of nodes)."""
    for f in dataclasses.fields(node):
        value = getattr(node, f.name)
        if isinstance(value, tuple):
            for v in value:
                if dataclasses.is_dataclass(v):
                    yield v
        elif dataclasses.is_dataclass(value):
            yield value


def iter_nodes(node) -> Iterator:
    """Pre-order walk, including lambda bodies, anonymous classes and opaque call lists."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def calls(method: A.MethodDecl) -> list[A.CallExpr]:
    """Every call site in ``method``'s body, constructors included, in source order."""
    out = []
    if method.body is None:
        return out
    for n in iter_nodes(method.body):
        if isinstance(n, A.MethodCall):
            out.append(A.CallExpr(n.name, n.target, len(n.args), False, n.line))
        elif isinstance(n, A.New):
            out.append(A.CallExpr(n.type.simple_name, n.outer, len(n.args), True, n.line))
    return out


def identifier_names(node) -> set[str]:
    """Identifier-like names mentioned anywhere under ``node``."""
    names: set[str] = set()
    for n in iter_nodes(node):
        if isinstance(n, A.Name):
            names.add(n.name)
        elif isinstance(n, A.FieldAccess):
            names.add(n.name)
        elif isinstance(n, A.TypeRef):
            names.update(n.mentioned_names())
            names.update(n.name.split("."))
    return names
