"""API usage graphs: construction from parsed methods, containment checks, serialization."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .errors import SizeLimitExceeded
from .javalite import ast as A

UNKNOWN = "UNKNOWN"
INIT = "<init>"
RETURN = "<return>"
EXACT_ORACLE_NODE_LIMIT = 12


class NodeKind(str, Enum):
    ACTION = "Action"
    DATA = "Data"


class EdgeKind(str, Enum):
    ORDER = "Order"
    DEF = "Def"
    RECV = "Recv"
    PARA = "Para"


@dataclass(frozen=True)
class AugNode:
    id: int
    kind: NodeKind
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("node label must be non-empty")


@dataclass(frozen=True)
class AugEdge:
    src: int
    dst: int
    kind: EdgeKind


@dataclass(frozen=True, order=True)
class MethodRef:
    """Provenance of a method: document identity, method name, occurrence index."""

    doc: str
    method: str
    method_id: int = 0

    def __str__(self):
        return f"{self.doc}#{self.method}#{self.method_id}"

    @classmethod
    def parse(cls, text: str) -> "MethodRef":
        doc, method, mid = text.rsplit("#", 2)
        return cls(doc, method, int(mid))


@dataclass(frozen=True)
class Aug:
    method_ref: Optional[MethodRef]
    nodes: tuple[AugNode, ...] = ()
    edges: tuple[AugEdge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        for i, n in enumerate(self.nodes):
            if n.id != i:
                raise ValueError("node ids must be dense and ordered 0..n-1")
        n = len(self.nodes)
        for e in self.edges:
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise ValueError(f"edge {e} references a missing node")
            if e.kind is EdgeKind.ORDER and e.src == e.dst:
                raise ValueError("order edges cannot be self loops")

    def __len__(self):
        return len(self.nodes)

    def label(self, node_id: int) -> str:
        return self.nodes[node_id].label

    def node_signature(self, node_id: int) -> tuple[str, str]:
        n = self.nodes[node_id]
        return (n.kind.value, n.label)

    def edge_signature(self, e: AugEdge) -> tuple[str, str, str]:
        return (self.nodes[e.src].label, e.kind.value, self.nodes[e.dst].label)

    def node_multiset(self) -> Counter:
        return Counter(self.node_signature(i) for i in range(len(self.nodes)))

    def edge_multiset(self) -> Counter:
        return Counter(self.edge_signature(e) for e in self.edges)

    def without_ref(self) -> "Aug":
        return Aug(None, self.nodes, self.edges)

    def subgraph(self, node_ids: Iterable[int], edge_indices: Iterable[int]) -> "Aug":
        """The subgraph on ``node_ids`` and ``edge_indices``, renumbered densely by old id."""
        old = sorted(node_ids)
        remap = {o: i for i, o in enumerate(old)}
        nodes = [AugNode(remap[o], self.nodes[o].kind, self.nodes[o].label) for o in old]
        edges = []
        for k in sorted(edge_indices):
            e = self.edges[k]
            edges.append(AugEdge(remap[e.src], remap[e.dst], e.kind))
        return Aug(None, nodes, edges)


# ------------------------------------------------------------------ building

def type_label(t: Optional[A.TypeRef]) -> str:
    if t is None or t.name == "var":
        return UNKNOWN
    return t.simple_name + "[]" * t.dims


class _CallResult:
    """A call whose result has not been consumed yet; data node created on demand."""

    __slots__ = ("action", "node")

    def __init__(self, action: int):
        self.action = action
        self.node: Optional[int] = None


class _Builder:
    def __init__(self, field_types: dict[str, str]):
        self.nodes: list[AugNode] = []
        self.edges: list[AugEdge] = []
        self.last_action: Optional[int] = None
        self.fields = dict(field_types)
        self.types: dict[str, str] = {}
        self.bound: dict[str, int] = {}
        self.paths: dict[str, int] = {}

    # graph primitives
    def add_node(self, kind, label) -> int:
        nid = len(self.nodes)
        self.nodes.append(AugNode(nid, kind, label))
        return nid

    def add_edge(self, src, dst, kind):
        self.edges.append(AugEdge(src, dst, kind))

    def action(self, label) -> int:
        nid = self.add_node(NodeKind.ACTION, label)
        if self.last_action is not None:
            self.add_edge(self.last_action, nid, EdgeKind.ORDER)
        self.last_action = nid
        return nid

    def data(self, label) -> int:
        return self.add_node(NodeKind.DATA, label)

    def materialize(self, value, label=UNKNOWN) -> Optional[int]:
        if isinstance(value, _CallResult):
            if value.node is None:
                value.node = self.data(label)
                self.add_edge(value.action, value.node, EdgeKind.DEF)
            return value.node
        return value

    # variables
    def declare(self, name, label):
        self.types[name] = label
        self.bound.pop(name, None)

    def is_variable(self, name) -> bool:
        return name in self.types or name in self.fields

    def variable(self, name) -> int:
        if name not in self.bound:
            label = self.types.get(name, self.fields.get(name, UNKNOWN))
            self.bound[name] = self.data(label)
        return self.bound[name]

    def bind(self, name, value):
        label = self.types.get(name, self.fields.get(name, UNKNOWN))
        node = self.materialize(value, label)
        if node is not None:
            self.bound[name] = node
        return node

    # expressions
    def receiver(self, target) -> Optional[int]:
        """Data node a call is invoked on; ``None`` for static, ``this`` and ``super`` calls."""
        if target is None or isinstance(target, A.This):
            return None
        if isinstance(target, A.Name):
            if target.name == "super":
                return None
            if not self.is_variable(target.name) and target.name[:1].isupper():
                return None  # static call on a type name
        if isinstance(target, A.FieldAccess) and _is_type_path(target) and not self.is_variable(_root(target)):
            return self.path_node(_dotted(target))
        value = self.expr(target)
        node = self.materialize(value, UNKNOWN)
        if node is None:
            label = "String" if isinstance(target, A.Literal) and target.kind == "string" else UNKNOWN
            node = self.data(label)
        return node

    def path_node(self, path) -> int:
        if path not in self.paths:
            self.paths[path] = self.data(UNKNOWN)
        return self.paths[path]

    def call(self, label, recv, arg_nodes) -> int:
        act = self.action(label)
        if recv is not None:
            self.add_edge(recv, act, EdgeKind.RECV)
        for a in arg_nodes:
            if a is not None:
                self.add_edge(a, act, EdgeKind.PARA)
        return act

    def arguments(self, args) -> list[Optional[int]]:
        return [self.materialize(self.expr(a), UNKNOWN) for a in args]

    def expr(self, e):
        if e is None:
            return None
        if isinstance(e, A.Name):
            if e.name == "super":
                return None
            if self.is_variable(e.name) or not e.name[:1].isupper():
                return self.variable(e.name)
            return None
        if isinstance(e, (A.Literal, A.This, A.ClassLit)):
            return None
        if isinstance(e, A.FieldAccess):
            if isinstance(e.target, A.This) and e.target.qualifier is None:
                return self.variable(e.name)
            if _is_type_path(e):
                return self.path_node(_dotted(e))
            self.materialize(self.expr(e.target))
            return self.data(UNKNOWN)
        if isinstance(e, A.MethodCall):
            if e.target is None and e.name in ("this", "super"):
                args = self.arguments(e.args)
                return None
            recv = self.receiver(e.target)
            args = self.arguments(e.args)
            return _CallResult(self.call(e.name, recv, args))
        if isinstance(e, A.New):
            if e.outer is not None:
                self.materialize(self.expr(e.outer))
            args = self.arguments(e.args)
            act = self.call(INIT, None, args)
            node = self.data(type_label(e.type))
            self.add_edge(act, node, EdgeKind.DEF)
            if e.body is not None:
                for m in e.body:
                    self.inline_member(m)
            return node
        if isinstance(e, A.NewArray):
            for s in e.sizes:
                self.materialize(self.expr(s))
            if e.init is not None:
                self.expr(e.init)
            return None
        if isinstance(e, A.ArrayInit):
            for x in e.elements:
                self.materialize(self.expr(x))
            return None
        if isinstance(e, A.ArrayAccess):
            self.materialize(self.expr(e.target))
            self.materialize(self.expr(e.index))
            return None
        if isinstance(e, A.Assign):
            value = self.expr(e.value)
            target = e.target
            if isinstance(target, A.FieldAccess) and isinstance(target.target, A.This):
                target = A.Name(target.name)
            if isinstance(target, A.Name) and e.op == "=":
                return self.bind(target.name, value)
            self.materialize(value)
            if not isinstance(target, A.Name):
                self.materialize(self.expr(target))
            return None
        if isinstance(e, A.Binary):
            self.materialize(self.expr(e.left))
            self.materialize(self.expr(e.right))
            return None
        if isinstance(e, A.Unary):
            self.materialize(self.expr(e.operand))
            return None
        if isinstance(e, A.Conditional):
            self.materialize(self.expr(e.cond))
            self.materialize(self.expr(e.then))
            self.materialize(self.expr(e.other))
            return None
        if isinstance(e, A.Cast):
            value = self.expr(e.expr)
            return self.materialize(value, type_label(e.type))
        if isinstance(e, A.InstanceOf):
            self.materialize(self.expr(e.expr))
            if e.binding:
                self.declare(e.binding, type_label(e.type))
            return None
        if isinstance(e, A.Lambda):
            for p in e.params:
                self.declare(p.name, type_label(p.type))
            if isinstance(e.body, A.Block):
                self.stmt(e.body)
            else:
                self.materialize(self.expr(e.body))
            return None
        if isinstance(e, A.MethodRef):
            if not isinstance(e.target, A.TypeRef):
                self.receiver(e.target) if isinstance(e.target, A.Name) else self.materialize(self.expr(e.target))
            return None
        return None

    def inline_member(self, m):
        # anonymous class bodies are attributed to the enclosing method
        if isinstance(m, A.MethodDecl) and m.body is not None:
            for p in m.params:
                self.declare(p.name, type_label(p.type))
            self.stmt(m.body)
        elif isinstance(m, A.FieldDecl):
            for d in m.declarators:
                self.declare(d.name, type_label(m.type))
                if d.init is not None:
                    self.bind(d.name, self.expr(d.init))
        elif isinstance(m, A.Initializer):
            self.stmt(m.body)

    # statements
    def local(self, s: A.LocalVar):
        label = type_label(s.type)
        for d in s.declarators:
            value = self.expr(d.init) if d.init is not None else None
            self.declare(d.name, label + "[]" * d.dims)
            if value is not None:
                self.bind(d.name, value)

    def stmt(self, s):
        if s is None:
            return
        if isinstance(s, A.Block):
            for x in s.stmts:
                self.stmt(x)
        elif isinstance(s, A.LocalVar):
            self.local(s)
        elif isinstance(s, A.ExprStmt):
            self.expr(s.expr)
        elif isinstance(s, A.Return):
            value = self.materialize(self.expr(s.expr), UNKNOWN) if s.expr is not None else None
            self.call(RETURN, None, [value])
        elif isinstance(s, A.Throw):
            self.materialize(self.expr(s.expr))
        elif isinstance(s, A.If):
            self.materialize(self.expr(s.cond))
            self.stmt(s.then)
            self.stmt(s.other)
        elif isinstance(s, A.While):
            self.materialize(self.expr(s.cond))
            self.stmt(s.body)
        elif isinstance(s, A.DoWhile):
            self.stmt(s.body)
            self.materialize(self.expr(s.cond))
        elif isinstance(s, A.For):
            for x in s.init:
                self.stmt(x)
            self.materialize(self.expr(s.cond))
            self.stmt(s.body)
            for u in s.update:
                self.materialize(self.expr(u))
        elif isinstance(s, A.ForEach):
            self.materialize(self.expr(s.iterable))
            self.declare(s.var.name, type_label(s.var.type))
            self.stmt(s.body)
        elif isinstance(s, A.Try):
            for r in s.resources:
                self.stmt(r)
            self.stmt(s.body)
            for c in s.catches:
                self.declare(c.name, type_label(c.types[0]))
                self.stmt(c.body)
            self.stmt(s.final)
        elif isinstance(s, A.Switch):
            self.materialize(self.expr(s.selector))
            for c in s.cases:
                for x in c.body:
                    self.stmt(x)
        elif isinstance(s, A.Sync):
            self.materialize(self.expr(s.lock))
            self.stmt(s.body)
        elif isinstance(s, A.Labeled):
            self.stmt(s.stmt)
        elif isinstance(s, A.Assert):
            self.materialize(self.expr(s.cond))
            self.materialize(self.expr(s.message))
        elif isinstance(s, A.Opaque):
            self.opaque(s)

    def opaque(self, s: A.Opaque):
        for c in s.calls:
            if isinstance(c, A.New):
                act = self.call(INIT, None, [])
                self.add_edge(act, self.data(type_label(c.type)), EdgeKind.DEF)
            else:
                target = c.target
                if isinstance(target, A.Name) and target.name == "?":
                    recv = self.data(UNKNOWN)
                else:
                    recv = self.receiver(target)
                self.call(c.name, recv, [])

    def build(self, ref) -> Aug:
        return Aug(ref, self.nodes, self.edges)


def _is_type_path(e) -> bool:
    """``a.b.c`` built only from names (no calls, no ``this``)."""
    while isinstance(e, A.FieldAccess):
        e = e.target
    return isinstance(e, A.Name)


def _root(e) -> str:
    while isinstance(e, A.FieldAccess):
        e = e.target
    return e.name


def _dotted(e) -> str:
    if isinstance(e, A.FieldAccess):
        return _dotted(e.target) + "." + e.name
    return e.name


def _field_types(method: A.MethodDecl, unit: Optional[A.CompilationUnit]) -> dict[str, str]:
    if unit is None:
        return {}
    for t in unit.iter_types():
        if any(m is method for m in t.methods):
            return {d.name: type_label(f.type) + "[]" * d.dims for f in t.fields for d in f.declarators}
    return {}


def build_aug(method: A.MethodDecl, unit: Optional[A.CompilationUnit] = None,
              method_ref: Optional[MethodRef] = None) -> Aug:
    """API usage graph of ``method``.

    Actions are calls (``<init>`` for constructors) and returns; data nodes are
    variables, constructed objects and consumed call results, labelled with the
    declared type or ``UNKNOWN``. Def, Recv and Para edges follow data flow;
    Order edges chain consecutive actions in evaluation order.
    """
    b = _Builder(_field_types(method, unit))
    for p in method.params:
        b.declare(p.name, type_label(p.type) + ("[]" if p.varargs else ""))
    if method.body is not None:
        b.stmt(method.body)
    if method_ref is None:
        method_ref = MethodRef(unit.path if unit is not None else "", method.name, 0)
    return b.build(method_ref)


# --------------------------------------------------------------- containment

def contains_relaxed(pattern: Aug, candidate: Aug) -> bool:
    """Multiset containment of node signatures and edge signatures.

    Over-approximates subgraph isomorphism: structure beyond endpoint labels is
    ignored.
    """
    pn, cn = pattern.node_multiset(), candidate.node_multiset()
    if any(cn[k] < v for k, v in pn.items()):
        return False
    pe, ce = pattern.edge_multiset(), candidate.edge_multiset()
    return all(ce[k] >= v for k, v in pe.items())


def exact_subgraph_oracle(pattern: Aug, candidate: Aug, node_limit: int = EXACT_ORACLE_NODE_LIMIT) -> bool:
    """Backtracking search for an injective, label- and kind-preserving embedding.

    Every pattern edge must map onto a distinct candidate edge of the same kind
    between the mapped endpoints (parallel edges are counted).
    """
    if len(pattern.nodes) > node_limit:
        raise SizeLimitExceeded(f"pattern has {len(pattern.nodes)} nodes; limit is {node_limit}")
    if not contains_relaxed(pattern, candidate):
        return False
    cand_edges = Counter((e.src, e.dst, e.kind) for e in candidate.edges)
    pat_edges = Counter((e.src, e.dst, e.kind) for e in pattern.edges)
    by_sig: dict[tuple, list[int]] = {}
    for n in candidate.nodes:
        by_sig.setdefault((n.kind, n.label), []).append(n.id)
    # most constrained pattern nodes first
    order = sorted(range(len(pattern.nodes)), key=lambda i: len(by_sig.get(
        (pattern.nodes[i].kind, pattern.nodes[i].label), [])))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(pn: int) -> bool:
        for (s, d, k), mult in pat_edges.items():
            if (s == pn or d == pn) and s in mapping and d in mapping:
                if cand_edges[(mapping[s], mapping[d], k)] < mult:
                    return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        pn = order[i]
        node = pattern.nodes[pn]
        for cn in by_sig.get((node.kind, node.label), []):
            if cn in used:
                continue
            mapping[pn] = cn
            used.add(cn)
            if consistent(pn) and search(i + 1):
                return True
            del mapping[pn]
            used.discard(cn)
        return False

    return search(0)


# ------------------------------------------------------------- serialization

_ESCAPE = re.compile(r"[%\s]")


def _esc(s: str) -> str:
    return _ESCAPE.sub(lambda m: "%%%x;" % ord(m.group(0)), s) if s else "%"


def _unesc(s: str) -> str:
    if s == "%":
        return ""
    return re.sub(r"%([0-9a-f]+);", lambda m: chr(int(m.group(1), 16)), s)


def dumps(aug: Aug) -> str:
    """Line-oriented text form; :func:`loads` inverts it exactly."""
    ref = aug.method_ref
    head = ["AUG"]
    if ref is None:
        head += ["%", "%", "-1"]
    else:
        head += [_esc(ref.doc), _esc(ref.method), str(ref.method_id)]
    lines = [" ".join(head)]
    for n in aug.nodes:
        lines.append(f"N {n.id} {n.kind.value} {_esc(n.label)}")
    for e in aug.edges:
        lines.append(f"E {e.src} {e.dst} {e.kind.value}")
    return "\n".join(lines) + "\n"


def _parse_header(parts) -> Optional[MethodRef]:
    if len(parts) != 4 or parts[0] != "AUG":
        raise ValueError(f"malformed AUG header: {' '.join(parts)!r}")
    if parts[3] == "-1":
        return None
    return MethodRef(_unesc(parts[1]), _unesc(parts[2]), int(parts[3]))


def loads_all(text: str) -> list[tuple[Aug, list[str]]]:
    """Parse every AUG block in ``text``; trailer lines (e.g. ``SUPPORT``) are returned per block."""
    blocks: list[tuple[Optional[MethodRef], list, list, list]] = []
    for raw in text.split("\n"):
        if not raw.strip():
            continue
        parts = raw.split(" ")
        tag = parts[0]
        if tag == "AUG":
            blocks.append((_parse_header(parts), [], [], []))
            continue
        if not blocks:
            raise ValueError("content before the first AUG header")
        _, nodes, edges, extra = blocks[-1]
        if tag == "N":
            nodes.append(AugNode(int(parts[1]), NodeKind(parts[2]), _unesc(parts[3])))
        elif tag == "E":
            edges.append(AugEdge(int(parts[1]), int(parts[2]), EdgeKind(parts[3])))
        else:
            extra.append(raw)
    return [(Aug(ref, nodes, edges), extra) for ref, nodes, edges, extra in blocks]


def loads(text: str) -> Aug:
    blocks = loads_all(text)
    if len(blocks) != 1:
        raise ValueError(f"expected one AUG, found {len(blocks)}")
    return blocks[0][0]


def to_dot(aug: Aug, name: str = "aug") -> str:
    lines = [f"digraph {name} {{"]
    for n in aug.nodes:
        shape = "box" if n.kind is NodeKind.ACTION else "ellipse"
        label = n.label.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  n{n.id} [shape={shape}, label="{label}"];')
    styles = {EdgeKind.ORDER: "dashed", EdgeKind.DEF: "solid", EdgeKind.RECV: "solid", EdgeKind.PARA: "dotted"}
    for e in aug.edges:
        lines.append(f'  n{e.src} -> n{e.dst} [label="{e.kind.value.lower()}", style={styles[e.kind]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
