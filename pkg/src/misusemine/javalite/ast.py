"""Immutable syntax tree for the Java subset.

Positions (``line``, ``span``, offsets) are excluded from equality so that a
tree reparsed from pretty-printed text compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class LineRange:
    file: str
    start: int
    end: int

    def __post_init__(self):
        if self.start < 1 or self.end < self.start:
            raise ValueError(f"invalid line range {self.start}..{self.end}")

    def overlaps(self, other: "LineRange") -> bool:
        return self.start <= other.end and other.start <= self.end

    def contains_line(self, line: int) -> bool:
        return self.start <= line <= self.end


@dataclass(frozen=True)
class TypeRef:
    """A type as written: ``name`` is the dotted raw name without type arguments."""

    name: str
    args: tuple["TypeRef", ...] = ()
    dims: int = 0

    @property
    def simple_name(self) -> str:
        return self.name.rsplit(".", 1)[-1]

    def mentioned_names(self):
        yield self.simple_name
        for a in self.args:
            yield from a.mentioned_names()

    def __str__(self):
        s = self.name
        if self.args:
            s += "<" + ", ".join(str(a) for a in self.args) + ">"
        return s + "[]" * self.dims


WILDCARD_TYPE = TypeRef("?")


# --------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Name:
    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Literal:
    kind: str  # number, string, char, literal
    text: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class This:
    qualifier: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FieldAccess:
    target: "Expr"
    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MethodCall:
    target: Optional["Expr"]
    name: str
    args: tuple["Expr", ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class New:
    type: TypeRef
    args: tuple["Expr", ...]
    body: Optional[tuple["Member", ...]] = None  # anonymous class body
    outer: Optional["Expr"] = None  # outer.new Inner()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class NewArray:
    type: TypeRef
    sizes: tuple["Expr", ...]
    init: Optional["ArrayInit"] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ArrayInit:
    elements: tuple["Expr", ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ArrayAccess:
    target: "Expr"
    index: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assign:
    target: "Expr"
    op: str
    value: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    postfix: bool = False
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Conditional:
    cond: "Expr"
    then: "Expr"
    other: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Cast:
    type: TypeRef
    expr: "Expr"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class InstanceOf:
    expr: "Expr"
    type: TypeRef
    binding: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Lambda:
    params: tuple["Param", ...]
    body: Union["Expr", "Block"]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MethodRef:
    target: Union["Expr", TypeRef]
    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ClassLit:
    type: TypeRef
    line: int = field(default=0, compare=False)


Expr = Union[
    Name, Literal, This, FieldAccess, MethodCall, New, NewArray, ArrayInit,
    ArrayAccess, Assign, Binary, Unary, Conditional, Cast, InstanceOf, Lambda,
    MethodRef, ClassLit,
]


# --------------------------------------------------------------------------
# statements


@dataclass(frozen=True)
class Param:
    type: Optional[TypeRef]  # None for untyped lambda parameters
    name: str
    varargs: bool = False
    modifiers: tuple[str, ...] = ()


@dataclass(frozen=True)
class Declarator:
    name: str
    dims: int = 0
    init: Optional[Expr] = None


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LocalVar:
    type: TypeRef
    declarators: tuple[Declarator, ...]
    modifiers: tuple[str, ...] = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    other: Optional["Stmt"] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DoWhile:
    body: "Stmt"
    cond: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class For:
    init: tuple["Stmt", ...]
    cond: Optional[Expr]
    update: tuple[Expr, ...]
    body: "Stmt"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ForEach:
    var: Param
    iterable: Expr
    body: "Stmt"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Catch:
    types: tuple[TypeRef, ...]
    name: str
    body: Block


@dataclass(frozen=True)
class Try:
    resources: tuple["Stmt", ...]
    body: Block
    catches: tuple[Catch, ...] = ()
    final: Optional[Block] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Throw:
    expr: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Return:
    expr: Optional[Expr] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Jump:
    kind: str  # break / continue
    label: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Empty:
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Labeled:
    label: str
    stmt: "Stmt"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Sync:
    lock: Expr
    body: Block
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SwitchCase:
    labels: tuple[Expr, ...]  # empty tuple means ``default``
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class Switch:
    selector: Expr
    cases: tuple[SwitchCase, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assert:
    cond: Expr
    message: Optional[Expr] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LocalClass:
    decl: "TypeDecl"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Opaque:
    """A construct outside the subset; ``calls`` keeps the calls found inside it."""

    text: str
    calls: tuple[MethodCall | New, ...] = ()
    line: int = field(default=0, compare=False)


Stmt = Union[
    Block, LocalVar, ExprStmt, If, While, DoWhile, For, ForEach, Try, Throw,
    Return, Jump, Empty, Labeled, Sync, Switch, Assert, LocalClass, Opaque,
]


# --------------------------------------------------------------------------
# declarations


@dataclass(frozen=True)
class ImportDecl:
    qualified_name: str
    is_wildcard: bool = False
    is_static: bool = False

    @property
    def simple_name(self) -> Optional[str]:
        if self.is_wildcard:
            return None
        return self.qualified_name.rsplit(".", 1)[-1]

    @property
    def segments(self) -> tuple[str, ...]:
        return tuple(self.qualified_name.split("."))


@dataclass(frozen=True)
class MethodDecl:
    name: str
    annotations: tuple[str, ...]
    modifiers: tuple[str, ...]
    params: tuple[Param, ...]
    return_type: Optional[TypeRef]  # None for constructors
    thrown_types: tuple[TypeRef, ...]
    body: Optional[Block]
    span: Optional[LineRange] = field(default=None, compare=False)
    tokens: tuple[str, ...] = field(default=(), compare=False, repr=False)
    start_offset: int = field(default=0, compare=False, repr=False)
    end_offset: int = field(default=0, compare=False, repr=False)

    @property
    def is_constructor(self) -> bool:
        return self.return_type is None

    @property
    def parameter_types(self) -> tuple[TypeRef, ...]:
        return tuple(p.type for p in self.params if p.type is not None)


@dataclass(frozen=True)
class FieldDecl:
    type: TypeRef
    declarators: tuple[Declarator, ...]
    modifiers: tuple[str, ...] = ()
    annotations: tuple[str, ...] = ()


@dataclass(frozen=True)
class Initializer:
    body: Block
    static: bool = False


@dataclass(frozen=True)
class TypeDecl:
    kind: str  # class, interface, enum, record, @interface
    name: str
    annotations: tuple[str, ...]
    modifiers: tuple[str, ...]
    extends: tuple[TypeRef, ...]
    implements: tuple[TypeRef, ...]
    members: tuple["Member", ...]
    span: Optional[LineRange] = field(default=None, compare=False)

    @property
    def methods(self) -> tuple[MethodDecl, ...]:
        return tuple(m for m in self.members if isinstance(m, MethodDecl))

    @property
    def fields(self) -> tuple[FieldDecl, ...]:
        return tuple(m for m in self.members if isinstance(m, FieldDecl))

    @property
    def nested_types(self) -> tuple["TypeDecl", ...]:
        return tuple(m for m in self.members if isinstance(m, TypeDecl))


Member = Union[MethodDecl, FieldDecl, Initializer, TypeDecl]


@dataclass(frozen=True)
class CompilationUnit:
    package_name: str
    imports: tuple[ImportDecl, ...]
    types: tuple[TypeDecl, ...]
    source: str = field(default="", compare=False, repr=False)
    path: str = field(default="", compare=False)

    def iter_types(self):
        """All type declarations, outer before nested, in source order."""
        stack = list(reversed(self.types))
        while stack:
            t = stack.pop()
            yield t
            stack.extend(reversed(t.nested_types))

    def iter_methods(self):
        """Yield ``(type_decl, method)`` for every named method in the unit."""
        for t in self.iter_types():
            for m in t.methods:
                yield t, m

    def method_source(self, method: MethodDecl) -> str:
        return self.source[method.start_offset:method.end_offset]


@dataclass(frozen=True)
class CallExpr:
    """A call site as seen by keyword extraction."""

    method_name: str
    receiver: Optional[Expr]
    argument_count: int
    is_constructor: bool
    line: int = 0
