"""Pretty printer producing parseable Java for subset trees.

Compound sub-expressions are always parenthesised, so the output reparses to a
structurally equal tree even though parentheses are not kept in the tree.
"""

from __future__ import annotations

from . import ast as A

_COMPOUND = (A.Binary, A.Assign, A.Conditional, A.Cast, A.InstanceOf, A.Lambda, A.Unary)


def pretty(node, indent: int = 0) -> str:
    """Render a compilation unit, type, member, statement or expression."""
    p = _Printer()
    if isinstance(node, A.CompilationUnit):
        p.unit(node)
    elif isinstance(node, A.TypeDecl):
        p.type_decl(node, indent)
    elif isinstance(node, (A.MethodDecl, A.FieldDecl, A.Initializer)):
        p.member(node, indent)
    elif isinstance(node, (A.Block,)) or type(node).__name__ in _STMT_NAMES:
        p.stmt(node, indent)
    else:
        return expr(node)
    return "".join(p.out)


_STMT_NAMES = {
    "LocalVar", "ExprStmt", "If", "While", "DoWhile", "For", "ForEach", "Try",
    "Throw", "Return", "Jump", "Empty", "Labeled", "Sync", "Switch", "Assert",
    "LocalClass", "Opaque",
}


def type_str(t: A.TypeRef) -> str:
    return str(t)


def wrap(e) -> str:
    s = expr(e)
    return f"({s})" if isinstance(e, _COMPOUND) else s


def args_str(args) -> str:
    return "(" + ", ".join(expr(a) for a in args) + ")"


def param_str(p: A.Param) -> str:
    mods = "".join(m + " " for m in p.modifiers)
    if p.type is None:
        return mods + p.name
    return f"{mods}{type_str(p.type)}{'...' if p.varargs else ''} {p.name}"


def expr(e) -> str:
    if isinstance(e, A.Name):
        return e.name
    if isinstance(e, A.Literal):
        return e.text
    if isinstance(e, A.This):
        return f"{e.qualifier}.this" if e.qualifier else "this"
    if isinstance(e, A.FieldAccess):
        return f"{wrap(e.target)}.{e.name}"
    if isinstance(e, A.MethodCall):
        prefix = "" if e.target is None else wrap(e.target) + "."
        return prefix + e.name + args_str(e.args)
    if isinstance(e, A.New):
        prefix = "" if e.outer is None else wrap(e.outer) + "."
        s = f"{prefix}new {type_str(e.type)}{args_str(e.args)}"
        if e.body is not None:
            p = _Printer()
            p.out.append(" {\n")
            for m in e.body:
                p.member(m, 1)
            p.out.append("}")
            s += "".join(p.out)
        return s
    if isinstance(e, A.NewArray):
        base = A.TypeRef(e.type.name, e.type.args)
        dims = "".join(f"[{expr(s)}]" for s in e.sizes) + "[]" * (e.type.dims - len(e.sizes))
        s = f"new {type_str(base)}{dims}"
        if e.init is not None:
            s += " " + expr(e.init)
        return s
    if isinstance(e, A.ArrayInit):
        return "{" + ", ".join(expr(x) for x in e.elements) + "}"
    if isinstance(e, A.ArrayAccess):
        return f"{wrap(e.target)}[{expr(e.index)}]"
    if isinstance(e, A.Assign):
        return f"{wrap(e.target)} {e.op} {wrap(e.value)}"
    if isinstance(e, A.Binary):
        return f"{wrap(e.left)} {e.op} {wrap(e.right)}"
    if isinstance(e, A.Unary):
        return f"{wrap(e.operand)}{e.op}" if e.postfix else f"{e.op}{wrap(e.operand)}"
    if isinstance(e, A.Conditional):
        return f"{wrap(e.cond)} ? {wrap(e.then)} : {wrap(e.other)}"
    if isinstance(e, A.Cast):
        return f"({type_str(e.type)}) {wrap(e.expr)}"
    if isinstance(e, A.InstanceOf):
        s = f"{wrap(e.expr)} instanceof {type_str(e.type)}"
        return s + (f" {e.binding}" if e.binding else "")
    if isinstance(e, A.Lambda):
        params = "(" + ", ".join(param_str(p) for p in e.params) + ")"
        if isinstance(e.body, A.Block):
            return params + " -> " + pretty(e.body, 0).rstrip("\n")
        return params + " -> " + wrap(e.body)
    if isinstance(e, A.MethodRef):
        target = type_str(e.target) if isinstance(e.target, A.TypeRef) else wrap(e.target)
        return f"{target}::{e.name}"
    if isinstance(e, A.ClassLit):
        return f"{type_str(e.type)}.class"
    raise TypeError(f"cannot print {type(e).__name__}")


class _Printer:
    def __init__(self):
        self.out: list[str] = []

    def line(self, indent, text):
        self.out.append("    " * indent + text + "\n")

    def unit(self, u: A.CompilationUnit):
        if u.package_name:
            self.line(0, f"package {u.package_name};")
        for imp in u.imports:
            static = "static " if imp.is_static else ""
            star = ".*" if imp.is_wildcard else ""
            self.line(0, f"import {static}{imp.qualified_name}{star};")
        for t in u.types:
            self.type_decl(t, 0)

    def header(self, annotations, modifiers):
        return "".join(f"@{a} " for a in annotations) + "".join(m + " " for m in modifiers)

    def type_decl(self, t: A.TypeDecl, indent):
        head = self.header(t.annotations, t.modifiers) + f"{t.kind} {t.name}"
        if t.kind == "record":
            head += "()"
        if t.extends:
            head += " extends " + ", ".join(map(type_str, t.extends))
        if t.implements:
            head += " implements " + ", ".join(map(type_str, t.implements))
        self.line(indent, head + " {")
        if t.kind == "enum":
            self.line(indent + 1, ";")
        for m in t.members:
            self.member(m, indent + 1)
        self.line(indent, "}")

    def member(self, m, indent):
        if isinstance(m, A.TypeDecl):
            self.type_decl(m, indent)
        elif isinstance(m, A.FieldDecl):
            self.line(indent, self.header(m.annotations, m.modifiers) + type_str(m.type) + " " + decls(m.declarators) + ";")
        elif isinstance(m, A.Initializer):
            self.out.append("    " * indent + ("static " if m.static else ""))
            self.block_inline(m.body, indent)
        else:
            head = self.header(m.annotations, m.modifiers)
            if m.return_type is not None:
                head += type_str(m.return_type) + " "
            head += m.name + "(" + ", ".join(param_str(p) for p in m.params) + ")"
            if m.thrown_types:
                head += " throws " + ", ".join(map(type_str, m.thrown_types))
            if m.body is None:
                self.line(indent, head + ";")
            else:
                self.out.append("    " * indent + head + " ")
                self.block_inline(m.body, indent)

    def block_inline(self, b: A.Block, indent):
        self.out.append("{\n")
        for s in b.stmts:
            self.stmt(s, indent + 1)
        self.line(indent, "}")

    def stmt(self, s, indent):
        pad = "    " * indent
        if isinstance(s, A.Block):
            self.out.append(pad)
            self.block_inline(s, indent)
        elif isinstance(s, A.LocalVar):
            mods = "".join(m + " " for m in s.modifiers)
            self.line(indent, f"{mods}{type_str(s.type)} {decls(s.declarators)};")
        elif isinstance(s, A.ExprStmt):
            self.line(indent, expr(s.expr) + ";")
        elif isinstance(s, A.If):
            self.line(indent, f"if ({expr(s.cond)})")
            self.stmt(s.then, indent + 1)
            if s.other is not None:
                self.line(indent, "else")
                self.stmt(s.other, indent + 1)
        elif isinstance(s, A.While):
            self.line(indent, f"while ({expr(s.cond)})")
            self.stmt(s.body, indent + 1)
        elif isinstance(s, A.DoWhile):
            self.line(indent, "do")
            self.stmt(s.body, indent + 1)
            self.line(indent, f"while ({expr(s.cond)});")
        elif isinstance(s, A.For):
            init = ", ".join(_inline_stmt(x) for x in s.init)
            if len(s.init) == 1 and isinstance(s.init[0], A.LocalVar):
                init = _inline_stmt(s.init[0])
            cond = "" if s.cond is None else expr(s.cond)
            update = ", ".join(expr(u) for u in s.update)
            self.line(indent, f"for ({init}; {cond}; {update})")
            self.stmt(s.body, indent + 1)
        elif isinstance(s, A.ForEach):
            self.line(indent, f"for ({param_str(s.var)} : {expr(s.iterable)})")
            self.stmt(s.body, indent + 1)
        elif isinstance(s, A.Try):
            head = "try"
            if s.resources:
                head += " (" + "; ".join(_inline_stmt(r) for r in s.resources) + ")"
            self.out.append(pad + head + " ")
            self.block_inline(s.body, indent)
            for c in s.catches:
                self.out.append(pad + "catch (" + " | ".join(map(type_str, c.types)) + f" {c.name}) ")
                self.block_inline(c.body, indent)
            if s.final is not None:
                self.out.append(pad + "finally ")
                self.block_inline(s.final, indent)
        elif isinstance(s, A.Throw):
            self.line(indent, f"throw {expr(s.expr)};")
        elif isinstance(s, A.Return):
            self.line(indent, "return;" if s.expr is None else f"return {expr(s.expr)};")
        elif isinstance(s, A.Jump):
            self.line(indent, s.kind + (f" {s.label}" if s.label else "") + ";")
        elif isinstance(s, A.Empty):
            self.line(indent, ";")
        elif isinstance(s, A.Labeled):
            self.line(indent, f"{s.label}:")
            self.stmt(s.stmt, indent)
        elif isinstance(s, A.Sync):
            self.out.append(pad + f"synchronized ({expr(s.lock)}) ")
            self.block_inline(s.body, indent)
        elif isinstance(s, A.Switch):
            self.line(indent, f"switch ({expr(s.selector)}) {{")
            for c in s.cases:
                label = "default:" if not c.labels else "case " + ", ".join(expr(x) for x in c.labels) + ":"
                self.line(indent + 1, label)
                for b in c.body:
                    self.stmt(b, indent + 2)
            self.line(indent, "}")
        elif isinstance(s, A.Assert):
            msg = "" if s.message is None else " : " + expr(s.message)
            self.line(indent, f"assert {expr(s.cond)}{msg};")
        elif isinstance(s, A.LocalClass):
            self.type_decl(s.decl, indent)
        elif isinstance(s, A.Opaque):
            self.line(indent, s.text)
        else:
            raise TypeError(f"cannot print {type(s).__name__}")


def decls(ds) -> str:
    parts = []
    for d in ds:
        s = d.name + "[]" * d.dims
        if d.init is not None:
            s += " = " + expr(d.init)
        parts.append(s)
    return ", ".join(parts)


def _inline_stmt(s) -> str:
    if isinstance(s, A.LocalVar):
        mods = "".join(m + " " for m in s.modifiers)
        return f"{mods}{type_str(s.type)} {decls(s.declarators)}"
    if isinstance(s, A.ExprStmt):
        return expr(s.expr)
    raise TypeError(f"cannot inline {type(s).__name__}")
