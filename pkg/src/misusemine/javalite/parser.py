"""Recursive-descent parser for the Java subset.

Declarations must parse or the whole file is rejected with
:class:`JavaSyntaxError`. Inside method bodies every statement that fails to
parse is re-read as an :class:`~.ast.Opaque` statement whose call sites are
recovered from the raw tokens, so downstream consumers never lose calls.
"""

from __future__ import annotations

from typing import Optional

from ..errors import JavaSyntaxError
from . import ast as A
from .lexer import PRIMITIVES, Token, tokenize

MODIFIER_WORDS = frozenset(
    {
        "public", "protected", "private", "static", "abstract", "final",
        "native", "synchronized", "transient", "volatile", "strictfp", "default",
    }
)
_CONTEXTUAL_MODIFIERS = frozenset({"sealed", "non-sealed"})
_ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="})
_BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7,
    "<<": 8, ">>": 8, ">>>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}
_CAST_FOLLOWERS = frozenset({"ident", "number", "string", "char", "literal"})
_TOKEN_KINDS_KEPT = frozenset({"ident", "keyword", "literal", "number", "char"})


def parse_compilation_unit(source_text: str, path: str = "") -> A.CompilationUnit:
    """Parse one ``.java`` file.

    Raises :class:`JavaSyntaxError` when the file cannot be split into
    package, import and type declarations.
    """
    parser = _Parser(source_text, path)
    return parser.unit()


def parse_method(source_text: str, path: str = "") -> A.MethodDecl:
    """Parse a standalone method (or constructor) declaration."""
    wrapped = "class __Wrapper__ {\n" + source_text + "\n}\n"
    unit = parse_compilation_unit(wrapped, path)
    methods = unit.types[0].methods
    members = unit.types[0].members
    if len(members) != 1 or len(methods) != 1:
        raise JavaSyntaxError("expected exactly one method declaration", 1, 1)
    return methods[0]


def method_tokens(method: A.MethodDecl) -> list[str]:
    """Identifier, keyword and non-string literal tokens of ``method`` in source order."""
    return list(method.tokens)


class _Parser:
    def __init__(self, source: str, path: str):
        self.source = source.replace("\r\n", "\n").replace("\r", "\n")
        self.path = path
        self.toks: list[Token] = tokenize(self.source)
        self.i = 0

    # ------------------------------------------------------------------ utils
    def peek(self, k: int = 0) -> Token:
        j = self.i + k
        if j >= len(self.toks):
            return self.toks[-1]
        return self.toks[j]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, *ops) -> bool:
        return self.peek().is_op(*ops)

    def at_kw(self, *words) -> bool:
        return self.peek().is_kw(*words)

    def accept(self, op) -> bool:
        if self.at(op):
            self.i += 1
            return True
        return False

    def expect(self, op) -> Token:
        t = self.peek()
        if not t.is_op(op):
            self.fail(f"expected {op!r}, found {t.text or 'end of file'!r}")
        return self.advance()

    def expect_kw(self, word) -> Token:
        t = self.peek()
        if not t.is_kw(word):
            self.fail(f"expected {word!r}, found {t.text!r}")
        return self.advance()

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "ident":
            self.fail(f"expected identifier, found {t.text or 'end of file'!r}")
        return self.advance().text

    def fail(self, message):
        t = self.peek()
        raise JavaSyntaxError(message, t.line, t.col)

    def adjacent(self, k: int) -> bool:
        """True when token ``k`` directly touches token ``k + 1``."""
        return self.peek(k).end == self.peek(k + 1).start

    def qualified_name(self) -> str:
        parts = [self.ident()]
        while self.at(".") and self.peek(1).kind == "ident":
            self.advance()
            parts.append(self.ident())
        return ".".join(parts)

    def skip_balanced(self, open_op, close_op):
        self.expect(open_op)
        depth = 1
        while depth:
            t = self.advance()
            if t.kind == "eof":
                self.fail(f"unbalanced {open_op!r}")
            if t.is_op(open_op):
                depth += 1
            elif t.is_op(close_op):
                depth -= 1

    def line_range(self, start_idx, end_idx) -> A.LineRange:
        first = self.toks[start_idx]
        last = self.toks[max(start_idx, end_idx - 1)]
        return A.LineRange(self.path, first.line, last.line)

    # ------------------------------------------------------------ compilation
    def unit(self) -> A.CompilationUnit:
        package = ""
        imports = []
        types = []
        save = self.i
        self.annotations()
        if self.at_kw("package"):
            self.advance()
            package = self.qualified_name()
            self.expect(";")
        else:
            self.i = save
        while self.at_kw("import") or self.at(";"):
            if self.accept(";"):
                continue
            self.advance()
            static = False
            if self.at_kw("static"):
                self.advance()
                static = True
            name = self.qualified_name()
            wildcard = False
            if self.accept("."):
                self.expect("*")
                wildcard = True
            self.expect(";")
            imports.append(A.ImportDecl(name, wildcard, static))
        while self.peek().kind != "eof":
            if self.accept(";"):
                continue
            start = self.i
            annos, mods = self.modifiers()
            if not self.at_type_start():
                self.fail("expected a type declaration")
            types.append(self.type_decl(annos, mods, start))
        return A.CompilationUnit(package, tuple(imports), tuple(types), self.source, self.path)

    def annotations(self) -> list[str]:
        names = []
        while self.at("@") and not self.peek(1).is_kw("interface"):
            self.advance()
            names.append(self.qualified_name().rsplit(".", 1)[-1])
            if self.at("("):
                self.skip_balanced("(", ")")
        return names

    def modifiers(self):
        annos, mods = [], []
        while True:
            t = self.peek()
            if t.is_op("@") and not self.peek(1).is_kw("interface"):
                annos.extend(self.annotations())
            elif t.kind == "keyword" and t.text in MODIFIER_WORDS:
                # ``default`` inside a switch is a label, never reaches here
                mods.append(self.advance().text)
            elif t.kind == "ident" and t.text == "sealed" and self.peek(1).kind in ("ident", "keyword"):
                mods.append(self.advance().text)
            elif (
                t.kind == "ident" and t.text == "non" and self.peek(1).is_op("-")
                and self.peek(2).text == "sealed"
            ):
                self.i += 3
                mods.append("non-sealed")
            else:
                return annos, mods

    def at_type_start(self) -> bool:
        t = self.peek()
        if t.is_kw("class", "interface", "enum"):
            return True
        if t.is_op("@") and self.peek(1).is_kw("interface"):
            return True
        return t.kind == "ident" and t.text == "record" and self.peek(1).kind == "ident"

    def type_decl(self, annos, mods, start) -> A.TypeDecl:
        t = self.peek()
        if t.is_op("@"):
            self.advance()
            self.advance()
            kind = "@interface"
        else:
            kind = self.advance().text
        name = self.ident()
        if self.at("<"):
            self.type_params()
        if kind == "record":
            self.skip_balanced("(", ")")
        extends, implements = [], []
        while True:
            if self.at_kw("extends"):
                self.advance()
                extends.extend(self.type_list())
            elif self.at_kw("implements"):
                self.advance()
                implements.extend(self.type_list())
            elif self.peek().kind == "ident" and self.peek().text == "permits":
                self.advance()
                self.type_list()
            else:
                break
        members = self.class_body(name, enum=(kind == "enum"))
        return A.TypeDecl(
            kind, name, tuple(annos), tuple(mods), tuple(extends), tuple(implements),
            tuple(members), self.line_range(start, self.i),
        )

    def type_list(self) -> list[A.TypeRef]:
        out = [self.type_ref()]
        while self.accept(","):
            out.append(self.type_ref())
        return out

    def type_params(self):
        self.expect("<")
        depth = 1
        while depth:
            t = self.advance()
            if t.kind == "eof":
                self.fail("unbalanced type parameters")
            if t.is_op("<"):
                depth += 1
            elif t.is_op(">"):
                depth -= 1

    def class_body(self, class_name, enum=False) -> list:
        self.expect("{")
        members = []
        if enum:
            self.enum_constants()
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.fail("unterminated class body")
            if self.accept(";"):
                continue
            members.append(self.member(class_name))
        self.expect("}")
        return members

    def enum_constants(self):
        while True:
            self.annotations()
            if self.peek().kind != "ident":
                break
            self.advance()
            if self.at("("):
                self.skip_balanced("(", ")")
            if self.at("{"):
                self.skip_balanced("{", "}")
            if not self.accept(","):
                break
        self.accept(";")

    def member(self, class_name):
        start = self.i
        annos, mods = self.modifiers()
        if self.at("{"):
            body = self.block()
            return A.Initializer(body, "static" in mods)
        if self.at_type_start():
            return self.type_decl(annos, mods, start)
        if self.at("<"):
            self.type_params()
            self.annotations()
        if self.peek().kind == "ident" and self.peek(1).is_op("("):
            name = self.ident()
            return self.method_rest(start, annos, mods, name, None)
        rtype = self.type_ref()
        name = self.ident()
        if self.at("("):
            return self.method_rest(start, annos, mods, name, rtype)
        declarators = self.declarators(name, field=True)
        self.expect(";")
        return A.FieldDecl(rtype, tuple(declarators), tuple(mods), tuple(annos))

    def method_rest(self, start, annos, mods, name, rtype) -> A.MethodDecl:
        params = self.formal_params()
        while self.at("[") and self.peek(1).is_op("]"):
            self.i += 2
            rtype = A.TypeRef(rtype.name, rtype.args, rtype.dims + 1)
        thrown = []
        if self.at_kw("throws"):
            self.advance()
            thrown = self.type_list()
        body = None
        if self.at("{"):
            body = self.block()
        else:
            if self.at_kw("default"):
                self.advance()
                self.skip_to_semicolon()
            self.expect(";")
        end = self.i
        toks = tuple(
            t.text for t in self.toks[start:end] if t.kind in _TOKEN_KINDS_KEPT
        )
        return A.MethodDecl(
            name, tuple(annos), tuple(mods), tuple(params), rtype, tuple(thrown), body,
            self.line_range(start, end), toks,
            self.toks[start].start, self.toks[end - 1].end,
        )

    def skip_to_semicolon(self):
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                self.fail("expected ';'")
            if depth == 0 and t.is_op(";"):
                return
            if t.is_op("(", "[", "{"):
                depth += 1
            elif t.is_op(")", "]", "}"):
                depth -= 1
            self.advance()

    def formal_params(self) -> list[A.Param]:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                annos, mods = self.modifiers()
                ptype = self.type_ref()
                varargs = self.accept("...")
                if self.at_kw("this"):
                    self.advance()  # receiver parameter
                else:
                    pname = self.ident()
                    dims = self.dims()
                    if dims:
                        ptype = A.TypeRef(ptype.name, ptype.args, ptype.dims + dims)
                    params.append(A.Param(ptype, pname, varargs, tuple(mods)))
                if not self.accept(","):
                    break
        self.expect(")")
        return params

    def dims(self) -> int:
        n = 0
        while self.at("[") and self.peek(1).is_op("]"):
            self.i += 2
            n += 1
        return n

    def declarators(self, first_name, field=False) -> list[A.Declarator]:
        out = []
        name = first_name
        while True:
            dims = self.dims()
            init = None
            if self.accept("="):
                if field:
                    start = self.i
                    try:
                        init = self.var_init()
                    except JavaSyntaxError:
                        self.i = start
                        self.skip_initializer()
                        init = None
                else:
                    init = self.var_init()
            out.append(A.Declarator(name, dims, init))
            if not self.accept(","):
                return out
            name = self.ident()

    def skip_initializer(self):
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                self.fail("unterminated initializer")
            if depth == 0 and t.is_op(";", ","):
                return
            if t.is_op("(", "[", "{"):
                depth += 1
            elif t.is_op(")", "]", "}"):
                depth -= 1
            self.advance()

    def var_init(self):
        if self.at("{"):
            return self.array_init()
        return self.expr()

    def array_init(self) -> A.ArrayInit:
        line = self.expect("{").line
        elems = []
        while not self.at("}"):
            elems.append(self.var_init())
            if not self.accept(","):
                break
        self.expect("}")
        return A.ArrayInit(tuple(elems), line)

    # ------------------------------------------------------------------ types
    def type_ref(self, allow_dims=True) -> A.TypeRef:
        self.annotations()
        t = self.peek()
        if t.kind == "keyword" and (t.text in PRIMITIVES or t.text == "void"):
            self.advance()
            ref = A.TypeRef(t.text)
        elif t.kind == "ident":
            parts = [self.advance().text]
            args: tuple = ()
            if self.at("<"):
                args = self.type_args()
            while self.at(".") and self.peek(1).kind in ("ident",) or (
                self.at(".") and self.peek(1).is_op("@")
            ):
                self.advance()
                self.annotations()
                parts.append(self.ident())
                if self.at("<"):
                    args = self.type_args()
            ref = A.TypeRef(".".join(parts), args)
        elif t.is_op("?"):
            self.advance()
            if self.at_kw("extends", "super"):
                self.advance()
                return self.type_ref()
            return A.WILDCARD_TYPE
        else:
            self.fail(f"expected a type, found {t.text!r}")
        if allow_dims:
            d = self.dims()
            if d:
                ref = A.TypeRef(ref.name, ref.args, d)
        return ref

    def type_args(self) -> tuple:
        self.expect("<")
        args = []
        if self.accept(">"):
            return ()
        while True:
            args.append(self.type_ref())
            while self.accept("&"):
                self.type_ref()
            if not self.accept(","):
                break
        self.expect(">")
        return tuple(args)

    def try_type_then_ident(self, followers) -> Optional[A.TypeRef]:
        """Speculatively read ``Type ident`` where the ident is followed by one of ``followers``."""
        save = self.i
        try:
            ref = self.type_ref()
        except JavaSyntaxError:
            self.i = save
            return None
        if self.peek().kind == "ident" and (
            self.peek(1).is_op(*followers)
        ):
            return ref
        self.i = save
        return None

    # ------------------------------------------------------------- statements
    def block(self) -> A.Block:
        line = self.expect("{").line
        stmts = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.fail("unterminated block")
            stmts.append(self.statement())
        self.expect("}")
        return A.Block(tuple(stmts), line)

    def statement(self):
        start = self.i
        try:
            return self.statement_inner()
        except JavaSyntaxError:
            self.i = start
            return self.opaque_statement()

    def statement_inner(self):
        t = self.peek()
        line = t.line
        if t.is_op("{"):
            return self.block()
        if t.is_op(";"):
            self.advance()
            return A.Empty(line)
        if t.kind == "keyword":
            w = t.text
            if w == "if":
                self.advance()
                cond = self.paren_expr()
                then = self.statement()
                other = None
                if self.at_kw("else"):
                    self.advance()
                    other = self.statement()
                return A.If(cond, then, other, line)
            if w == "while":
                self.advance()
                cond = self.paren_expr()
                return A.While(cond, self.statement(), line)
            if w == "do":
                self.advance()
                body = self.statement()
                self.expect_kw("while")
                cond = self.paren_expr()
                self.expect(";")
                return A.DoWhile(body, cond, line)
            if w == "for":
                return self.for_statement()
            if w == "try":
                return self.try_statement()
            if w == "switch":
                return self.switch_statement()
            if w == "return":
                self.advance()
                expr = None if self.at(";") else self.expr()
                self.expect(";")
                return A.Return(expr, line)
            if w == "throw":
                self.advance()
                expr = self.expr()
                self.expect(";")
                return A.Throw(expr, line)
            if w in ("break", "continue"):
                self.advance()
                label = self.ident() if self.peek().kind == "ident" else None
                self.expect(";")
                return A.Jump(w, label, line)
            if w == "synchronized" and self.peek(1).is_op("("):
                self.advance()
                lock = self.paren_expr()
                return A.Sync(lock, self.block(), line)
            if w == "assert":
                self.advance()
                cond = self.expr()
                msg = self.expr() if self.accept(":") else None
                self.expect(";")
                return A.Assert(cond, msg, line)
        if t.kind == "ident" and self.peek(1).is_op(":"):
            label = self.advance().text
            self.advance()
            return A.Labeled(label, self.statement(), line)
        # local class or local variable with modifiers
        save = self.i
        annos, mods = self.modifiers()
        if self.at_type_start():
            return A.LocalClass(self.type_decl(annos, mods, save), line)
        local = self.local_var(mods, line)
        if local is not None:
            self.expect(";")
            return local
        if annos or mods:
            self.fail("modifiers without declaration")
        expr = self.expr()
        self.expect(";")
        return A.ExprStmt(expr, line)

    def local_var(self, mods, line) -> Optional[A.LocalVar]:
        ref = self.try_type_then_ident(("=", ";", ",", "["))
        if ref is None:
            return None
        name = self.ident()
        decls = self.declarators(name)
        return A.LocalVar(ref, tuple(decls), tuple(mods), line)

    def paren_expr(self):
        self.expect("(")
        e = self.expr()
        self.expect(")")
        return e

    def for_statement(self):
        line = self.advance().line
        self.expect("(")
        save = self.i
        annos, mods = self.modifiers()
        ref = self.try_type_then_ident((":",))
        if ref is not None:
            name = self.ident()
            self.expect(":")
            iterable = self.expr()
            self.expect(")")
            body = self.statement()
            return A.ForEach(A.Param(ref, name, False, tuple(mods)), iterable, body, line)
        self.i = save
        init = []
        if not self.at(";"):
            annos, mods = self.modifiers()
            local = self.local_var(mods, self.peek().line)
            if local is not None:
                init.append(local)
            else:
                init.append(A.ExprStmt(self.expr(), self.peek().line))
                while self.accept(","):
                    init.append(A.ExprStmt(self.expr(), self.peek().line))
        self.expect(";")
        cond = None if self.at(";") else self.expr()
        self.expect(";")
        update = []
        if not self.at(")"):
            update.append(self.expr())
            while self.accept(","):
                update.append(self.expr())
        self.expect(")")
        body = self.statement()
        return A.For(tuple(init), cond, tuple(update), body, line)

    def try_statement(self):
        line = self.advance().line
        resources = []
        if self.accept("("):
            while not self.at(")"):
                rline = self.peek().line
                annos, mods = self.modifiers()
                local = self.local_var(mods, rline)
                if local is None:
                    resources.append(A.ExprStmt(self.expr(), rline))
                else:
                    resources.append(local)
                if not self.accept(";"):
                    break
            self.expect(")")
        body = self.block()
        catches = []
        while self.at_kw("catch"):
            self.advance()
            self.expect("(")
            self.modifiers()
            types = [self.type_ref()]
            while self.accept("|"):
                types.append(self.type_ref())
            name = self.ident()
            self.expect(")")
            catches.append(A.Catch(tuple(types), name, self.block()))
        final = None
        if self.at_kw("finally"):
            self.advance()
            final = self.block()
        if not catches and final is None and not resources:
            self.fail("try without catch or finally")
        return A.Try(tuple(resources), body, tuple(catches), final, line)

    def switch_statement(self):
        line = self.advance().line
        selector = self.paren_expr()
        self.expect("{")
        cases = []
        while not self.at("}"):
            labels = []
            if self.at_kw("default"):
                self.advance()
            else:
                self.expect_kw("case")
                labels.append(self.ternary())
                while self.accept(","):
                    labels.append(self.ternary())
            if self.accept("->"):
                if self.at("{"):
                    body = [self.block()]
                elif self.at_kw("throw"):
                    body = [self.statement()]
                else:
                    sline = self.peek().line
                    e = self.expr()
                    self.expect(";")
                    body = [A.ExprStmt(e, sline)]
                cases.append(A.SwitchCase(tuple(labels), tuple(body), ))
                continue
            self.expect(":")
            body = []
            while not (self.at("}") or self.at_kw("case", "default")):
                if self.peek().kind == "eof":
                    self.fail("unterminated switch")
                body.append(self.statement())
            cases.append(A.SwitchCase(tuple(labels), tuple(body)))
        self.expect("}")
        return A.Switch(selector, tuple(cases), line)

    def opaque_statement(self) -> A.Opaque:
        start = self.i
        first = self.peek()
        if first.kind == "eof" or first.is_op("}"):
            self.fail("unexpected end of block")
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                self.fail("unterminated statement")
            if t.is_op("(", "[", "{"):
                depth += 1
            elif t.is_op(")", "]", "}"):
                if depth == 0:
                    break
                depth -= 1
                self.advance()
                if depth == 0 and t.is_op("}"):
                    nxt = self.peek()
                    if nxt.is_op(";"):
                        self.advance()
                        break
                    if not nxt.is_op(")", ".", ",", "]", "?", ":") and not (
                        nxt.kind == "op" and nxt.text in _BINARY_PREC
                    ):
                        break
                continue
            elif t.is_op(";") and depth == 0:
                self.advance()
                break
            self.advance()
        toks = self.toks[start:self.i]
        text = " ".join(tk.text for tk in toks)
        return A.Opaque(text, tuple(_scan_calls(toks)), first.line)

    # ------------------------------------------------------------ expressions
    def expr(self):
        return self.assignment()

    def lambda_ahead(self) -> bool:
        t = self.peek()
        if t.kind == "ident" and self.peek(1).is_op("->"):
            return True
        if not t.is_op("("):
            return False
        depth, k = 0, 0
        while True:
            tk = self.peek(k)
            if tk.kind == "eof":
                return False
            if tk.is_op("("):
                depth += 1
            elif tk.is_op(")"):
                depth -= 1
                if depth == 0:
                    return self.peek(k + 1).is_op("->")
            k += 1

    def lambda_expr(self):
        line = self.peek().line
        params = []
        if self.peek().kind == "ident":
            params.append(A.Param(None, self.advance().text))
        else:
            self.expect("(")
            if not self.at(")"):
                while True:
                    annos, mods = self.modifiers()
                    if self.peek().kind == "ident" and self.peek(1).is_op(",", ")"):
                        params.append(A.Param(None, self.advance().text, False, tuple(mods)))
                    else:
                        ptype = self.type_ref()
                        varargs = self.accept("...")
                        params.append(A.Param(ptype, self.ident(), varargs, tuple(mods)))
                    if not self.accept(","):
                        break
            self.expect(")")
        self.expect("->")
        body = self.block() if self.at("{") else self.expr()
        return A.Lambda(tuple(params), body, line)

    def assignment(self):
        if self.lambda_ahead():
            return self.lambda_expr()
        if self.at_kw("switch"):
            self.fail("switch expressions are outside the subset")
        lhs = self.ternary()
        op = self.assign_op()
        if op is None:
            return lhs
        return A.Assign(lhs, op, self.assignment(), lhs_line(lhs))

    def assign_op(self) -> Optional[str]:
        t = self.peek()
        if t.kind == "op" and t.text in _ASSIGN_OPS:
            self.advance()
            return t.text
        if t.is_op(">"):
            # >>= and >>>= arrive as separate adjacent tokens
            k = 1
            while k < 3 and self.peek(k).is_op(">") and self.adjacent(k - 1):
                k += 1
            if k >= 2 and self.peek(k).is_op("=") and self.adjacent(k - 1):
                self.i += k + 1
                return ">" * k + "="
        return None

    def ternary(self):
        cond = self.binary(1)
        if self.at("?"):
            line = self.advance().line
            then = self.expr()
            self.expect(":")
            other = self.lambda_expr() if self.lambda_ahead() else self.ternary()
            return A.Conditional(cond, then, other, line)
        return cond

    def binary_op(self):
        """Return ``(op, token_count)`` for the operator at the cursor, or ``None``."""
        t = self.peek()
        if t.is_kw("instanceof"):
            return "instanceof", 1
        if t.kind != "op":
            return None
        if t.text == ">":
            k = 0
            while self.peek(k + 1).is_op(">") and self.adjacent(k) and k < 2:
                k += 1
            nxt = self.peek(k + 1)
            if nxt.is_op("=") and self.adjacent(k):
                if k == 0:
                    return ">=", 2
                return None  # compound assignment
            return ">" * (k + 1), k + 1
        if t.text in _BINARY_PREC:
            return t.text, 1
        return None

    def binary(self, min_prec):
        left = self.unary()
        while True:
            found = self.binary_op()
            if found is None:
                return left
            op, ntok = found
            prec = _BINARY_PREC[op]
            if prec < min_prec:
                return left
            line = self.peek().line
            self.i += ntok
            if op == "instanceof":
                self.modifiers()
                ref = self.type_ref()
                binding = self.advance().text if self.peek().kind == "ident" else None
                left = A.InstanceOf(left, ref, binding, line)
                continue
            right = self.binary(prec + 1)
            left = A.Binary(op, left, right, line)

    def unary(self):
        t = self.peek()
        if t.is_op("+", "-", "++", "--", "!", "~"):
            self.advance()
            return A.Unary(t.text, self.unary(), False, t.line)
        if t.is_op("(") and not self.lambda_ahead():
            cast = self.try_cast()
            if cast is not None:
                return cast
        return self.postfix(self.primary())

    def try_cast(self):
        save = self.i
        line = self.advance().line
        nxt = self.peek()
        if nxt.kind == "keyword" and nxt.text in PRIMITIVES:
            ref = self.type_ref()
            self.expect(")")
            return A.Cast(ref, self.unary(), line)
        if nxt.kind != "ident":
            self.i = save
            return None
        try:
            ref = self.type_ref()
            while self.accept("&"):
                self.type_ref()
        except JavaSyntaxError:
            self.i = save
            return None
        if not self.at(")"):
            self.i = save
            return None
        follow = self.peek(1)
        if (
            follow.kind in _CAST_FOLLOWERS
            or follow.is_kw("this", "new", "super", *PRIMITIVES)
            or follow.is_op("(", "!", "~")
        ):
            self.advance()
            if self.lambda_ahead():
                return A.Cast(ref, self.lambda_expr(), line)
            return A.Cast(ref, self.unary(), line)
        self.i = save
        return None

    def arguments(self) -> tuple:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect(")")
        return tuple(args)

    def primary(self):
        t = self.peek()
        line = t.line
        if t.kind in ("number", "string", "char", "literal"):
            self.advance()
            return A.Literal(t.kind, t.text, line)
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                return A.MethodCall(None, t.text, self.arguments(), line)
            return A.Name(t.text, line)
        if t.is_kw("this"):
            self.advance()
            if self.at("("):
                return A.MethodCall(None, "this", self.arguments(), line)
            return A.This(None, line)
        if t.is_kw("super"):
            self.advance()
            if self.at("("):
                return A.MethodCall(None, "super", self.arguments(), line)
            return A.Name("super", line)
        if t.is_kw("new"):
            return self.creator(None)
        if t.is_op("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "keyword" and (t.text in PRIMITIVES or t.text == "void"):
            ref = self.type_ref()
            if self.accept("::"):
                name = "new" if self.at_kw("new") else None
                self.advance()
                return A.MethodRef(ref, name or self.toks[self.i - 1].text, line)
            self.expect(".")
            self.expect_kw("class")
            return A.ClassLit(ref, line)
        self.fail(f"unexpected token {t.text or 'end of file'!r} in expression")

    def creator(self, outer):
        line = self.expect_kw("new").line
        if self.at("<"):
            self.type_args()
        ref = self.type_ref(allow_dims=False)
        if self.at("["):
            sizes = []
            dims = 0
            while self.at("["):
                if self.peek(1).is_op("]"):
                    self.i += 2
                    dims += 1
                else:
                    self.advance()
                    sizes.append(self.expr())
                    self.expect("]")
                    dims += 1
            init = self.array_init() if self.at("{") else None
            return A.NewArray(A.TypeRef(ref.name, ref.args, dims), tuple(sizes), init, line)
        args = self.arguments()
        body = None
        if self.at("{"):
            body = tuple(self.class_body(ref.simple_name))
        return A.New(ref, args, body, outer, line)

    def postfix(self, expr):
        while True:
            t = self.peek()
            if t.is_op("."):
                self.advance()
                nxt = self.peek()
                if nxt.is_kw("new"):
                    expr = self.creator(expr)
                elif nxt.is_kw("class"):
                    self.advance()
                    expr = A.ClassLit(A.TypeRef(dotted(expr)), t.line)
                elif nxt.is_kw("this"):
                    self.advance()
                    expr = A.This(dotted(expr), t.line)
                elif nxt.is_kw("super"):
                    self.advance()
                    expr = A.Name("super", t.line)
                else:
                    if self.at("<"):
                        self.type_args()
                    name = self.ident()
                    if self.at("("):
                        expr = A.MethodCall(expr, name, self.arguments(), t.line)
                    else:
                        expr = A.FieldAccess(expr, name, t.line)
            elif t.is_op("["):
                if self.peek(1).is_op("]"):
                    base = dotted(expr)
                    dims = self.dims()
                    ref = A.TypeRef(base, (), dims)
                    if self.accept("::"):
                        name = self.advance().text
                        expr = A.MethodRef(ref, name, t.line)
                    else:
                        self.expect(".")
                        self.expect_kw("class")
                        expr = A.ClassLit(ref, t.line)
                else:
                    self.advance()
                    index = self.expr()
                    self.expect("]")
                    expr = A.ArrayAccess(expr, index, t.line)
            elif t.is_op("::"):
                self.advance()
                if self.at("<"):
                    self.type_args()
                name = self.advance()
                if name.kind not in ("ident",) and not name.is_kw("new"):
                    self.fail("expected method reference name")
                expr = A.MethodRef(expr, name.text, t.line)
            elif t.is_op("++", "--"):
                self.advance()
                expr = A.Unary(t.text, expr, True, t.line)
            else:
                return expr


def dotted(expr) -> str:
    if isinstance(expr, A.Name):
        return expr.name
    if isinstance(expr, A.FieldAccess):
        return dotted(expr.target) + "." + expr.name
    raise JavaSyntaxError("expected a qualified name", getattr(expr, "line", 0), 0)


def lhs_line(expr) -> int:
    return getattr(expr, "line", 0)


def _scan_calls(toks: list[Token]):
    """Recover call sites from raw tokens of an opaque statement."""
    n = len(toks)
    for k, t in enumerate(toks):
        if t.is_kw("new"):
            j = k + 1
            parts = []
            while j < n and toks[j].kind == "ident":
                parts.append(toks[j].text)
                if j + 1 < n and toks[j + 1].is_op("."):
                    j += 2
                else:
                    j += 1
                    break
            if not parts:
                continue
            if j < n and toks[j].is_op("<"):
                depth = 0
                while j < n:
                    if toks[j].is_op("<"):
                        depth += 1
                    elif toks[j].is_op(">"):
                        depth -= 1
                        if depth == 0:
                            j += 1
                            break
                    j += 1
            if j < n and toks[j].is_op("("):
                yield A.New(A.TypeRef(".".join(parts)), (None,) * _count_args(toks, j), None, None, t.line)
        elif t.kind == "ident" and k + 1 < n and toks[k + 1].is_op("("):
            if k > 0 and toks[k - 1].is_kw("new"):
                continue
            if k > 1 and toks[k - 1].is_op(".") and _inside_new_name(toks, k):
                continue
            target = None
            if k > 1 and toks[k - 1].is_op("."):
                prev = toks[k - 2]
                if prev.kind == "ident":
                    target = A.Name(prev.text, prev.line)
                elif prev.is_kw("this"):
                    target = A.This(None, prev.line)
                else:
                    target = A.Name("?", prev.line)
            yield A.MethodCall(target, t.text, (None,) * _count_args(toks, k + 1), t.line)


def _inside_new_name(toks, k) -> bool:
    j = k - 1
    while j >= 1 and toks[j].is_op(".") and toks[j - 1].kind == "ident":
        j -= 2
    return j >= 0 and toks[j].is_kw("new")


def _count_args(toks, open_idx) -> int:
    depth = 0
    count = 0
    seen_any = False
    for t in toks[open_idx:]:
        if t.is_op("(", "[", "{"):
            depth += 1
            if depth == 1:
                continue
        elif t.is_op(")", "]", "}"):
            depth -= 1
            if depth == 0:
                break
        if depth == 1 and t.is_op(","):
            count += 1
            continue
        if depth >= 1:
            seen_any = True
    return count + 1 if seen_any else 0
