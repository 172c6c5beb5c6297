import re
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misusemine.errors import JavaSyntaxError
from misusemine.harness.minicorpus import data_root
from misusemine.javalite import (JAVA_KEYWORDS, calls, method_tokens, parse_compilation_unit, parse_method,
                                 pretty)

FANCY = """package sample;

import java.util.List;

public class SampleClass {

    @Override
    public Object myFancyMethod(List<String> items) {
        SampleClass sample = new SampleClass();
        Object result = sample.doSomething(items);
        return result;
    }
}
"""

MIXED = """package org.demo.tools;

import java.io.*;
import java.util.Map;
import static java.util.Objects.requireNonNull;

/** Javadoc with call(inside) that is ignored */
public final class Worker<T extends Comparable<T>> extends Base implements Runnable, Closeable {
    private static final int LIMIT = 10;
    private final Map<String, T> cache = new java.util.HashMap<>();

    public Worker(String name) throws IOException {
        super(name);
        this.init(name.trim());
    }

    @Override
    public void run() {
        // comment(ignored)
        for (int i = 0; i < LIMIT; i++) {
            if (cache.isEmpty()) {
                log("empty " + i);
            } else {
                cache.values().forEach(v -> handle(v));
            }
        }
        try (Reader r = open("x")) {
            r.read();
        } catch (IOException | RuntimeException e) {
            throw new IllegalStateException(e.getMessage(), e);
        } finally {
            cleanup();
        }
        int k = switch (LIMIT) { case 1 -> first(); default -> second(); };
        String s = "text with fake(call) inside";
        Runnable q = this::close;
        while (!done()) { step(k); }
        do { tick(); } while (again());
    }

    private static <R> R convert(Object o, Class<R> type) {
        return type.cast(requireNonNull(o));
    }

    public void close() {}

    enum Mode { A, B; Mode next() { return values()[(ordinal() + 1) % 2]; } }

    interface Callback { void done(int code); }
}
"""


def test_minimal_unit():
    u = parse_compilation_unit("package a.b; class C { void m() {} }")
    assert u.package_name == "a.b"
    assert u.imports == ()
    assert [t.name for t in u.types] == ["C"]
    assert [m.name for _, m in u.iter_methods()] == ["m"]


def test_default_package():
    u = parse_compilation_unit("class C { int f() { return 1; } }")
    assert u.package_name == ""


def test_imports_preserve_order_and_wildcards():
    u = parse_compilation_unit("import a.b.BClass;\nimport x.v.*;\nclass C {}")
    assert [i.qualified_name for i in u.imports] == ["a.b.BClass", "x.v"]
    first, second = u.imports
    assert not first.is_wildcard and first.simple_name == "BClass"
    assert second.is_wildcard and second.simple_name is None


def test_static_import():
    u = parse_compilation_unit(MIXED)
    static = [i for i in u.imports if i.is_static]
    assert [i.qualified_name for i in static] == ["java.util.Objects.requireNonNull"]


def test_fancy_method_shape():
    u = parse_compilation_unit(FANCY)
    (_, m), = list(u.iter_methods())
    assert m.name == "myFancyMethod"
    assert "Override" in m.annotations
    cs = calls(m)
    assert [(c.method_name, c.is_constructor) for c in cs] == [("SampleClass", True), ("doSomething", False)]
    assert cs[1].argument_count == 1
    assert "doSomething" in method_tokens(m)
    assert m.span.start == 7 and m.span.end == 12


def test_method_spans_are_one_based_and_enclose_body():
    u = parse_compilation_unit(MIXED)
    lines = MIXED.split("\n")
    for _, m in u.iter_methods():
        assert 1 <= m.span.start <= m.span.end <= len(lines)
        assert m.name in lines[m.span.start - 1] or any(
            m.name in ln for ln in lines[m.span.start - 1:m.span.end])
        src = u.method_source(m)
        assert src.rstrip().endswith("}") or src.rstrip().endswith(";")


def test_constructor_and_nested_types():
    u = parse_compilation_unit(MIXED)
    names = [(t.name, m.name) for t, m in u.iter_methods()]
    assert ("Worker", "Worker") in names
    assert ("Mode", "next") in names
    assert ("Callback", "done") in names
    ctor = next(m for t, m in u.iter_methods() if m.name == "Worker")
    assert ctor.is_constructor
    assert [str(t) for t in ctor.thrown_types] == ["IOException"]


def test_constructor_call_uses_simple_name():
    m = parse_method("void m() { Object o = new java.util.ArrayList<String>(3); }")
    (c,) = calls(m)
    assert c.is_constructor and c.method_name == "ArrayList" and c.argument_count == 1


class TestTokens:
    def test_empty_body(self):
        m = parse_method("void m() {}")
        toks = method_tokens(m)
        assert [t for t in toks if t not in JAVA_KEYWORDS] == ["m"]
        assert toks == ["void", "m"]

    def test_call_tokens(self):
        m = parse_method("void m(B b) { a.foo(b); }")
        assert {"a", "foo", "b"} <= set(method_tokens(m))

    def test_strings_and_comments_excluded(self):
        m = parse_method('void m() { /* hidden() */ log("visible? no"); // gone\n }')
        toks = method_tokens(m)
        assert "hidden" not in toks and "visible" not in toks and "gone" not in toks
        assert "log" in toks

    def test_punctuation_excluded(self):
        m = parse_method("int m(int x) { return (x + 1) * 2; }")
        assert method_tokens(m) == ["int", "m", "int", "x", "return", "x", "1", "2"]


def test_syntax_error_has_position():
    with pytest.raises(JavaSyntaxError) as info:
        parse_compilation_unit("package a;\nclass C {\n  void m( {\n")
    assert info.value.lineno >= 1
    assert isinstance(info.value, SyntaxError)


def test_unbalanced_class_rejected():
    with pytest.raises(JavaSyntaxError):
        parse_compilation_unit("class C { void m() { }")


def test_opaque_constructs_keep_calls():
    u = parse_compilation_unit(MIXED)
    run = next(m for _, m in u.iter_methods() if m.name == "run")
    names = {c.method_name for c in calls(run)}
    assert {"isEmpty", "log", "forEach", "handle", "open", "read", "IllegalStateException", "getMessage",
            "cleanup", "first", "second", "done", "step", "tick", "again"} <= names
    assert "fake" not in names


# ------------------------------------------------------------ round trip

def _corpus_sources():
    root = Path(str(data_root()))
    for p in sorted(root.rglob("*.java")):
        yield p.read_text(encoding="utf-8")
    yield FANCY
    yield MIXED


@pytest.mark.parametrize("src", list(_corpus_sources()))
def test_pretty_round_trip(src):
    u = parse_compilation_unit(src)
    printed = pretty(u)
    again = parse_compilation_unit(printed)
    assert again == u
    assert pretty(again) == printed


_BLANK_STRINGS = re.compile(r'"(?:\\.|[^"\\])*"|\'(?:\\.|[^\'\\])*\'')
_BLANK_COMMENTS = re.compile(r"/\*.*?\*/|//[^\n]*", re.S)
_CALL_SCAN = re.compile(r"(?<![@\w$])([A-Za-z_$][\w$]*)\s*\(")
_NOT_CALLS = JAVA_KEYWORDS | {"super", "this"}


@pytest.mark.parametrize("src", list(_corpus_sources()))
def test_regex_scan_calls_are_all_found(src):
    u = parse_compilation_unit(src)
    for _, m in u.iter_methods():
        if m.body is None:
            continue
        text = u.method_source(m)
        body = text[text.index("{"):]
        body = _BLANK_COMMENTS.sub(" ", _BLANK_STRINGS.sub('""', body))
        scanned = {n for n in _CALL_SCAN.findall(body) if n not in _NOT_CALLS}
        found = {c.method_name for c in calls(m)}
        assert scanned <= found, (m.name, scanned - found)


_IDENTS = st.sampled_from(["a", "b", "obj", "list", "x1"])


@st.composite
def _expr(draw, depth=0):
    choice = draw(st.integers(0, 3 if depth < 2 else 1))
    if choice == 0:
        return draw(_IDENTS)
    if choice == 1:
        return str(draw(st.integers(0, 99)))
    args = draw(st.lists(_expr(depth + 1), max_size=2))
    if choice == 2:
        return f"{draw(_IDENTS)}.{draw(_IDENTS)}m({', '.join(args)})"
    return f"new T{draw(st.integers(0, 3))}({', '.join(args)})"


@settings(max_examples=60, deadline=None)
@given(st.lists(_expr(), min_size=0, max_size=5))
def test_generated_statements_round_trip(exprs):
    body = " ".join(f"Object v{i} = {e};" for i, e in enumerate(exprs))
    src = f"class G {{ void g() {{ {body} return; }} }}"
    u = parse_compilation_unit(src)
    assert parse_compilation_unit(pretty(u)) == u
    (_, m), = list(u.iter_methods())
    expected = len(re.findall(r"\(", body))
    assert len(calls(m)) == expected
