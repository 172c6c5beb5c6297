import itertools

import pytest

from misusemine.api import (ApiContext, ImportClass, classify_import, extract_context, relevant_types,
                            shares_prefix)
from misusemine.javalite import ImportDecl, parse_compilation_unit

KEYWORD_FIXTURE = """package my.own.pkg;

import a.b.AClass;
import a.b.BClass;
import c.d.CClass;
import z.y.ZClass;
import x.v.*;
import my.own.pkg.util.QClass;

public class Sample extends ZClass {
    @Override
    public void doSomething(AClass a) {
        BClass b = new BClass();
        RClass r = new RClass();
        QClass q = new QClass(b);
        r.handle(a, q);
    }
}
"""


def only_method(src, name=None):
    u = parse_compilation_unit(src)
    for _, m in u.iter_methods():
        if name is None or m.name == name:
            return m, u
    raise LookupError(name)


class TestClassify:
    @pytest.mark.parametrize("qname,pkg,expected", [
        ("my.own.pkg.QClass", "my.own.pkg", ImportClass.INTERNAL),
        ("my.own.pkg.util.QClass", "my.own.pkg.sub", ImportClass.INTERNAL),
        ("a.b.BClass", "my.own.pkg", ImportClass.THIRD_PARTY),
        ("java.lang.Thread", "my.own.pkg", ImportClass.JAVA_LANG),
        ("java.lang.reflect.Method", "org.x.y", ImportClass.JAVA_LANG),
        ("java.util.List", "my.own.pkg", ImportClass.THIRD_PARTY),
        ("com.foobar.X", "com.foo", ImportClass.THIRD_PARTY),
        ("com.foo.X", "com.foo", ImportClass.INTERNAL),
        ("my.own.other.X", "my.own.pkg", ImportClass.THIRD_PARTY),
        ("anything.At.All", "", ImportClass.INTERNAL),
    ])
    def test_examples(self, qname, pkg, expected):
        assert classify_import(ImportDecl(qname), pkg) is expected

    def test_segment_prefix(self):
        assert shares_prefix("org.acme.io.X", "org.acme.io.deep.pkg")
        assert not shares_prefix("org.acmex.io.X", "org.acme.io")

    def test_order_independent(self):
        imps = [ImportDecl(q) for q in ("a.b.C", "java.lang.String", "my.own.pkg.Z", "q.r.S")]
        first = [classify_import(i, "my.own.pkg") for i in imps]
        for perm in itertools.permutations(range(len(imps))):
            assert [classify_import(imps[i], "my.own.pkg") for i in perm] == [first[i] for i in perm]


class TestKeywordFixture:
    def test_relevant_types(self):
        m, u = only_method(KEYWORD_FIXTURE)
        assert relevant_types(m, u) == {"AClass", "BClass", "ZClass"}

    def test_context(self):
        m, u = only_method(KEYWORD_FIXTURE)
        ctx = extract_context(m, u)
        assert ctx.api_import_names == ["a.b.AClass", "a.b.BClass", "z.y.ZClass"]
        assert {"AClass", "BClass", "ZClass", "doSomething"} <= ctx.keywords
        assert not {"CClass", "RClass", "QClass"} & ctx.keywords
        assert ctx.keywords == {"AClass", "BClass", "ZClass", "doSomething", "handle"}
        assert {i.simple_name for i in ctx.api_imports} <= ctx.keywords

    def test_misused_manifest_intersects(self):
        m, u = only_method(KEYWORD_FIXTURE)
        ctx = extract_context(m, u, misused_manifest=["a.b.BClass", "c.d.CClass"])
        assert ctx.misused_import_names == ["a.b.BClass"]

    def test_without_override_no_supertype(self):
        src = KEYWORD_FIXTURE.replace("    @Override\n", "")
        m, u = only_method(src)
        assert relevant_types(m, u) == {"AClass", "BClass"}
        assert "doSomething" not in extract_context(m, u).keywords

    def test_unused_import_does_not_change_types(self):
        m, u = only_method(KEYWORD_FIXTURE)
        src2 = KEYWORD_FIXTURE.replace("import x.v.*;", "import x.v.*;\nimport k.l.Unused;")
        m2, u2 = only_method(src2)
        assert relevant_types(m, u) == relevant_types(m2, u2)


class TestRules:
    def test_only_java_lang(self):
        m, u = only_method("package p.q.r; class C { String m(String s) { return s.trim(); } }")
        assert relevant_types(m, u) == set()

    def test_override_extends_imported_base(self):
        src = "package p.q.r;\nimport third.party.Base;\nclass C extends Base { @Override void run() { go(); } }"
        m, u = only_method(src)
        assert relevant_types(m, u) == {"Base"}
        assert extract_context(m, u).keywords == {"Base", "run", "go"}

    def test_override_implements(self):
        src = "package p.q.r;\nimport t.u.Listener;\nclass C implements Listener { @Override public void on() {} }"
        m, u = only_method(src)
        assert relevant_types(m, u) == {"Listener"}

    def test_return_and_thrown_types(self):
        src = ("package p.q.r;\nimport t.u.Result;\nimport t.u.Oops;\nimport t.u.Gen;\n"
               "class C { Result m() throws Oops { return null; } java.util.List<Gen> g() { return null; } }")
        m, u = only_method(src, "m")
        assert relevant_types(m, u) == {"Result", "Oops"}
        g, u = only_method(src, "g")
        assert relevant_types(g, u) == {"Gen"}

    def test_body_mention_in_static_call(self):
        src = "package p.q.r;\nimport t.u.Util;\nclass C { void m() { Util.run(); } }"
        m, u = only_method(src)
        assert relevant_types(m, u) == {"Util"}
        assert extract_context(m, u).keywords == {"Util", "run"}

    def test_empty_body(self):
        m, u = only_method("package p.q.r;\nimport t.u.V;\nclass C { void m() {} }")
        ctx = extract_context(m, u)
        assert ctx.api_imports == frozenset() and ctx.keywords == frozenset()

    def test_internal_call_is_keyword(self):
        m, u = only_method("package p.q.r; class C { void m() { helper(); } void helper() {} }", "m")
        assert "helper" in extract_context(m, u).keywords

    def test_static_import_not_a_type(self):
        src = "package p.q.r;\nimport static t.u.Util.run;\nclass C { void m() { run(); } }"
        m, u = only_method(src)
        assert relevant_types(m, u) == set()
        assert extract_context(m, u).keywords == {"run"}


class TestApiContext:
    def test_misused_must_be_subset(self):
        a = ImportDecl("a.b.C")
        with pytest.raises(ValueError):
            ApiContext(None, [a], [], [ImportDecl("x.y.Z")])

    def test_wildcard_rejected(self):
        with pytest.raises(ValueError):
            ApiContext(None, [ImportDecl("x.y", is_wildcard=True)])
