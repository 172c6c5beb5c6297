import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_embeds, mk, random_aug
from misusemine.aug import (INIT, RETURN, UNKNOWN, Aug, AugEdge, AugNode, EdgeKind, MethodRef, NodeKind,
                            build_aug, contains_relaxed, dumps, exact_subgraph_oracle, loads, loads_all, to_dot)
from misusemine.errors import SizeLimitExceeded
from misusemine.javalite import parse_compilation_unit, parse_method

FANCY = """package sample;

public class SampleClass {
    public Object myFancyMethod() {
        SampleClass sample = new SampleClass();
        return sample.doSomething();
    }
}
"""


def aug_of(src, name=None):
    u = parse_compilation_unit(src)
    for _, m in u.iter_methods():
        if name is None or m.name == name:
            return build_aug(m, u)
    raise LookupError(name)


def sigs(g):
    return sorted(g.node_multiset().elements()), sorted(g.edge_multiset().elements())


class TestBuild:
    def test_constructor_then_call(self):
        g = aug_of("class C { void t() { A a = new A(); a.m(); } }")
        nodes, edges = sigs(g)
        assert nodes == sorted([("Action", INIT), ("Data", "A"), ("Action", "m")])
        assert edges == sorted([(INIT, "Def", "A"), ("A", "Recv", "m"), (INIT, "Order", "m")])

    def test_empty_body(self):
        g = aug_of("class C { void t() {} }")
        assert g.nodes == () and g.edges == ()

    def test_abstract_method(self):
        g = aug_of("abstract class C { abstract void t(); }")
        assert len(g) == 0

    def test_fancy_method(self):
        g = aug_of(FANCY)
        nodes = g.node_multiset()
        assert nodes[("Action", INIT)] == 1
        assert nodes[("Action", "doSomething")] == 1
        assert nodes[("Action", RETURN)] == 1
        assert nodes[("Data", "SampleClass")] == 1
        assert nodes[("Data", UNKNOWN)] == 1
        edges = g.edge_multiset()
        assert edges[(INIT, "Def", "SampleClass")] == 1
        assert edges[("SampleClass", "Recv", "doSomething")] == 1
        assert edges[("doSomething", "Def", UNKNOWN)] == 1
        assert edges[(INIT, "Order", "doSomething")] == 1
        assert edges[("doSomething", "Order", RETURN)] == 1

    def test_parameter_and_para_edge(self):
        g = aug_of("class C { void t(Reader r, Sink s) { s.accept(r); } }")
        assert g.edge_multiset() == Counter({("Sink", "Recv", "accept"): 1, ("Reader", "Para", "accept"): 1})

    def test_field_type_resolution(self):
        g = aug_of("class C { private Pool pool; void t() { pool.take(); } }")
        assert ("Pool", "Recv", "take") in g.edge_multiset()

    def test_unresolved_receiver_is_unknown(self):
        g = aug_of("class C { void t() { helper().run(); } }")
        assert (UNKNOWN, "Recv", "run") in g.edge_multiset()

    def test_branches_join_order_chain(self):
        g = aug_of("class C { void t(X x) { if (x.ok()) { x.a(); } else { x.b(); } x.c(); } }")
        order = [(s, d) for s, k, d in g.edge_multiset().elements() if k == "Order"]
        assert sorted(order) == sorted([("ok", "a"), ("a", "b"), ("b", "c")])

    def test_method_ref_defaults(self):
        u = parse_compilation_unit("class C { void t() { f(); } }", path="C.java")
        (_, m), = list(u.iter_methods())
        assert build_aug(m, u).method_ref == MethodRef("C.java", "t", 0)
        assert build_aug(m, u, MethodRef("d", "t", 3)).method_ref.method_id == 3


# ----------------------------------------------------- structural invariants

BODIES = [
    "A a = new A(); a.m(); a.n(a.o());",
    "try { r.read(); } finally { r.close(); }",
    "for (Item i : list.items()) { sink.put(i.key(), i); }",
    "B b = f(g(h())); b.x().y().z(); return b.w();",
    "while (it.hasNext()) { Object o = it.next(); if (o == null) continue; use(o); }",
    "X x = cond ? new X() : other.make(); x.go(x);",
    "int n = s.length(); String t = s.substring(1, n); out.println(t + s.trim());",
]


def built():
    for i, body in enumerate(BODIES):
        src = f"class K{i} {{ Object t(R r, Sink sink, java.util.Iterator it, String s, Out out, Lst list, " \
              f"Obj other, boolean cond) {{ {body} }} }}"
        yield aug_of(src)


@pytest.mark.parametrize("g", list(built()))
def test_receiver_and_def_invariants(g):
    recv_in = Counter(e.dst for e in g.edges if e.kind is EdgeKind.RECV)
    def_in = Counter(e.dst for e in g.edges if e.kind is EdgeKind.DEF)
    assert all(v == 1 for v in recv_in.values())
    for nid, count in def_in.items():
        assert g.nodes[nid].kind is NodeKind.DATA and count <= 1
    for e in g.edges:
        if e.kind in (EdgeKind.DEF,):
            assert g.nodes[e.src].kind is NodeKind.ACTION and g.nodes[e.dst].kind is NodeKind.DATA
        if e.kind in (EdgeKind.RECV, EdgeKind.PARA):
            assert g.nodes[e.src].kind is NodeKind.DATA and g.nodes[e.dst].kind is NodeKind.ACTION
        if e.kind is EdgeKind.ORDER:
            assert g.nodes[e.src].kind is NodeKind.ACTION and g.nodes[e.dst].kind is NodeKind.ACTION


@pytest.mark.parametrize("g", list(built()))
def test_order_edges_acyclic(g):
    succ = {}
    for e in g.edges:
        if e.kind is EdgeKind.ORDER:
            succ.setdefault(e.src, []).append(e.dst)
    state = {}

    def visit(n):
        state[n] = 1
        for m in succ.get(n, []):
            if state.get(m) == 1 or (m not in state and not visit(m)):
                return False
        state[n] = 2
        return True
    assert all(visit(n) for n in list(succ) if n not in state)


@pytest.mark.parametrize("i", range(len(BODIES)))
def test_build_is_deterministic(i):
    a = list(built())[i]
    b = list(built())[i]
    assert a == b and dumps(a) == dumps(b)


# ------------------------------------------------------------ containment

def two_triangles():
    """A 6-cycle covers the label and edge multisets of two disjoint triangles, but contains no triangle."""
    tri = mk(["D:x", "D:y", "D:z", "D:x", "D:y", "D:z"],
             [(0, 1, "Para"), (1, 2, "Para"), (2, 0, "Para"), (3, 4, "Para"), (4, 5, "Para"), (5, 3, "Para")])
    hexagon = mk(["D:x", "D:y", "D:z", "D:x", "D:y", "D:z"],
                 [(0, 1, "Para"), (1, 2, "Para"), (2, 3, "Para"), (3, 4, "Para"), (4, 5, "Para"), (5, 0, "Para")])
    return tri, hexagon


class TestContainment:
    def test_reflexive(self):
        g = aug_of(FANCY)
        assert contains_relaxed(g, g)
        assert exact_subgraph_oracle(g, g)

    def test_missing_label(self):
        assert not contains_relaxed(mk(["A:zzz"]), aug_of(FANCY))

    def test_single_node(self):
        assert exact_subgraph_oracle(mk(["A:doSomething"]), aug_of(FANCY))

    def test_overestimation_counterexample(self):
        tri, hexagon = two_triangles()
        assert contains_relaxed(tri, hexagon)
        assert not exact_subgraph_oracle(tri, hexagon)
        assert not brute_embeds(tri, hexagon)

    def test_parallel_edges_counted(self):
        p = mk(["A:f", "A:g"], [(0, 1, "Order"), (0, 1, "Order")])
        c = mk(["A:f", "A:g"], [(0, 1, "Order")])
        assert not contains_relaxed(p, c)
        assert not exact_subgraph_oracle(p, c)

    def test_size_limit(self):
        big = mk([f"A:n{i}" for i in range(13)])
        with pytest.raises(SizeLimitExceeded):
            exact_subgraph_oracle(big, big)

    @pytest.mark.parametrize("seed", range(300))
    def test_oracle_agrees_with_enumeration(self, seed):
        rng = random.Random(seed)
        p = random_aug(rng, 4)
        c = random_aug(rng, 6)
        assert exact_subgraph_oracle(p, c) == brute_embeds(p, c)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10**9))
    def test_exact_implies_relaxed(self, seed):
        rng = random.Random(seed)
        p, c = random_aug(rng, 5), random_aug(rng, 7)
        if exact_subgraph_oracle(p, c):
            assert contains_relaxed(p, c)

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10**9))
    def test_subgraph_of_self_is_contained(self, seed):
        rng = random.Random(seed)
        g = random_aug(rng, 6)
        nodes = [i for i in range(len(g)) if rng.random() < 0.6] or [0]
        edges = [k for k, e in enumerate(g.edges) if e.src in nodes and e.dst in nodes and rng.random() < 0.7]
        sub = g.subgraph(nodes, edges)
        assert exact_subgraph_oracle(sub, g)
        assert contains_relaxed(sub, g)


# ---------------------------------------------------------- serialization

class TestText:
    def test_format(self):
        g = aug_of("class C { void t() { A a = new A(); a.m(); } }")
        lines = dumps(g).splitlines()
        assert lines[0] == "AUG % t 0"
        assert lines[1:4] == ["N 0 Action <init>", "N 1 Data A", "N 2 Action m"]
        assert all(ln.startswith("E ") for ln in lines[4:])

    @pytest.mark.parametrize("seed", range(40))
    def test_round_trip(self, seed):
        rng = random.Random(seed)
        g = random_aug(rng, 6, labels=("a b", "%x", "c\td", "Map<K,V>", "e"),
                       ref=MethodRef("dir/some file.java", "m", seed))
        text = dumps(g)
        assert loads(text) == g
        assert dumps(loads(text)) == text

    def test_no_ref(self):
        g = mk(["A:f"])
        assert loads(dumps(g)).method_ref is None

    def test_multiple_blocks_with_trailers(self):
        a, b = mk(["A:f"], ref=MethodRef("x", "f", 0)), mk(["D:T"], ref=MethodRef("y", "g", 1))
        text = dumps(a) + "SUPPORT 3\n" + dumps(b)
        (ga, ea), (gb, eb) = loads_all(text)
        assert (ga, ea, gb, eb) == (a, ["SUPPORT 3"], b, [])
        with pytest.raises(ValueError):
            loads(text)

    def test_malformed(self):
        with pytest.raises(ValueError):
            loads("N 0 Action f\n")

    def test_dot(self):
        dot = to_dot(aug_of(FANCY))
        assert dot.startswith("digraph aug {") and dot.rstrip().endswith("}")
        assert "shape=box" in dot and "shape=ellipse" in dot


def test_invalid_graphs_rejected():
    with pytest.raises(ValueError):
        Aug(None, [AugNode(1, NodeKind.ACTION, "f")])
    with pytest.raises(ValueError):
        Aug(None, [AugNode(0, NodeKind.ACTION, "f")], [AugEdge(0, 1, EdgeKind.ORDER)])
    with pytest.raises(ValueError):
        Aug(None, [AugNode(0, NodeKind.ACTION, "f")], [AugEdge(0, 0, EdgeKind.ORDER)])
    with pytest.raises(ValueError):
        AugNode(0, NodeKind.DATA, "")


def test_parse_method_helper():
    m = parse_method("void t(A a) { a.go(); }")
    assert build_aug(m).edge_multiset() == Counter({("A", "Recv", "go"): 1})
