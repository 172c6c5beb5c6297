"""Shared test fixtures: graph builders, git fixture repos and brute-force oracles.

The oracles here are deliberately naive and independent of the library code
they check.
"""

from __future__ import annotations

import itertools
import os
import random
import subprocess
from collections import Counter
from fractions import Fraction
from pathlib import Path

from misusemine.aug import Aug, AugEdge, AugNode, EdgeKind, MethodRef, NodeKind


# ------------------------------------------------------------------ graphs

def mk(nodes, edges=(), ref=None) -> Aug:
    """``nodes``: list of (kind, label) or "A:label"/"D:label"; ``edges``: (src, dst, kind)."""
    ns = []
    for i, n in enumerate(nodes):
        if isinstance(n, str):
            kind, label = n.split(":", 1)
            kind = {"A": NodeKind.ACTION, "D": NodeKind.DATA}[kind]
        else:
            kind, label = NodeKind(n[0]), n[1]
        ns.append(AugNode(i, kind, label))
    es = [AugEdge(s, d, EdgeKind(k)) for s, d, k in edges]
    return Aug(ref, ns, es)


def random_aug(rng: random.Random, max_nodes=5, labels=("a", "b", "c", "d"), ref=None, edge_p=0.4) -> Aug:
    n = rng.randint(1, max_nodes)
    nodes = [(rng.choice(["Action", "Data"]), rng.choice(labels)) for _ in range(n)]
    edges = []
    for s, d in itertools.permutations(range(n), 2):
        if rng.random() < edge_p:
            edges.append((s, d, rng.choice([k.value for k in EdgeKind])))
    return mk(nodes, edges, ref)


def distinct_label_aug(rng: random.Random, max_nodes: int, pool, ref) -> Aug:
    """Graph whose node labels are pairwise distinct, so fingerprints identify isomorphism classes."""
    n = rng.randint(1, max_nodes)
    labels = rng.sample(list(pool), n)
    nodes = [("Action" if lab.isupper() else "Data", lab) for lab in labels]
    edges = []
    for s, d in itertools.permutations(range(n), 2):
        if rng.random() < 0.45:
            edges.append((s, d, rng.choice(["Order", "Def", "Recv", "Para"])))
    return mk(nodes, edges, ref)


# ------------------------------------------------------- exact graph oracles

def _edge_counter(g: Aug, perm=None):
    if perm is None:
        return Counter((e.src, e.dst, e.kind.value) for e in g.edges)
    return Counter((perm[e.src], perm[e.dst], e.kind.value) for e in g.edges)


def brute_embeds(p: Aug, c: Aug) -> bool:
    """Enumerates every injective map of p's nodes into c's nodes."""
    if len(p.nodes) > len(c.nodes):
        return False
    ce = _edge_counter(c)
    for image in itertools.permutations(range(len(c.nodes)), len(p.nodes)):
        if any((p.nodes[i].kind, p.nodes[i].label) != (c.nodes[j].kind, c.nodes[j].label)
               for i, j in enumerate(image)):
            continue
        pe = _edge_counter(p, image)
        if all(ce[k] >= v for k, v in pe.items()):
            return True
    return False


def canonical(g: Aug) -> tuple:
    """Exact canonical form: lexicographic minimum over all node permutations."""
    best = None
    n = len(g.nodes)
    for perm in itertools.permutations(range(n)):
        # perm[i] is the new position of node i
        nodes = [None] * n
        for i, p in enumerate(perm):
            nodes[p] = (g.nodes[i].kind.value, g.nodes[i].label)
        edges = tuple(sorted((perm[e.src], perm[e.dst], e.kind.value) for e in g.edges))
        form = (tuple(nodes), edges)
        if best is None or form < best:
            best = form
    return best


def connected_subgraphs(g: Aug):
    """Every connected subgraph: single nodes, plus every edge subset whose edges form one component."""
    for i in range(len(g.nodes)):
        yield g.subgraph([i], [])
    m = len(g.edges)
    for r in range(1, m + 1):
        for idx in itertools.combinations(range(m), r):
            nodes = set()
            for k in idx:
                nodes.update((g.edges[k].src, g.edges[k].dst))
            # connectivity over the chosen edges (undirected)
            parent = {v: v for v in nodes}

            def find(v):
                while parent[v] != v:
                    v = parent[v]
                return v
            for k in idx:
                a, b = find(g.edges[k].src), find(g.edges[k].dst)
                parent[a] = b
            if len({find(v) for v in nodes}) == 1:
                yield g.subgraph(nodes, idx)


def closed_frequent_oracle(augs, min_support: int) -> dict:
    """canonical form -> (support, representative graph) of closed frequent connected subgraphs."""
    support: dict[tuple, set] = {}
    rep: dict[tuple, Aug] = {}
    for i, g in enumerate(augs):
        for sg in connected_subgraphs(g):
            key = canonical(sg)
            support.setdefault(key, set()).add(i)
            rep.setdefault(key, sg)
    frequent = {k: len(v) for k, v in support.items() if len(v) >= min_support}
    closed = {}
    for k, s in frequent.items():
        p = rep[k]
        bigger = [q for q, t in frequent.items() if t == s and q != k]
        if not any(brute_embeds(p, rep[q]) for q in bigger):
            closed[k] = (s, p)
    return closed


def best_match_oracle(p: Aug, u: Aug) -> tuple[int, int]:
    """(max matched nodes, then max matched edges) over every label-preserving partial injection."""
    ue = _edge_counter(u)
    best = (0, 0)
    pn = len(p.nodes)
    options = []
    for i in range(pn):
        opts = [None] + [j for j in range(len(u.nodes))
                         if (u.nodes[j].kind, u.nodes[j].label) == (p.nodes[i].kind, p.nodes[i].label)]
        options.append(opts)
    for choice in itertools.product(*options):
        used = [c for c in choice if c is not None]
        if len(used) != len(set(used)):
            continue
        budget = Counter()
        edges = 0
        for e in p.edges:
            s, d = choice[e.src], choice[e.dst]
            if s is None or d is None:
                continue
            key = (s, d, e.kind.value)
            if budget[key] < ue[key]:
                budget[key] += 1
                edges += 1
        best = max(best, (len(used), edges))
    return best


# -------------------------------------------------------------- other oracles

def token_contains(text: str, kw: str) -> bool:
    """Character scan for ``kw`` with non-identifier characters (or text ends) on both sides."""
    ident = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_$")
    start = 0
    while True:
        i = text.find(kw, start)
        if i < 0:
            return False
        before_ok = i == 0 or text[i - 1] not in ident
        after = i + len(kw)
        after_ok = after == len(text) or text[after] not in ident
        if before_ok and after_ok:
            return True
        start = i + 1


def sr_oracle(text: str, kws) -> Fraction:
    kws = set(kws)
    return Fraction(sum(token_contains(text, k) for k in kws), len(kws))


def rank_oracle(supports):
    """Rank of each support: one plus the number of strictly larger supports."""
    return [1 + sum(1 for t in supports if t > s) for s in supports]


def wilcoxon_enum_p(diffs) -> float:
    """Two-sided exact p by enumerating all 2^n sign assignments of the ranked |d|."""
    d = [x for x in diffs if x != 0]
    absd = sorted(abs(x) for x in d)
    ranks = {}
    i = 0
    while i < len(absd):
        j = i
        while j + 1 < len(absd) and absd[j + 1] == absd[i]:
            j += 1
        for k in range(i, j + 1):
            ranks.setdefault(absd[k], (i + j + 2) / 2)
        i = j + 1
    r = [ranks[abs(x)] for x in d]
    wp = sum(ri for ri, x in zip(r, d) if x > 0)
    wm = sum(ri for ri, x in zip(r, d) if x < 0)
    t = min(wp, wm)
    total = sum(r)
    hits = 0
    for signs in itertools.product((0, 1), repeat=len(r)):
        s = sum(ri for ri, b in zip(r, signs) if b)
        if min(s, total - s) <= t + 1e-9:
            hits += 1
    return hits / 2 ** len(r)


# ------------------------------------------------------------------- git

GIT_ID = ("Fixture Author", "fixture@example.org")


def git(cwd, *args, date=None) -> str:
    env = dict(os.environ)
    if date is not None:
        env["GIT_AUTHOR_DATE"] = env["GIT_COMMITTER_DATE"] = f"{date} +0000"
    out = subprocess.run(
        ["git", "-c", f"user.name={GIT_ID[0]}", "-c", f"user.email={GIT_ID[1]}", "-c", "commit.gpgsign=false",
         "-c", "init.defaultBranch=main", *args],
        cwd=cwd, env=env, check=True, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    return out.stdout.decode().strip()


class FixtureRepo:
    """Tiny git repository with deterministic commit dates."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        git(self.root, "init", "-q")
        self.clock = 1_700_000_000

    def write(self, rel: str, text: str):
        p = self.root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8", newline="")

    def remove(self, rel: str):
        (self.root / rel).unlink()

    def commit(self, message: str, files: dict | None = None, step: int = 60) -> str:
        for rel, text in (files or {}).items():
            self.write(rel, text)
        self.clock += step
        git(self.root, "add", "-A")
        git(self.root, "commit", "-q", "--allow-empty", "-m", message, date=self.clock)
        return git(self.root, "rev-parse", "HEAD")


def ref(doc="d", method="m", mid=0) -> MethodRef:
    return MethodRef(doc, method, mid)
