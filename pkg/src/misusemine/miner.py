"""Level-wise closed frequent subgraph mining over API usage graphs.

Occurrences are concrete subgraphs (node set plus edge set) of individual
AUGs. Each level grows every occurrence by one edge, either to a new neighbour
or between nodes already present, and groups the results by
:func:`graph_fingerprint`. Support counts distinct methods.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .aug import Aug, MethodRef, dumps, loads_all
from .errors import EmptyInput

DEFAULT_MAX_PATTERN_NODES = 20
TIMEOUT_EXTERNAL_S = 600.0
TIMEOUT_INTERNAL_S = 300.0
CHECK_EVERY = 1000


def graph_fingerprint(g: Aug) -> str:
    """SHA-256 over the sorted node signatures and sorted edge signatures.

    Isomorphic graphs always collide; some non-isomorphic graphs collide too.
    """
    nodes = sorted(g.node_signature(i) for i in range(len(g.nodes)))
    edges = sorted(g.edge_signature(e) for e in g.edges)
    canon = json.dumps([nodes, edges], separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class MiningConfig:
    min_support_absolute: Optional[int] = None
    min_support_relative: Optional[float] = None
    max_pattern_nodes: int = DEFAULT_MAX_PATTERN_NODES
    timeout: Optional[float] = TIMEOUT_EXTERNAL_S

    def __post_init__(self):
        if (self.min_support_absolute is None) == (self.min_support_relative is None):
            raise ValueError("set exactly one of min_support_absolute and min_support_relative")
        if self.min_support_absolute is not None and self.min_support_absolute < 1:
            raise ValueError("absolute minimum support must be positive")
        if self.min_support_relative is not None and not 0 < self.min_support_relative <= 1:
            raise ValueError("relative minimum support must lie in (0, 1]")
        if self.max_pattern_nodes < 1:
            raise ValueError("max_pattern_nodes must be positive")

    def threshold(self, n_methods: int) -> int:
        if self.min_support_absolute is not None:
            return self.min_support_absolute
        return max(1, math.ceil(self.min_support_relative * n_methods - 1e-12))


@dataclass(frozen=True)
class Pattern:
    graph: Aug
    support: int
    occurrences: frozenset
    closed: bool = True
    fingerprint: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.fingerprint:
            object.__setattr__(self, "fingerprint", graph_fingerprint(self.graph))
        if self.support != len(self.occurrences):
            raise ValueError("support must equal the number of distinct occurrences")

    @property
    def pattern_id(self) -> str:
        return self.fingerprint[:16]

    def to_text(self) -> str:
        refs = ",".join(sorted(str(r) for r in self.occurrences))
        return dumps(self.graph) + f"SUPPORT {self.support}\nOCCURRENCES {refs}\n"

    def to_json(self) -> dict:
        g = self.graph
        return {
            "pattern_id": self.pattern_id,
            "fingerprint": self.fingerprint,
            "support": self.support,
            "closed": self.closed,
            "nodes": [[n.kind.value, n.label] for n in g.nodes],
            "edges": [[e.src, e.dst, e.kind.value] for e in g.edges],
            "occurrences": sorted(str(r) for r in self.occurrences),
        }


def patterns_from_text(text: str) -> list[Pattern]:
    out = []
    for graph, extra in loads_all(text):
        support, refs = None, []
        for line in extra:
            if line.startswith("SUPPORT "):
                support = int(line.split()[1])
            elif line.startswith("OCCURRENCES"):
                body = line[len("OCCURRENCES"):].strip()
                refs = [MethodRef.parse(r) for r in body.split(",")] if body else []
        occ = frozenset(refs)
        out.append(Pattern(graph.without_ref(), support if support is not None else len(occ), occ))
    return out


class MiningResult(list):
    """List of patterns with a truncation flag and its reason."""

    def __init__(self, patterns=(), truncated=False, reason=""):
        super().__init__(patterns)
        self.truncated = truncated
        self.reason = reason


@dataclass(frozen=True)
class _Occ:
    aug: int
    nodes: frozenset
    edges: frozenset


class _Clock:
    def __init__(self, timeout):
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.ops = 0

    def expired(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline

    def tick(self) -> bool:
        self.ops += 1
        return self.ops % CHECK_EVERY == 0 and self.expired()


def _method_key(augs, i):
    ref = augs[i].method_ref
    return ref if ref is not None else MethodRef("", f"aug{i}", i)


def mine_patterns(augs: Sequence[Aug], config: MiningConfig) -> MiningResult:
    """Closed patterns whose cross-method support reaches the configured threshold."""
    if not augs:
        raise EmptyInput("no usage graphs to mine")
    clock = _Clock(config.timeout)
    minsup = config.threshold(len(augs))
    keys = [_method_key(augs, i) for i in range(len(augs))]
    incident = []
    for g in augs:
        inc: dict[int, list[int]] = {}
        for k, e in enumerate(g.edges):
            inc.setdefault(e.src, []).append(k)
            if e.dst != e.src:
                inc.setdefault(e.dst, []).append(k)
        incident.append(inc)

    def cluster(occs: Iterable[_Occ]) -> dict[str, list[_Occ]]:
        groups: dict[str, list[_Occ]] = {}
        for o in occs:
            fp = graph_fingerprint(augs[o.aug].subgraph(o.nodes, o.edges))
            groups.setdefault(fp, []).append(o)
        return groups

    def support_of(occs) -> frozenset:
        return frozenset(keys[o.aug] for o in occs)

    def make_pattern(fp, occs, closed) -> Pattern:
        rep = min(occs, key=lambda o: (o.aug, sorted(o.nodes), sorted(o.edges)))
        graph = augs[rep.aug].subgraph(rep.nodes, rep.edges)
        occ = support_of(occs)
        return Pattern(graph, len(occ), occ, closed, fp)

    level = cluster(
        _Occ(i, frozenset([n.id]), frozenset()) for i, g in enumerate(augs) for n in g.nodes
    )
    level = {fp: occs for fp, occs in level.items() if len(support_of(occs)) >= minsup}
    results: list[Pattern] = []
    truncated, reason = False, ""

    while level:
        if clock.expired():
            truncated, reason = True, "timeout"
            results.extend(make_pattern(fp, o, False) for fp, o in sorted(level.items()))
            break
        children: dict[str, set[_Occ]] = {}
        parent_children: dict[str, set[str]] = {fp: set() for fp in level}
        blocked: set[str] = set()
        aborted = False
        for fp in sorted(level):
            for o in level[fp]:
                g = augs[o.aug]
                for k in sorted({k for n in o.nodes for k in incident[o.aug].get(n, ())}):
                    if k in o.edges:
                        continue
                    e = g.edges[k]
                    new_nodes = o.nodes | {e.src, e.dst}
                    if len(new_nodes) > config.max_pattern_nodes:
                        blocked.add(fp)
                        continue
                    child = _Occ(o.aug, new_nodes, o.edges | {k})
                    cfp = graph_fingerprint(g.subgraph(child.nodes, child.edges))
                    children.setdefault(cfp, set()).add(child)
                    parent_children[fp].add(cfp)
                    if clock.tick():
                        aborted = True
                        break
                if aborted:
                    break
            if aborted:
                break
        if aborted:
            truncated, reason = True, "timeout"
            results.extend(make_pattern(fp, o, False) for fp, o in sorted(level.items()))
            break
        child_support = {cfp: len(support_of(occs)) for cfp, occs in children.items()}
        for fp in sorted(level):
            sup = len(support_of(level[fp]))
            if any(child_support[c] == sup for c in parent_children[fp]):
                continue
            results.append(make_pattern(fp, level[fp], fp not in blocked))
        if blocked and not truncated:
            truncated, reason = True, "max_pattern_nodes"
        level = {
            cfp: sorted(occs, key=lambda o: (o.aug, sorted(o.nodes), sorted(o.edges)))
            for cfp, occs in children.items() if child_support[cfp] >= minsup
        }
    results.sort(key=lambda p: (-p.support, p.fingerprint))
    return MiningResult(results, truncated, reason)


# ------------------------------------------------------------------- ranking

@dataclass(frozen=True)
class RankedPattern:
    pattern: Pattern
    rank: int


def rank_patterns(patterns: Sequence[Pattern]) -> list[RankedPattern]:
    """Descending support; equal supports share a rank, the next rank skips the tie group."""
    ordered = sorted(patterns, key=lambda p: (-p.support, p.fingerprint))
    out = []
    for i, p in enumerate(ordered):
        if i and p.support == ordered[i - 1].support:
            rank = out[-1].rank
        else:
            rank = i + 1
        out.append(RankedPattern(p, rank))
    return out


def top_at_k(ranked: Sequence[RankedPattern], k: int) -> list[RankedPattern]:
    if k < 1:
        raise ValueError("k must be positive")
    return [r for r in ranked if r.rank <= k]
