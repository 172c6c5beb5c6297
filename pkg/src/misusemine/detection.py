"""Relative pattern frequency, node/edge matching, the overlap metric and misuse verdicts."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .aug import Aug, MethodRef, contains_relaxed, loads_all
from .errors import EmptyInput, EmptyPattern
from .miner import Pattern

DEFAULT_STATE_BOUND = 10_000


class Classification(str, Enum):
    CORRECT = "Correct"
    MISUSE = "Misuse"


@dataclass(frozen=True)
class FixingPattern:
    variants: tuple[Aug, ...]

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(self.variants))
        if not self.variants:
            raise ValueError("a fixing pattern needs at least one variant")
        if any(len(v.nodes) == 0 for v in self.variants):
            raise ValueError("fixing pattern variants must be non-empty")

    @classmethod
    def from_text(cls, text: str) -> "FixingPattern":
        return cls(tuple(g.without_ref() for g, _ in loads_all(text)))


def relative_pattern_frequency(fix: FixingPattern, augs: Sequence[Aug]) -> Fraction:
    """Largest share of ``augs`` that relaxed-contain one fix variant."""
    if not augs:
        raise EmptyInput("no usage graphs")
    best = max(sum(contains_relaxed(v, g) for g in augs) for v in fix.variants)
    return Fraction(best, len(augs))


# ------------------------------------------------------------------ matching

@dataclass(frozen=True)
class Match:
    node_map: dict
    matched_nodes: frozenset
    matched_edges: tuple  # indices into p.edges
    exhaustive: bool = True


def _count_edges(p: Aug, u_edges: Counter, node_map: dict) -> list[int]:
    """Indices of p-edges realised in u under ``node_map``; parallel edges matched injectively."""
    budget: Counter = Counter()
    out = []
    for k, e in enumerate(p.edges):
        if e.src in node_map and e.dst in node_map:
            key = (node_map[e.src], node_map[e.dst], e.kind)
            if budget[key] < u_edges[key]:
                budget[key] += 1
                out.append(k)
    return out


def match_nodes_edges(p: Aug, u: Aug, state_bound: int = DEFAULT_STATE_BOUND) -> Match:
    """Partial injective map from p to u maximising matched nodes, then matched edges.

    Nodes only map onto nodes with the same kind and label. The maximum node
    count is fixed by the label multisets; the search then explores label-group
    assignments with branch and bound on edges, starting from a greedy
    solution. If ``state_bound`` is hit the best map found so far is returned
    with ``exhaustive=False``.
    """
    u_edges = Counter((e.src, e.dst, e.kind) for e in u.edges)
    groups_u: dict[tuple, list[int]] = {}
    for n in u.nodes:
        groups_u.setdefault((n.kind, n.label), []).append(n.id)
    groups_p: dict[tuple, list[int]] = {}
    for n in p.nodes:
        groups_p.setdefault((n.kind, n.label), []).append(n.id)

    # p-nodes that can be matched, processed group by group; each group maps
    # exactly min(|group_p|, |group_u|) nodes
    order: list[int] = []
    quota: dict[tuple, int] = {}
    for sig, ids in sorted(groups_p.items(), key=lambda kv: (len(groups_u.get(kv[0], [])), kv[0])):
        if sig in groups_u:
            order.extend(ids)
            quota[sig] = min(len(ids), len(groups_u[sig]))
    target_nodes = sum(quota.values())
    remaining_in_group = Counter()
    for pid in order:
        remaining_in_group[(p.nodes[pid].kind, p.nodes[pid].label)] += 1

    def edge_score(node_map):
        return len(_count_edges(p, u_edges, node_map))

    # greedy seed: map in order to the first free node that maximises edges
    greedy: dict[int, int] = {}
    used: set[int] = set()
    taken = Counter()
    for pid in order:
        sig = (p.nodes[pid].kind, p.nodes[pid].label)
        if taken[sig] >= quota[sig]:
            continue
        best_c, best_s = None, -1
        for c in groups_u[sig]:
            if c in used:
                continue
            greedy[pid] = c
            s = edge_score(greedy)
            del greedy[pid]
            if s > best_s:
                best_c, best_s = c, s
        greedy[pid] = best_c
        used.add(best_c)
        taken[sig] += 1
    best = {"map": dict(greedy), "edges": edge_score(greedy)}

    incident: dict[int, list[int]] = {}
    for k, e in enumerate(p.edges):
        incident.setdefault(e.src, []).append(k)
        if e.dst != e.src:
            incident.setdefault(e.dst, []).append(k)

    states = 0
    exhaustive = True
    mapping: dict[int, int] = {}
    used_u: set[int] = set()
    taken_sig = Counter()
    skipped_sig = Counter()

    def upper_bound(i):
        # edges not yet decided could all still match
        decided = set(order[:i])
        open_edges = sum(
            1 for e in p.edges if not (e.src in decided and e.dst in decided)
            and (e.src in groups_ok and e.dst in groups_ok)
        )
        return edge_score(mapping) + open_edges

    groups_ok = set(order)

    def search(i):
        nonlocal states, exhaustive
        if not exhaustive:
            return
        states += 1
        if states > state_bound:
            exhaustive = False
            return
        if i == len(order):
            score = edge_score(mapping)
            if score > best["edges"]:
                best["map"], best["edges"] = dict(mapping), score
            return
        if upper_bound(i) <= best["edges"]:
            return
        pid = order[i]
        sig = (p.nodes[pid].kind, p.nodes[pid].label)
        group_size = len(groups_p[sig])
        decided_in_group = taken_sig[sig] + skipped_sig[sig]
        left_after = group_size - decided_in_group - 1
        if taken_sig[sig] < quota[sig]:
            for c in groups_u[sig]:
                if c in used_u:
                    continue
                mapping[pid] = c
                used_u.add(c)
                taken_sig[sig] += 1
                search(i + 1)
                taken_sig[sig] -= 1
                used_u.discard(c)
                del mapping[pid]
        # leave pid unmapped only if the quota can still be met by the rest
        if quota[sig] - taken_sig[sig] <= left_after:
            skipped_sig[sig] += 1
            search(i + 1)
            skipped_sig[sig] -= 1

    search(0)
    node_map = best["map"]
    assert len(node_map) == target_nodes
    return Match(
        dict(node_map), frozenset(node_map), tuple(_count_edges(p, u_edges, node_map)), exhaustive
    )


def overlap(p: Aug, u: Aug, match: Optional[Match] = None) -> Fraction:
    """(matched nodes + matched edges) / (p nodes + p edges with both endpoints matched)."""
    if not p.nodes:
        raise EmptyPattern("pattern has no nodes")
    m = match if match is not None else match_nodes_edges(p, u)
    inside = sum(1 for e in p.edges if e.src in m.matched_nodes and e.dst in m.matched_nodes)
    return Fraction(len(m.matched_nodes) + len(m.matched_edges), len(p.nodes) + inside)


def classify(value: Fraction) -> Classification:
    return Classification.MISUSE if 0 < value < 1 else Classification.CORRECT


@dataclass(frozen=True)
class DetectionVerdict:
    usage_ref: Optional[MethodRef]
    best_pattern: Optional[Pattern]
    overlap: Fraction
    classification: Classification

    def to_json(self) -> dict:
        return {
            "usage_ref": None if self.usage_ref is None else str(self.usage_ref),
            "overlap_numerator": self.overlap.numerator,
            "overlap_denominator": self.overlap.denominator,
            "classification": self.classification.value,
            "pattern_id": None if self.best_pattern is None else self.best_pattern.pattern_id,
        }


def detect(usage: Aug, patterns: Sequence[Pattern]) -> DetectionVerdict:
    """Classify ``usage`` by its best strictly-interior overlap with any pattern.

    Ties on overlap go to the higher-support pattern, then the smaller
    fingerprint. Without an interior overlap the usage is Correct and the
    reported overlap is the maximum seen (0 when there are no patterns).
    """
    best = None
    top = Fraction(0)
    for pat in patterns:
        ov = overlap(pat.graph, usage)
        top = max(top, ov)
        if classify(ov) is Classification.MISUSE:
            key = (ov, pat.support, _neg(pat.fingerprint))
            if best is None or key > best[0]:
                best = (key, pat, ov)
    if best is None:
        return DetectionVerdict(usage.method_ref, None, top, Classification.CORRECT)
    return DetectionVerdict(usage.method_ref, best[1], best[2], Classification.MISUSE)


def _neg(fp: str) -> tuple:
    # inverts string order so that max() prefers the smaller fingerprint
    return tuple(-ord(ch) for ch in fp)
