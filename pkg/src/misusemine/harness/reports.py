"""Tabular summaries: method reductions, detection confusion counts and matrix cells."""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import DegenerateTable
from ..stats import ConfusionCounts, StatResult, chi_square_yates, precision_recall


def a2c(all_methods: int, changed: int) -> float:
    """Percent reduction from all methods to changed methods."""
    if all_methods <= 0:
        raise ValueError("A must be positive")
    if not 0 <= changed <= all_methods:
        raise ValueError("need 0 <= C <= A")
    return 100.0 * (all_methods - changed) / all_methods


def c2e(changed: int, external: int) -> tuple[float, bool]:
    """Percent reduction from changed methods to those using a third-party API; flagged when C is 0."""
    if changed == 0:
        return 0.0, True
    if not 0 <= external <= changed:
        raise ValueError("need 0 <= E <= C")
    return 100.0 * (changed - external) / changed, False


@dataclass(frozen=True)
class ReductionRow:
    entry_id: str
    commit: Optional[str]
    all_methods: Optional[int]
    changed: int
    external_api: int
    a2c: Optional[float]
    c2e: float
    c2e_flagged: bool
    imports: int
    keywords: int


def report_reductions(reports: Sequence) -> list[ReductionRow]:
    """One row per entry; ``reports`` are RunReport objects or their JSON dicts."""
    rows = []
    for r in reports:
        d = r.to_json() if hasattr(r, "to_json") else r
        counts = d["counts"]
        a, c, e = counts["all"], counts["changed"], counts["external_api"]
        c2e_value, flagged = c2e(c, e)
        rows.append(ReductionRow(
            d["entry_id"], d.get("misuse_introducing_commit"), a, c, e,
            None if not a else a2c(a, c), c2e_value, flagged,
            sum(d.get("import_counts", [])), sum(d.get("keyword_counts", [])),
        ))
    return rows


@dataclass(frozen=True)
class ReductionSummary:
    unique_commits: int
    a2c_mean: Optional[float]
    a2c_median: Optional[float]
    c2e_mean: Optional[float]
    c2e_median: Optional[float]


def summarize_reductions(rows: Sequence[ReductionRow]) -> ReductionSummary:
    """Mean and median over unique commits; an entry without a commit is left out."""
    by_commit: dict[str, ReductionRow] = {}
    for row in rows:
        if row.commit is not None:
            by_commit.setdefault(row.commit, row)
    uniq = list(by_commit.values())
    a = [r.a2c for r in uniq if r.a2c is not None]
    c = [r.c2e for r in uniq if not r.c2e_flagged]

    def agg(xs, fn):
        return fn(xs) if xs else None
    return ReductionSummary(len(uniq), agg(a, statistics.fmean), agg(a, statistics.median),
                            agg(c, statistics.fmean), agg(c, statistics.median))


# ----------------------------------------------------------------- detection

@dataclass(frozen=True)
class Evaluation:
    cell: str
    counts: ConfusionCounts
    precision: float
    recall: float
    precision_defined: bool
    recall_defined: bool
    unprocessed: int


def confusion_counts(labels: Sequence[Optional[str]], predictions: Sequence[Optional[str]]) -> tuple[ConfusionCounts, int]:
    """Confusion counts where a missing prediction counts as a non-detection.

    Entries without a ground-truth label are ignored. Returns the counts and
    how many labelled entries had no prediction.
    """
    if len(labels) != len(predictions):
        raise ValueError("labels and predictions differ in length")
    tp = fp = tn = fn = unprocessed = 0
    for truth, pred in zip(labels, predictions):
        if truth is None:
            continue
        if pred is None:
            unprocessed += 1
            pred = "Correct"
        if pred == "Misuse":
            tp, fp = (tp + 1, fp) if truth == "Misuse" else (tp, fp + 1)
        else:
            fn, tn = (fn + 1, tn) if truth == "Misuse" else (fn, tn + 1)
    return ConfusionCounts(tp, fp, tn, fn), unprocessed


def evaluate(reports: Sequence, cell_key: Optional[str] = None) -> list[Evaluation]:
    """Per-cell precision and recall over labelled entries.

    Cells that failed or did not run for an entry count as non-detections.
    """
    dicts = [r.to_json() if hasattr(r, "to_json") else r for r in reports]
    keys = sorted({c["cell"] for d in dicts for c in d["cells"]})
    if cell_key is not None:
        keys = [cell_key]
    out = []
    for key in keys:
        labels, preds = [], []
        for d in dicts:
            labels.append(d.get("label"))
            cell = next((c for c in d["cells"] if c["cell"] == key), None)
            ok = cell is not None and cell["status"] in ("ok", "partial") and cell["verdict"] is not None
            preds.append(cell["verdict"]["classification"] if ok else None)
        counts, unprocessed = confusion_counts(labels, preds)
        pr = precision_recall(counts)
        out.append(Evaluation(key, counts, pr.precision, pr.recall, pr.precision_defined,
                              pr.recall_defined, unprocessed))
    return out


def compare_hit_counts(hits_a: int, total_a: int, hits_b: int, total_b: int) -> Optional[StatResult]:
    """Yates-corrected chi-square on found/not-found counts of two configurations."""
    try:
        return chi_square_yates([[hits_a, total_a - hits_a], [hits_b, total_b - hits_b]])
    except DegenerateTable:
        return None


# ---------------------------------------------------------------------- CSV

def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (f"{v:.6g}" if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def reductions_csv(rows: Sequence[ReductionRow]) -> str:
    return _csv(
        ["Misuse", "Commit", "A", "C", "E", "A2C", "C2E", "C2E_flagged", "#Imports", "#Keywords"],
        [[r.entry_id, r.commit, r.all_methods, r.changed, r.external_api, r.a2c, r.c2e,
          int(r.c2e_flagged), r.imports, r.keywords] for r in rows],
    )


def evaluation_csv(evals: Sequence[Evaluation]) -> str:
    return _csv(
        ["Config", "TP", "FP", "TN", "FN", "Precision", "Recall", "Unprocessed"],
        [[e.cell, e.counts.tp, e.counts.fp, e.counts.tn, e.counts.fn,
          100 * e.precision if e.precision_defined else None,
          100 * e.recall if e.recall_defined else None, e.unprocessed] for e in evals],
    )


def cells_csv(reports: Sequence) -> str:
    rows = []
    for r in reports:
        d = r.to_json() if hasattr(r, "to_json") else r
        for c in d["cells"]:
            rpf = c["relative_pattern_frequency"]
            top = c["top_k"]
            verdict = c["verdict"] or {}
            rows.append([
                d["entry_id"], c["config"]["search_loc"], c["config"]["search_imp"], c["config"]["sr"],
                int(c["config"]["method_filter"]), c["status"], c["counts"]["docs_found"],
                c["counts"]["docs_after_file_filter"], c["counts"]["methods"], c["counts"]["patterns"],
                None if rpf is None else f"{rpf['numerator']}/{rpf['denominator']}",
                *[None if str(k) not in top else int(top[str(k)]["pure"]) for k in (1, 5, 10, 20)],
                *[None if str(k) not in top else int(top[str(k)]["relaxed"]) for k in (1, 5, 10, 20)],
                verdict.get("classification"),
                None if not verdict else f"{verdict['overlap_numerator']}/{verdict['overlap_denominator']}",
            ])
    return _csv(
        ["Misuse", "search_loc", "search_imp", "sr", "filter_method", "status", "docs", "docs_filtered",
         "methods", "patterns", "rpf", "top1", "top5", "top10", "top20",
         "top1_relaxed", "top5_relaxed", "top10_relaxed", "top20_relaxed", "classification", "overlap"],
        rows,
    )


def comparisons_csv(matrix_json: dict) -> str:
    return _csv(
        ["strategy", "condition", "group_a", "group_b", "n", "mean_a", "mean_b", "status", "W", "p", "significant"],
        [[c["strategy"], c["condition"], c["group_a"], c["group_b"], c["n_pairs"], c["mean_a"], c["mean_b"],
          c["status"], c["statistic"], c["p_value"], c["significant"]] for c in matrix_json["comparisons"]],
    )
