"""The 40-cell strategy matrix and its paired significance tests."""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from ..errors import AllZeroDifferences
from ..filtering import SR_GRID, SearchImp, SearchLoc, StrategyConfig, as_ratio
from ..miner import MiningConfig
from ..stats import ALPHA, PairedSamples, wilcoxon_signed_rank
from .manifest import MisuseManifestEntry
from .pipeline import (CellResult, EntryAnalysis, MiningProfile, PipelineOptions, RunReport, write_json,
                       as_profile, config_hash, entry_report, frequency_profile, prepare_entry, run_cell)

log = logging.getLogger(__name__)

MATRIX_LOCS = (SearchLoc.INTERNAL, SearchLoc.EXTERNAL)
MATRIX_IMPS = (SearchImp.ALL_IMPORTS, SearchImp.MISUSED_IMPORTS)


def matrix_configs(sr_grid: Sequence = SR_GRID) -> list[StrategyConfig]:
    """Every search_loc x search_imp x sr x method_filter combination, in a fixed order."""
    grid = [as_ratio(s) for s in sr_grid]
    return [StrategyConfig(loc, imp, sr, mf)
            for loc, imp, sr, mf in itertools.product(MATRIX_LOCS, MATRIX_IMPS, grid, (True, False))]


@dataclass(frozen=True)
class Comparison:
    """Two groups of cells compared pairwise across entries."""

    strategy: str
    condition: str
    a: StrategyConfig
    b: StrategyConfig


def comparisons(sr_grid: Sequence = SR_GRID) -> list[Comparison]:
    """Group pairs isolating one strategy while the others are held fixed.

    search_loc and search_imp: no file or method filtering. filter_file: each
    pair of sr values without method filtering. filter_method: on versus off
    without file filtering. Each is repeated for every setting of the search axes
    left free.
    """
    zero = Fraction(0)
    grid = [as_ratio(s) for s in sr_grid]
    out = []
    for imp in MATRIX_IMPS:
        out.append(Comparison("search_loc", f"search_imp={imp.value}",
                              StrategyConfig(SearchLoc.INTERNAL, imp, zero, False),
                              StrategyConfig(SearchLoc.EXTERNAL, imp, zero, False)))
    for loc in MATRIX_LOCS:
        out.append(Comparison("search_imp", f"search_loc={loc.value}",
                              StrategyConfig(loc, SearchImp.ALL_IMPORTS, zero, False),
                              StrategyConfig(loc, SearchImp.MISUSED_IMPORTS, zero, False)))
    for loc, imp in itertools.product(MATRIX_LOCS, MATRIX_IMPS):
        for lo, hi in itertools.combinations(grid, 2):
            out.append(Comparison("filter_file", f"search_loc={loc.value},search_imp={imp.value}",
                                  StrategyConfig(loc, imp, lo, False), StrategyConfig(loc, imp, hi, False)))
    for loc, imp in itertools.product(MATRIX_LOCS, MATRIX_IMPS):
        out.append(Comparison("filter_method", f"search_loc={loc.value},search_imp={imp.value}",
                              StrategyConfig(loc, imp, zero, False), StrategyConfig(loc, imp, zero, True)))
    return out


@dataclass
class ComparisonResult:
    comparison: Comparison
    keys: tuple[str, ...]
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    status: str  # tested | all-zero | no-data
    statistic: Optional[float] = None
    p_value: Optional[float] = None
    method: str = ""

    @property
    def significant(self) -> Optional[bool]:
        return None if self.p_value is None else self.p_value < ALPHA

    def to_json(self) -> dict:
        c = self.comparison
        return {
            "strategy": c.strategy,
            "condition": c.condition,
            "group_a": c.a.key(),
            "group_b": c.b.key(),
            "n_pairs": len(self.keys),
            "entries": list(self.keys),
            "mean_a": None if not self.a else float(sum(self.a) / len(self.a)),
            "mean_b": None if not self.b else float(sum(self.b) / len(self.b)),
            "status": self.status,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "method": self.method,
            "significant": self.significant,
        }


def compare(comparison: Comparison, cells: dict[tuple[str, str], CellResult], entry_ids: Sequence[str]) -> ComparisonResult:
    """Pairs the two groups by entry; cells that failed, were skipped or lack a frequency drop out."""
    keys, a, b = [], [], []
    for eid in entry_ids:
        ca, cb = cells.get((eid, comparison.a.key())), cells.get((eid, comparison.b.key()))
        if ca is None or cb is None or ca.rpf is None or cb.rpf is None:
            continue
        if ca.status in ("failed", "skipped") or cb.status in ("failed", "skipped"):
            continue
        keys.append(eid)
        a.append(ca.rpf)
        b.append(cb.rpf)
    res = ComparisonResult(comparison, tuple(keys), tuple(a), tuple(b), "no-data")
    if not keys:
        return res
    try:
        t = wilcoxon_signed_rank(PairedSamples(tuple(map(float, a)), tuple(map(float, b)), tuple(keys)))
    except AllZeroDifferences:
        res.status = "all-zero"
        return res
    res.status, res.statistic, res.p_value, res.method = "tested", t.statistic, t.p_value, t.method
    return res


@dataclass
class MatrixReport:
    entries: list[RunReport]
    configs: list[StrategyConfig]
    comparisons: list[ComparisonResult] = field(default_factory=list)

    @property
    def cells(self) -> list[CellResult]:
        return [c for r in self.entries for c in r.cells]

    def cell(self, entry_id: str, key: str) -> CellResult:
        for c in self.cells:
            if c.entry_id == entry_id and c.config.key() == key:
                return c
        raise KeyError((entry_id, key))

    def to_json(self) -> dict:
        return {
            "configs": [c.key() for c in self.configs],
            "entries": [r.to_json() for r in self.entries],
            "comparisons": [c.to_json() for c in self.comparisons],
        }


def run_matrix(entries: Sequence[MisuseManifestEntry], sr_grid: Sequence = SR_GRID,
               mining: Union[MiningConfig, MiningProfile, None] = None,
               options: Optional[PipelineOptions] = None, workers: int = 1) -> MatrixReport:
    """Runs all cells of every entry (concurrently up to ``workers``) and the comparisons."""
    if not entries:
        raise ValueError("run_matrix needs at least one entry")
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("entry ids must be unique")
    options = options or PipelineOptions()
    mining = mining if mining is not None else frequency_profile()
    configs = matrix_configs(sr_grid)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        analyses: list[EntryAnalysis] = list(pool.map(lambda e: prepare_entry(e, options), entries))
        jobs = [(an, cfg) for an in analyses for cfg in configs]
        results = list(pool.map(lambda job: _safe_cell(job[0], job[1], mining, options), jobs))

    reports = []
    for i, an in enumerate(analyses):
        cells = results[i * len(configs):(i + 1) * len(configs)]
        report = entry_report(an, cells)
        reports.append(report)
        if options.persist:
            write_json(options.out_dir / an.entry.id / "entry.json", report.to_json())
    by_key = {(c.entry_id, c.config.key()): c for r in reports for c in r.cells}
    matrix = MatrixReport(reports, configs, [compare(c, by_key, ids) for c in comparisons(sr_grid)])
    if options.persist:
        write_json(options.out_dir / "matrix.json", matrix.to_json())
    return matrix


def _safe_cell(an: EntryAnalysis, cfg: StrategyConfig, mining, options: PipelineOptions) -> CellResult:
    try:
        return run_cell(an, cfg, mining, options)
    except Exception as exc:  # a broken cell must not abort the matrix
        log.exception("cell %s of %s failed", cfg.key(), an.entry.id)
        res = CellResult(an.entry.id, cfg, config_hash(cfg, as_profile(mining), options.top_k), status="failed")
        res.stage_errors["cell"] = f"{type(exc).__name__}: {exc}"
        return res


def dumps_report(matrix: MatrixReport) -> str:
    return json.dumps(matrix.to_json(), indent=2, sort_keys=True) + "\n"
