"""End-to-end detection for one manifest entry and one strategy configuration."""

from __future__ import annotations

import hashlib
import io
import json
import logging
import subprocess
import tarfile
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

from ..api import ApiContext, extract_context
from ..aug import Aug, MethodRef, build_aug, contains_relaxed, dumps
from ..detection import DetectionVerdict, FixingPattern, detect, relative_pattern_frequency
from ..diff import (CommitRef, MethodChange, changed_methods, git, methods_in,
                    misuse_introducing_commit, resolve, show_file)
from ..errors import JavaSyntaxError, MisuseMineError, RepositoryAccessError
from ..filtering import SearchImp, SearchLoc, StrategyConfig, filter_files, filter_methods
from ..javalite import ast as A
from ..javalite.parser import parse_compilation_unit
from ..miner import (TIMEOUT_EXTERNAL_S, TIMEOUT_INTERNAL_S, MiningConfig, MiningResult, Pattern,
                     graph_fingerprint, mine_patterns, rank_patterns, top_at_k)
from ..search import (FilesystemProvider, SearchProvider, SourceDoc, external_candidates,
                      internal_candidates, origin_prefix, select_by_imports)
from .manifest import MisuseManifestEntry

log = logging.getLogger(__name__)

TOP_K = (1, 5, 10, 20)
AUG_FILE_BUDGET_S = 30.0


# ------------------------------------------------------------------ configs

@dataclass(frozen=True)
class MiningProfile:
    """Mining settings per search location."""

    internal: MiningConfig
    external: MiningConfig

    def for_origin(self, loc: SearchLoc) -> MiningConfig:
        return self.internal if loc is SearchLoc.INTERNAL else self.external

    def to_json(self) -> dict:
        return {"internal": _mining_json(self.internal), "external": _mining_json(self.external)}


def _mining_json(m: MiningConfig) -> dict:
    return {
        "min_support_absolute": m.min_support_absolute,
        "min_support_relative": m.min_support_relative,
        "max_pattern_nodes": m.max_pattern_nodes,
        "timeout": m.timeout,
    }


def detection_profile(timeout_internal=TIMEOUT_INTERNAL_S, timeout_external=TIMEOUT_EXTERNAL_S) -> MiningProfile:
    return MiningProfile(MiningConfig(min_support_absolute=2, timeout=timeout_internal),
                         MiningConfig(min_support_absolute=10, timeout=timeout_external))


def frequency_profile(timeout_internal=TIMEOUT_INTERNAL_S, timeout_external=TIMEOUT_EXTERNAL_S) -> MiningProfile:
    return MiningProfile(MiningConfig(min_support_relative=0.08, timeout=timeout_internal),
                         MiningConfig(min_support_relative=0.004, timeout=timeout_external))


def as_profile(mining: Union[MiningConfig, MiningProfile]) -> MiningProfile:
    return mining if isinstance(mining, MiningProfile) else MiningProfile(mining, mining)


@dataclass
class PipelineOptions:
    out_dir: Path = Path("runs")
    provider: Optional[SearchProvider] = None  # external provider; defaults to the entry's corpus dir
    top_k: tuple[int, ...] = TOP_K
    match_mode: str = "token"
    aug_file_budget_s: float = AUG_FILE_BUDGET_S
    session_cap: int = 1000
    page_size: int = 100
    persist: bool = True

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        self.top_k = tuple(sorted(set(self.top_k)))


def config_hash(config: StrategyConfig, mining: MiningProfile, top_k: Sequence[int]) -> str:
    canon = json.dumps({"strategy": config.to_json(), "mining": mining.to_json(), "top_k": list(top_k)},
                       sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


# ------------------------------------------------------------ entry stages

@dataclass
class ChangedMethodInfo:
    change: MethodChange
    method: Optional[A.MethodDecl]
    context: Optional[ApiContext]

    def to_json(self) -> dict:
        c = self.change
        return {
            "file": c.file,
            "method": c.method_name,
            "method_id": c.method_id,
            "span": [c.declaration_span.start, c.declaration_span.end],
            "changed_lines": [[r.start, r.end] for r in c.changed_lines],
            "api_imports": [] if self.context is None else self.context.api_import_names,
            "keywords": [] if self.context is None else sorted(self.context.keywords),
        }


@dataclass
class EntryAnalysis:
    """Per-entry state shared by all configurations of that entry."""

    entry: MisuseManifestEntry
    repo: Optional[Path] = None
    mic: Optional[str] = None
    mic_from_manifest: bool = False
    changed: list[ChangedMethodInfo] = field(default_factory=list)
    all_methods: Optional[int] = None
    misuse_unit: Optional[A.CompilationUnit] = None
    misuse_method: Optional[A.MethodDecl] = None
    context: Optional[ApiContext] = None
    misuse_aug: Optional[Aug] = None
    fix: Optional[FixingPattern] = None
    tree_dir: Optional[Path] = None
    provider: Optional[SearchProvider] = None
    stage_errors: dict[str, str] = field(default_factory=dict)
    diagnostics: list[dict] = field(default_factory=list)
    _docs: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _aug_cache: dict = field(default_factory=dict, repr=False)

    @property
    def changed_count(self) -> int:
        return len(self.changed)

    @property
    def external_api_count(self) -> int:
        return sum(1 for c in self.changed if c.context is not None and c.context.api_imports)

    @property
    def keywords(self) -> frozenset:
        return self.context.keywords if self.context is not None else frozenset()

    def docs_for(self, loc: SearchLoc, options: PipelineOptions) -> list[SourceDoc]:
        """Candidate docs for a single search location, computed once and shared."""
        with self._lock:
            if loc not in self._docs:
                try:
                    self._docs[loc] = ("ok", self._search(loc, options))
                except Exception as exc:  # recorded per cell, never fatal for other locations
                    log.warning("%s search failed for %s: %s", loc.value, self.entry.id, exc)
                    self._docs[loc] = ("error", f"{type(exc).__name__}: {exc}")
            status, value = self._docs[loc]
        if status == "error":
            raise SearchFailed(value)
        return value

    def _search(self, loc: SearchLoc, options: PipelineOptions) -> list[SourceDoc]:
        if self.context is None:
            raise MisuseMineError("no API context for the misuse method")
        if loc is SearchLoc.INTERNAL:
            if self.tree_dir is None:
                raise MisuseMineError("project tree of the misuse-introducing commit is unavailable")
            diags: list = []
            docs = internal_candidates(self.tree_dir, self.entry.misuse_file, diags)
            self.diagnostics.extend(diags)
            return docs
        if self.provider is None:
            raise MisuseMineError("no external search provider configured")
        if not self.context.api_imports:
            return []
        diags = []
        docs = external_candidates(self.context, self.provider, origin_prefix(self.misuse_unit.package_name),
                                   options.session_cap, options.page_size, diags)
        self.diagnostics.extend(diags)
        return docs

    def aug_of(self, origin: str, found) -> Aug:
        key = (origin, found.identity, found.method.name, found.method_id, found.method.start_offset)
        with self._lock:
            cached = self._aug_cache.get(key)
        if cached is None:
            ref = MethodRef(f"{origin}:{found.identity}", found.method.name, found.method_id)
            cached = build_aug(found.method, found.unit, ref)
            with self._lock:
                cached = self._aug_cache.setdefault(key, cached)
        return cached


class SearchFailed(MisuseMineError):
    pass


def _resolve_repo(entry: MisuseManifestEntry, out_dir: Path) -> Path:
    if entry.is_remote:
        dest = out_dir / "_repos" / entry.id
        if not (dest / ".git").exists() and not (dest / "HEAD").exists():
            dest.parent.mkdir(parents=True, exist_ok=True)
            proc = subprocess.run(["git", "clone", "-q", entry.repo_url_or_path, str(dest)],
                                  stdout=subprocess.PIPE, stderr=subprocess.PIPE)
            if proc.returncode != 0:
                raise RepositoryAccessError(proc.stderr.decode(errors="replace").strip())
        return dest
    return entry.resolve(entry.repo_url_or_path)


def _materialize_tree(repo: Path, commit: str, dest: Path) -> Path:
    """Extract the revision's tree via ``git archive`` (idempotent)."""
    done = dest / ".complete"
    if done.exists():
        return dest
    dest.mkdir(parents=True, exist_ok=True)
    proc = subprocess.run(["git", "-C", str(repo), "archive", "--format=tar", commit],
                          stdout=subprocess.PIPE, stderr=subprocess.PIPE, check=False)
    if proc.returncode != 0:
        raise RepositoryAccessError(proc.stderr.decode(errors="replace").strip())
    with tarfile.open(fileobj=io.BytesIO(proc.stdout)) as tar:
        members = [m for m in tar.getmembers()
                   if (m.isfile() or m.isdir()) and not (m.name.startswith("/") or ".." in Path(m.name).parts)]
        tar.extractall(dest, members=members)
    done.write_text(commit)
    return dest


def count_unique_methods(repo, commit: str, diagnostics: Optional[list] = None) -> int:
    """Method declarations across the revision's ``.java`` files, counting identical files once."""
    listing = git(repo, "ls-tree", "-r", commit)
    seen: set[str] = set()
    total = 0
    for line in listing.split("\n"):
        if not line.strip():
            continue
        meta, path = line.split("\t", 1)
        blob = meta.split()[2]
        if not path.endswith(".java"):
            continue
        text = show_file(repo, commit, path)
        digest = hashlib.md5(text.encode("utf-8")).hexdigest()
        if digest in seen:
            continue
        seen.add(digest)
        try:
            unit = parse_compilation_unit(text, path)
        except JavaSyntaxError as exc:
            if diagnostics is not None:
                diagnostics.append({"kind": "ParseSkipped", "file": path, "blob": blob, "error": str(exc)})
            continue
        total += sum(1 for _ in unit.iter_methods())
    return total


def _stage(analysis: EntryAnalysis, name: str, fn):
    try:
        return fn()
    except Exception as exc:
        log.warning("stage %s failed for %s: %s", name, analysis.entry.id, exc)
        analysis.stage_errors[name] = f"{type(exc).__name__}: {exc}"
        return None


def prepare_entry(entry: MisuseManifestEntry, options: PipelineOptions) -> EntryAnalysis:
    """Repository stages: misuse-introducing commit, changed methods, API context, search inputs."""
    an = EntryAnalysis(entry)
    an.repo = _stage(an, "repository", lambda: _resolve_repo(entry, options.out_dir))
    if entry.fixing_patterns:
        def load_fix():
            variants = []
            for p in entry.fixing_patterns:
                variants.extend(FixingPattern.from_text(entry.resolve(p).read_text(encoding="utf-8")).variants)
            return FixingPattern(tuple(variants))
        an.fix = _stage(an, "fixing_patterns", load_fix)
    if options.provider is not None:
        an.provider = options.provider
    elif entry.corpus_dir is not None:
        an.provider = FilesystemProvider(entry.resolve(entry.corpus_dir))
    if an.repo is None:
        return an

    if entry.commit is not None:
        an.mic = _stage(an, "mic", lambda: resolve(an.repo, entry.commit))
        an.mic_from_manifest = True
    else:
        found = _stage(an, "mic", lambda: misuse_introducing_commit(
            an.repo, CommitRef(str(an.repo), entry.fixing_commit), [entry.misuse_file]))
        an.mic = None if found is None else found.commit_id
    if an.mic is None:
        return an

    an.all_methods = _stage(an, "count_methods", lambda: count_unique_methods(an.repo, an.mic, an.diagnostics))
    changes = _stage(an, "changed_methods", lambda: changed_methods(CommitRef(str(an.repo), an.mic), an.diagnostics))
    units: dict[str, Optional[A.CompilationUnit]] = {}

    def unit_of(path: str):
        if path not in units:
            try:
                units[path] = parse_compilation_unit(show_file(an.repo, an.mic, path), path)
            except (JavaSyntaxError, MisuseMineError) as exc:
                an.diagnostics.append({"kind": "ParseSkipped", "file": path, "error": str(exc)})
                units[path] = None
        return units[path]

    misused = list(entry.misused_imports)
    for ch in changes or []:
        unit = unit_of(ch.file)
        method = ctx = None
        if unit is not None:
            for m, mid in methods_in(unit):
                if m.name == ch.method_name and mid == ch.method_id:
                    method = m
                    break
        if method is not None:
            ctx = extract_context(method, unit, ch, misused)
        an.changed.append(ChangedMethodInfo(ch, method, ctx))

    def locate():
        unit = unit_of(entry.misuse_file)
        if unit is None:
            raise MisuseMineError(f"{entry.misuse_file} cannot be read at {an.mic[:10]}")
        candidates = [(m, mid) for m, mid in methods_in(unit) if m.name == entry.misuse_method]
        if not candidates:
            raise MisuseMineError(f"method {entry.misuse_method} not found in {entry.misuse_file}")
        changed_ids = {c.change.method_id for c in an.changed
                       if c.change.file == entry.misuse_file and c.change.method_name == entry.misuse_method}
        chosen = next(((m, mid) for m, mid in candidates if mid in changed_ids), candidates[0])
        return unit, chosen
    located = _stage(an, "locate_misuse", locate)
    if located is not None:
        unit, (method, mid) = located
        an.misuse_unit, an.misuse_method = unit, method
        ref = MethodRef(f"misuse:{entry.misuse_file}", method.name, mid)
        an.context = extract_context(method, unit, ref, misused)
        an.misuse_aug = _stage(an, "misuse_aug", lambda: build_aug(method, unit, ref))

    tree = options.out_dir / entry.id / f"tree-{an.mic[:12]}"
    an.tree_dir = _stage(an, "materialize_tree", lambda: _materialize_tree(an.repo, an.mic, tree))
    return an


# --------------------------------------------------------------- one cell

@dataclass
class CellResult:
    entry_id: str
    config: StrategyConfig
    config_hash: str
    status: str = "ok"  # ok | partial | skipped | failed
    skip_reason: str = ""
    stage_errors: dict[str, str] = field(default_factory=dict)
    docs_found: int = 0
    docs_after_file_filter: int = 0
    methods: int = 0
    augs: int = 0
    rpf: Optional[Fraction] = None
    thresholds: dict[str, int] = field(default_factory=dict)
    truncated: list[str] = field(default_factory=list)
    patterns: list[Pattern] = field(default_factory=list)
    top_k: dict[int, dict] = field(default_factory=dict)
    verdict: Optional[DetectionVerdict] = None
    diagnostics: list[dict] = field(default_factory=list)

    @property
    def classification(self) -> Optional[str]:
        return None if self.verdict is None else self.verdict.classification.value

    def to_json(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "cell": self.config.key(),
            "config": self.config.to_json(),
            "config_hash": self.config_hash,
            "status": self.status,
            "skip_reason": self.skip_reason,
            "stage_errors": dict(sorted(self.stage_errors.items())),
            "counts": {
                "docs_found": self.docs_found,
                "docs_after_file_filter": self.docs_after_file_filter,
                "methods": self.methods,
                "augs": self.augs,
                "patterns": len(self.patterns),
            },
            "relative_pattern_frequency": None if self.rpf is None else {
                "numerator": self.rpf.numerator, "denominator": self.rpf.denominator, "value": float(self.rpf),
            },
            "mining": {"thresholds": dict(sorted(self.thresholds.items())), "truncated": sorted(self.truncated)},
            "top_k": {str(k): v for k, v in sorted(self.top_k.items())},
            "verdict": None if self.verdict is None else self.verdict.to_json(),
            "diagnostics": self.diagnostics,
        }


def locations(loc: SearchLoc) -> list[SearchLoc]:
    return [SearchLoc.INTERNAL, SearchLoc.EXTERNAL] if loc is SearchLoc.BOTH else [loc]


def _merge_patterns(groups: Sequence[Sequence[Pattern]]) -> list[Pattern]:
    """Union by fingerprint; a duplicate keeps the higher-support pattern."""
    merged: dict[str, Pattern] = {}
    for group in groups:
        for p in group:
            old = merged.get(p.fingerprint)
            if old is None or p.support > old.support:
                merged[p.fingerprint] = p
    return sorted(merged.values(), key=lambda p: (-p.support, p.fingerprint))


def top_k_hits(patterns: Sequence[Pattern], fix: Optional[FixingPattern], ks: Sequence[int]) -> dict[int, dict]:
    """Per k: whether a fix variant appears among the Top@k patterns.

    ``pure`` needs a pattern isomorphic (by fingerprint) to a variant;
    ``relaxed`` also accepts a pattern that contains a variant.
    """
    if fix is None:
        return {}
    fps = {graph_fingerprint(v) for v in fix.variants}
    ranked = rank_patterns(patterns)
    out = {}
    for k in ks:
        top = top_at_k(ranked, k)
        pure = [r for r in top if r.pattern.fingerprint in fps]
        relaxed = [r for r in top if r.pattern.fingerprint in fps
                   or any(contains_relaxed(v, r.pattern.graph) for v in fix.variants)]
        out[k] = {
            "pure": bool(pure),
            "relaxed": bool(relaxed),
            "best_rank": min((r.rank for r in relaxed), default=None),
            "patterns_in_top": len(top),
        }
    return out


def run_cell(an: EntryAnalysis, config: StrategyConfig, mining: Union[MiningConfig, MiningProfile],
             options: PipelineOptions) -> CellResult:
    profile = as_profile(mining)
    res = CellResult(an.entry.id, config, config_hash(config, profile, options.top_k))
    if config.search_imp is SearchImp.MISUSED_IMPORTS and not an.entry.misused_imports:
        res.status, res.skip_reason = "skipped", "entry lists no misused imports"
        return _finish(an, res, [], [], options)
    if an.context is None:
        res.status = "failed"
        res.stage_errors.update(an.stage_errors)
        res.stage_errors.setdefault("context", "no API context for the misuse method")
        return _finish(an, res, [], [], options)
    if not an.context.api_imports:
        res.verdict = detect(an.misuse_aug, []) if an.misuse_aug is not None else None
        res.skip_reason = "misuse method uses no third-party API"
        return _finish(an, res, [], [], options)

    if config.search_imp is SearchImp.MISUSED_IMPORTS:
        imports = an.context.misused_import_names
    else:
        imports = an.context.api_import_names
    kws = an.keywords
    all_augs: list[Aug] = []
    found_all = []
    pattern_groups = []
    for loc in locations(config.search_loc):
        try:
            docs = an.docs_for(loc, options)
        except SearchFailed as exc:
            res.stage_errors[f"search_{loc.value.lower()}"] = str(exc)
            continue
        docs = select_by_imports(docs, imports)
        res.docs_found += len(docs)
        try:
            kept = filter_files(docs, kws, config.sr, options.match_mode)
        except MisuseMineError as exc:
            res.stage_errors[f"filter_files_{loc.value.lower()}"] = f"{type(exc).__name__}: {exc}"
            continue
        res.docs_after_file_filter += len(kept)
        found = filter_methods(kept, kws, config.method_filter, res.diagnostics)
        res.methods += len(found)
        augs = _build_augs(an, loc, found, options, res)
        all_augs.extend(augs)
        found_all.extend((loc, f) for f in found)
        cfg = profile.for_origin(loc)
        if augs:
            mined: MiningResult = mine_patterns(augs, cfg)
            res.thresholds[loc.value] = cfg.threshold(len(augs))
            if mined.truncated:
                res.truncated.append(f"{loc.value}: {mined.reason}")
            pattern_groups.append(list(mined))
    res.augs = len(all_augs)
    res.patterns = _merge_patterns(pattern_groups)
    if an.fix is not None:
        res.rpf = relative_pattern_frequency(an.fix, all_augs) if all_augs else Fraction(0)
    res.top_k = top_k_hits(res.patterns, an.fix, options.top_k)
    if an.misuse_aug is not None:
        res.verdict = detect(an.misuse_aug, res.patterns)
    else:
        res.stage_errors["detect"] = "misuse method AUG unavailable"
    if res.stage_errors:
        res.status = "partial"
    return _finish(an, res, found_all, all_augs, options)


def _build_augs(an: EntryAnalysis, loc: SearchLoc, found, options: PipelineOptions, res: CellResult) -> list[Aug]:
    out: list[Aug] = []
    started: dict[str, float] = {}
    over: set[str] = set()
    for f in found:
        ident = f.identity
        if ident in over:
            continue
        t0 = started.setdefault(ident, time.monotonic())
        try:
            out.append(an.aug_of(loc.value, f))
        except (MisuseMineError, RecursionError) as exc:
            res.diagnostics.append({"kind": "AugFailed", "doc": ident, "method": f.method.name, "error": str(exc)})
        if time.monotonic() - t0 > options.aug_file_budget_s:
            over.add(ident)
            res.diagnostics.append({"kind": "AugBudgetExceeded", "doc": ident})
    return out


def _finish(an: EntryAnalysis, res: CellResult, found, augs, options: PipelineOptions) -> CellResult:
    if options.persist:
        try:
            persist_cell(an, res, found, augs, options.out_dir / an.entry.id / res.config_hash)
        except OSError as exc:
            res.stage_errors["persist"] = f"{type(exc).__name__}: {exc}"
    return res


def _safe(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def persist_cell(an: EntryAnalysis, res: CellResult, found, augs, cell_dir: Path) -> None:
    for sub in ("methods", "docs", "augs", "patterns"):
        (cell_dir / sub).mkdir(parents=True, exist_ok=True)
    docs_index = {}
    methods_index = []
    for i, (loc, f) in enumerate(found):
        doc_key = f"{loc.value}:{f.identity}"
        if doc_key not in docs_index:
            name = f"{len(docs_index):04d}-{_safe(Path(f.identity).name)}"
            (cell_dir / "docs" / name).write_text(f.doc.raw_text, encoding="utf-8")
            docs_index[doc_key] = name
        mname = f"{i:04d}-{_safe(f.method.name)}.java"
        (cell_dir / "methods" / mname).write_text(f.unit.method_source(f.method), encoding="utf-8")
        methods_index.append({"file": mname, "doc": doc_key, "method": f.method.name, "method_id": f.method_id})
    write_json(cell_dir / "docs" / "index.json", docs_index)
    write_json(cell_dir / "methods" / "index.json", methods_index)
    (cell_dir / "augs" / "usages.aug").write_text("\n".join(dumps(g) for g in augs), encoding="utf-8")
    if an.misuse_aug is not None:
        (cell_dir / "augs" / "misuse.aug").write_text(dumps(an.misuse_aug), encoding="utf-8")
    (cell_dir / "patterns" / "patterns.aug").write_text("\n".join(p.to_text() for p in res.patterns),
                                                        encoding="utf-8")
    write_json(cell_dir / "patterns" / "patterns.json", [p.to_json() for p in res.patterns])
    write_json(cell_dir / "verdicts.json", [] if res.verdict is None else [res.verdict.to_json()])
    write_json(cell_dir / "report.json", res.to_json())


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# --------------------------------------------------------------- run report

def _percent(num: int, den: int) -> float:
    return round(100.0 * num / den, 6)


@dataclass
class RunReport:
    entry_id: str
    label: Optional[str]
    mic: Optional[str]
    all_methods: Optional[int]
    changed_methods: int
    external_api_methods: int
    import_counts: list[int]
    keyword_counts: list[int]
    changed: list[dict]
    stage_errors: dict[str, str]
    cells: list[CellResult]
    diagnostics: list[dict]

    def __post_init__(self):
        if self.all_methods is not None and not self.all_methods >= self.changed_methods >= self.external_api_methods >= 0:
            raise ValueError("method counts must satisfy A >= C >= E >= 0")

    @property
    def a2c(self) -> Optional[float]:
        if not self.all_methods:
            return None
        return _percent(self.all_methods - self.changed_methods, self.all_methods)

    @property
    def c2e(self) -> float:
        if self.changed_methods == 0:
            return 0.0
        return _percent(self.changed_methods - self.external_api_methods, self.changed_methods)

    @property
    def c2e_flagged(self) -> bool:
        return self.changed_methods == 0

    @property
    def verdicts(self) -> list[dict]:
        return [{"cell": c.config.key(), **c.verdict.to_json()} for c in self.cells if c.verdict is not None]

    def to_json(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "label": self.label,
            "misuse_introducing_commit": self.mic,
            "counts": {"all": self.all_methods, "changed": self.changed_methods,
                       "external_api": self.external_api_methods},
            "reductions": {"a2c": self.a2c, "c2e": self.c2e, "c2e_flagged": self.c2e_flagged},
            "import_counts": self.import_counts,
            "keyword_counts": self.keyword_counts,
            "changed": self.changed,
            "stage_errors": dict(sorted(self.stage_errors.items())),
            "cells": [c.to_json() for c in self.cells],
            "verdicts": self.verdicts,
            "diagnostics": self.diagnostics,
        }


def entry_report(an: EntryAnalysis, cells: Sequence[CellResult]) -> RunReport:
    with_api = [c for c in an.changed if c.context is not None and c.context.api_imports]
    return RunReport(
        entry_id=an.entry.id,
        label=an.entry.label,
        mic=an.mic,
        all_methods=an.all_methods,
        changed_methods=an.changed_count,
        external_api_methods=an.external_api_count,
        import_counts=[len(c.context.api_imports) for c in with_api],
        keyword_counts=[len(c.context.keywords) for c in with_api],
        changed=[c.to_json() for c in an.changed],
        stage_errors=dict(an.stage_errors),
        cells=list(cells),
        # search diagnostics arrive in thread order; sort for stable output
        diagnostics=sorted(an.diagnostics, key=lambda d: json.dumps(d, sort_keys=True)),
    )


def run_pipeline(entry: MisuseManifestEntry, config: StrategyConfig,
                 mining: Union[MiningConfig, MiningProfile, None] = None,
                 options: Optional[PipelineOptions] = None) -> RunReport:
    """Full detection run for one entry under one strategy configuration."""
    options = options or PipelineOptions()
    mining = mining if mining is not None else detection_profile()
    an = prepare_entry(entry, options)
    cell = run_cell(an, config, mining, options)
    report = entry_report(an, [cell])
    if options.persist:
        write_json(options.out_dir / entry.id / "entry.json", report.to_json())
    return report
