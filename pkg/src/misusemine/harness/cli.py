"""Command-line interface."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from ..aug import MethodRef, build_aug, loads_all
from ..detection import detect
from ..diff import CommitRef, misuse_introducing_commit
from ..errors import MisuseMineError
from ..filtering import (SearchImp, SearchLoc, StrategyConfig, as_ratio, filter_files, filter_methods,
                         iter_methods_with_ids, satisfaction_ratio)
from ..javalite.parser import parse_compilation_unit
from ..miner import MiningConfig, mine_patterns, patterns_from_text, rank_patterns
from ..search import FilesystemProvider, HttpProvider, Origin, SourceDoc, select_by_imports
from . import reports
from .manifest import load_manifest
from .matrix import dumps_report, run_matrix
from .minicorpus import build_minicorpus
from .pipeline import (MiningProfile, PipelineOptions, detection_profile, frequency_profile, locations,
                       prepare_entry, run_pipeline, write_json)

log = logging.getLogger("misusemine")

GLOBAL_DEFAULTS = {
    "provider": "fs",
    "provider_url": None,
    "corpus_dir": None,
    "workers": 1,
    "timeout_internal": 300.0,
    "timeout_external": 600.0,
    "min_support": None,
    "sr": "0",
    "method_filter": "on",
    "search_loc": "External",
    "search_imp": "AllImports",
    "top_k": "1,5,10,20",
    "out": "runs",
    "seed": None,
}


def _global_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("global options")
    g.add_argument("--config", help="JSON file with default values for any option")
    g.add_argument("--provider", choices=("http", "fs"), help="external code search provider")
    g.add_argument("--provider-url", help="base URL of the HTTP search provider")
    g.add_argument("--corpus-dir", help="corpus directory for the filesystem provider")
    g.add_argument("--workers", type=int, help="concurrent matrix cells")
    g.add_argument("--timeout-internal", type=float, help="mining timeout for internal search (s)")
    g.add_argument("--timeout-external", type=float, help="mining timeout for external search (s)")
    g.add_argument("--min-support", help="absolute (integer) or relative (fraction below 1) minimum support")
    g.add_argument("--sr", help="file satisfaction ratio threshold, e.g. 0.5 or 1/2")
    g.add_argument("--method-filter", choices=("on", "off"))
    g.add_argument("--search-loc", choices=[x.value for x in SearchLoc])
    g.add_argument("--search-imp", choices=[x.value for x in SearchImp])
    g.add_argument("--top-k", help="comma-separated k values")
    g.add_argument("--out", help="output directory")
    g.add_argument("--seed", type=int, help="seed for randomized tie-breaking (none is randomized)")
    g.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="misusemine", description="Change-based API misuse detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp)
        return sp

    sp = add("analyze-commit", "run the full pipeline for manifest entries under one configuration")
    sp.add_argument("manifest")
    sp.add_argument("--entry", action="append", help="entry id (repeatable; default all)")

    sp = add("mic", "find the misuse-introducing commit of a fixing commit")
    sp.add_argument("repo")
    sp.add_argument("fixing_commit")
    sp.add_argument("--file", action="append", dest="files", help="restrict to fixed file (repeatable)")

    sp = add("search", "list candidate documents of a manifest entry")
    sp.add_argument("manifest")
    sp.add_argument("--entry", help="entry id (default: first)")

    sp = add("filter", "apply the file and method filters to Java files")
    sp.add_argument("files", nargs="+")
    sp.add_argument("--keywords", required=True, help="comma-separated keyword set")

    sp = add("mine", "mine closed frequent patterns from AUG files or Java sources")
    sp.add_argument("inputs", nargs="+", help=".aug files or .java files")

    sp = add("detect", "classify usage AUGs against mined patterns")
    sp.add_argument("--usage", required=True, help=".aug file (or .java file with --method)")
    sp.add_argument("--method", help="method name when --usage is a Java file")
    sp.add_argument("--patterns", required=True, help="patterns file written by `mine`")

    sp = add("evaluate", "confusion counts, precision and recall from entry or matrix reports")
    sp.add_argument("reports", nargs="+", help="entry.json or matrix.json files")
    sp.add_argument("--cell", help="restrict to one configuration key")

    sp = add("matrix", "run the 40-configuration strategy matrix")
    sp.add_argument("manifest")

    sp = add("build-minicorpus", "materialize the bundled mini-corpus")
    sp.add_argument("dest")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    defaults = dict(GLOBAL_DEFAULTS)
    if args.config:
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        unknown = set(k.replace("-", "_") for k in loaded) - set(GLOBAL_DEFAULTS)
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
        defaults.update({k.replace("-", "_"): v for k, v in loaded.items()})
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


# ---------------------------------------------------------------- helpers

def strategy_from(args) -> StrategyConfig:
    return StrategyConfig(args.search_loc, args.search_imp, _ratio(args.sr), args.method_filter in ("on", True))


def _ratio(text) -> Fraction:
    if isinstance(text, (int, float)):
        return as_ratio(text)
    return as_ratio(Fraction(str(text)))


def top_k_from(args) -> tuple[int, ...]:
    if isinstance(args.top_k, (list, tuple)):
        return tuple(int(k) for k in args.top_k)
    return tuple(int(k) for k in str(args.top_k).split(",") if k.strip())


def mining_from(args, default: MiningProfile) -> MiningProfile:
    ti, te = float(args.timeout_internal), float(args.timeout_external)
    if args.min_support is None:
        base = default
        return MiningProfile(
            MiningConfig(base.internal.min_support_absolute, base.internal.min_support_relative, timeout=ti),
            MiningConfig(base.external.min_support_absolute, base.external.min_support_relative, timeout=te),
        )
    text = str(args.min_support)
    value = Fraction(text)
    if value.denominator == 1 and value >= 1:
        return MiningProfile(MiningConfig(min_support_absolute=int(value), timeout=ti),
                             MiningConfig(min_support_absolute=int(value), timeout=te))
    return MiningProfile(MiningConfig(min_support_relative=float(value), timeout=ti),
                         MiningConfig(min_support_relative=float(value), timeout=te))


def options_from(args) -> PipelineOptions:
    provider = None
    if args.provider == "http":
        if not args.provider_url:
            raise SystemExit("--provider http needs --provider-url")
        provider = HttpProvider(args.provider_url)
    elif args.corpus_dir:
        provider = FilesystemProvider(args.corpus_dir)
    return PipelineOptions(out_dir=Path(args.out), provider=provider, top_k=top_k_from(args))


def _entries(manifest: str, ids: Optional[Sequence[str]]):
    entries = load_manifest(manifest)
    if ids:
        wanted = set(ids)
        missing = wanted - {e.id for e in entries}
        if missing:
            raise SystemExit(f"unknown entry ids: {sorted(missing)}")
        entries = [e for e in entries if e.id in wanted]
    return entries


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _read_doc(path: str) -> SourceDoc:
    return SourceDoc(Origin.EXTERNAL, path, Path(path).read_text(encoding="utf-8", errors="replace"))


# --------------------------------------------------------------- commands

def cmd_analyze_commit(args) -> int:
    options = options_from(args)
    config = strategy_from(args)
    mining = mining_from(args, detection_profile())
    results = []
    for entry in _entries(args.manifest, args.entry):
        report = run_pipeline(entry, config, mining, options)
        results.append(report)
        cell = report.cells[0]
        print(f"{entry.id}: mic={report.mic and report.mic[:10]} A={report.all_methods} "
              f"C={report.changed_methods} E={report.external_api_methods} "
              f"verdict={cell.classification} status={cell.status}")
    rows = reports.report_reductions(results)
    options.out_dir.mkdir(parents=True, exist_ok=True)
    (options.out_dir / "reductions.csv").write_text(reports.reductions_csv(rows), encoding="utf-8")
    (options.out_dir / "cells.csv").write_text(reports.cells_csv(results), encoding="utf-8")
    return 0


def cmd_mic(args) -> int:
    found = misuse_introducing_commit(args.repo, CommitRef(args.repo, args.fixing_commit), args.files)
    print(found.commit_id)
    return 0


def cmd_search(args) -> int:
    entries = _entries(args.manifest, [args.entry] if args.entry else None)
    options = options_from(args)
    options.persist = False
    an = prepare_entry(entries[0], options)
    for stage, err in sorted(an.stage_errors.items()):
        print(f"# stage {stage} failed: {err}", file=sys.stderr)
    config = strategy_from(args)
    imports = (an.context.misused_import_names if config.search_imp is SearchImp.MISUSED_IMPORTS
               else an.context.api_import_names) if an.context else []
    out = {"keywords": sorted(an.keywords), "imports": imports, "docs": []}
    for loc in locations(config.search_loc):
        try:
            docs = select_by_imports(an.docs_for(loc, options), imports)
        except MisuseMineError as exc:
            print(f"# {loc.value} search failed: {exc}", file=sys.stderr)
            continue
        for d in docs:
            entry = {"origin": loc.value, "identity": d.identity, "rank": d.relevance_rank}
            if an.keywords:
                entry["sr"] = str(satisfaction_ratio(d, an.keywords))
            out["docs"].append(entry)
    _print_json(out)
    return 0


def cmd_filter(args) -> int:
    kws = [k.strip() for k in args.keywords.split(",") if k.strip()]
    docs = [_read_doc(p) for p in args.files]
    kept = filter_files(docs, kws, _ratio(args.sr))
    methods = filter_methods(kept, kws, args.method_filter == "on")
    _print_json({
        "files": [{"path": d.identity, "sr": str(satisfaction_ratio(d, kws))} for d in kept],
        "methods": [{"path": m.identity, "method": m.method.name, "method_id": m.method_id} for m in methods],
    })
    return 0


def _load_augs(paths: Sequence[str]):
    augs = []
    for p in paths:
        text = Path(p).read_text(encoding="utf-8")
        if p.endswith(".java"):
            unit = parse_compilation_unit(text, p)
            for _, m, mid in iter_methods_with_ids(unit):
                augs.append(build_aug(m, unit, MethodRef(p, m.name, mid)))
        else:
            augs.extend(g for g, _ in loads_all(text))
    return augs


def cmd_mine(args) -> int:
    augs = _load_augs(args.inputs)
    profile = mining_from(args, detection_profile())
    result = mine_patterns(augs, profile.external)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "patterns.aug").write_text("\n".join(p.to_text() for p in result), encoding="utf-8")
    write_json(out / "patterns.json", [p.to_json() for p in result])
    for r in rank_patterns(result):
        print(f"rank {r.rank:3d} support {r.pattern.support:4d} {r.pattern.pattern_id} "
              f"{len(r.pattern.graph.nodes)}n/{len(r.pattern.graph.edges)}e")
    if result.truncated:
        print(f"# truncated: {result.reason}", file=sys.stderr)
    return 0


def cmd_detect(args) -> int:
    if args.usage.endswith(".java"):
        usages = [a for a in _load_augs([args.usage]) if args.method is None or a.method_ref.method == args.method]
    else:
        usages = [g for g, _ in loads_all(Path(args.usage).read_text(encoding="utf-8"))]
    patterns = patterns_from_text(Path(args.patterns).read_text(encoding="utf-8"))
    _print_json([detect(u, patterns).to_json() for u in usages])
    return 0


def cmd_evaluate(args) -> int:
    entry_reports = []
    for p in args.reports:
        data = json.loads(Path(p).read_text(encoding="utf-8"))
        entry_reports.extend(data["entries"] if "entries" in data else [data])
    evals = reports.evaluate(entry_reports, args.cell)
    sys.stdout.write(reports.evaluation_csv(evals))
    return 0


def cmd_matrix(args) -> int:
    options = options_from(args)
    mining = mining_from(args, frequency_profile())
    matrix = run_matrix(_entries(args.manifest, None), mining=mining, options=options, workers=args.workers)
    out = options.out_dir
    out.mkdir(parents=True, exist_ok=True)
    data = matrix.to_json()
    (out / "matrix.json").write_text(dumps_report(matrix), encoding="utf-8")
    (out / "cells.csv").write_text(reports.cells_csv(matrix.entries), encoding="utf-8")
    (out / "comparisons.csv").write_text(reports.comparisons_csv(data), encoding="utf-8")
    rows = reports.report_reductions(matrix.entries)
    (out / "reductions.csv").write_text(reports.reductions_csv(rows), encoding="utf-8")
    (out / "evaluation.csv").write_text(reports.evaluation_csv(reports.evaluate(matrix.entries)), encoding="utf-8")
    statuses = {}
    for c in matrix.cells:
        statuses[c.status] = statuses.get(c.status, 0) + 1
    print(f"{len(matrix.cells)} cells: " + ", ".join(f"{k}={v}" for k, v in sorted(statuses.items())))
    print(f"reports written to {out}")
    return 0


def cmd_build_minicorpus(args) -> int:
    print(build_minicorpus(args.dest))
    return 0


COMMANDS = {
    "analyze-commit": cmd_analyze_commit,
    "mic": cmd_mic,
    "search": cmd_search,
    "filter": cmd_filter,
    "mine": cmd_mine,
    "detect": cmd_detect,
    "evaluate": cmd_evaluate,
    "matrix": cmd_matrix,
    "build-minicorpus": cmd_build_minicorpus,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (MisuseMineError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
