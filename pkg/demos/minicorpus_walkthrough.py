"""Walk one manifest entry through every pipeline stage on the bundled mini-corpus.

    python3 demos/minicorpus_walkthrough.py [workdir]
"""

import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from misusemine.aug import to_dot
from misusemine.filtering import StrategyConfig
from misusemine.harness.manifest import load_manifest
from misusemine.harness.minicorpus import build_minicorpus
from misusemine.harness.pipeline import PipelineOptions, prepare_entry, run_cell
from misusemine.miner import MiningConfig, rank_patterns


def main(workdir: Path) -> None:
    manifest = build_minicorpus(workdir / "mc")
    (entry,) = load_manifest(manifest)
    options = PipelineOptions(out_dir=workdir / "runs", persist=False)

    an = prepare_entry(entry, options)
    print(f"entry            {entry.id}")
    print(f"fixing commit    {entry.fixing_commit[:12]}")
    print(f"introducing      {an.mic[:12]}")
    print(f"methods A/C/E    {an.all_methods} / {an.changed_count} / {an.external_api_count}")
    print(f"API imports      {', '.join(an.context.api_import_names)}")
    print(f"keywords         {', '.join(sorted(an.keywords))}")

    config = StrategyConfig("External", "AllImports", Fraction(1, 2), True)
    cell = run_cell(an, config, MiningConfig(min_support_absolute=3), options)
    print(f"\nconfiguration    {config.key()}")
    print(f"documents        {cell.docs_found} found, {cell.docs_after_file_filter} after the file filter")
    print(f"methods / AUGs   {cell.methods} / {cell.augs}")
    print(f"fixing pattern   relative frequency {cell.rpf} among the mined methods")
    for r in rank_patterns(cell.patterns):
        g = r.pattern.graph
        print(f"  rank {r.rank}: support {r.pattern.support}, {len(g.nodes)} nodes, {len(g.edges)} edges")
    top1 = cell.top_k[1]
    print(f"Top@1            pure={top1['pure']} relaxed={top1['relaxed']}")

    v = cell.verdict
    print(f"\nverdict          {v.classification.value} (overlap {v.overlap})")
    print("\nmisuse AUG (Graphviz):")
    print(to_dot(an.misuse_aug, "misuse"))


if __name__ == "__main__":
    if len(sys.argv) > 1:
        main(Path(sys.argv[1]))
    else:
        with tempfile.TemporaryDirectory() as tmp:
            main(Path(tmp))
