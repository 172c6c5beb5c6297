"""Run the 40-cell strategy matrix on the mini-corpus and print how often the fixing pattern shows up.

    python3 demos/strategy_matrix.py [workdir]
"""

import sys
import tempfile
from pathlib import Path

from misusemine.harness.manifest import load_manifest
from misusemine.harness.matrix import run_matrix
from misusemine.harness.minicorpus import build_minicorpus
from misusemine.harness.pipeline import PipelineOptions


def main(workdir: Path) -> None:
    entries = load_manifest(build_minicorpus(workdir / "mc"))
    matrix = run_matrix(entries, options=PipelineOptions(out_dir=workdir / "runs"), workers=4)

    print(f"{'configuration':34} {'docs':>5} {'augs':>5} {'pats':>5} {'freq':>6}  top1  verdict")
    for cell in matrix.cells:
        rpf = "-" if cell.rpf is None else f"{float(cell.rpf):.2f}"
        top1 = "yes" if cell.top_k.get(1, {}).get("pure") else "no"
        verdict = cell.classification or "-"
        print(f"{cell.config.key():34} {cell.docs_after_file_filter:5d} {cell.augs:5d} "
              f"{len(cell.patterns):5d} {rpf:>6}  {top1:4}  {verdict}")

    print("\npaired comparisons (one entry, so the tests have very little data):")
    for c in matrix.comparisons[:8]:
        j = c.to_json()
        print(f"  {j['strategy']:>12}  {j['condition']:48} {c.status}")
    print(f"\nfull reports in {workdir / 'runs'}")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        main(Path(sys.argv[1]))
    else:
        with tempfile.TemporaryDirectory() as tmp:
            main(Path(tmp))
