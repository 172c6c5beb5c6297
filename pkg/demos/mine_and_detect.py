"""Mine usage patterns from a handful of Java snippets and check a suspicious method against them.

    python3 demos/mine_and_detect.py
"""

from misusemine.aug import MethodRef, build_aug
from misusemine.detection import detect
from misusemine.filtering import iter_methods_with_ids
from misusemine.javalite import parse_compilation_unit
from misusemine.miner import MiningConfig, mine_patterns, rank_patterns

CORRECT_USES = [
    """import java.io.FileInputStream;
    class A { int first(String p) throws Exception {
        FileInputStream in = new FileInputStream(p);
        int b = in.read();
        in.close();
        return b;
    } }""",
    """import java.io.FileInputStream;
    class B { void copy(String p) throws Exception {
        FileInputStream s = new FileInputStream(p);
        s.read();
        s.close();
    } }""",
    """import java.io.FileInputStream;
    class C { int peek(String name) throws Exception {
        FileInputStream f = new FileInputStream(name);
        int v = f.read();
        f.close();
        return v;
    } }""",
]

SUSPECT = """import java.io.FileInputStream;
class D { int leak(String p) throws Exception {
    FileInputStream in = new FileInputStream(p);
    int b = in.read();
    return b;
} }"""


def augs_of(source: str, doc: str):
    unit = parse_compilation_unit(source, doc)
    return [build_aug(m, unit, MethodRef(doc, m.name, mid)) for _, m, mid in iter_methods_with_ids(unit)]


def main() -> None:
    corpus = [g for i, src in enumerate(CORRECT_USES) for g in augs_of(src, f"use{i}.java")]
    patterns = mine_patterns(corpus, MiningConfig(min_support_absolute=3))
    print(f"{len(corpus)} usage graphs, {len(patterns)} closed frequent patterns")
    for r in rank_patterns(patterns):
        labels = sorted(n.label for n in r.pattern.graph.nodes)
        print(f"  rank {r.rank} support {r.pattern.support}: {labels}")

    (suspect,) = augs_of(SUSPECT, "suspect.java")
    verdict = detect(suspect, patterns)
    print(f"\nsuspect.java#leak -> {verdict.classification.value}, overlap {verdict.overlap}")
    if verdict.best_pattern is not None:
        missing = {n.label for n in verdict.best_pattern.graph.nodes} - {n.label for n in suspect.nodes}
        print(f"pattern elements absent from the method: {sorted(missing)}")


if __name__ == "__main__":
    main()
