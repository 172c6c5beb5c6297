"""Changed-method extraction and misuse-introducing commit lookup over git."""

from __future__ import annotations

import logging
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .errors import JavaSyntaxError, NoBlamedLines, RepositoryAccessError
from .javalite import ast as A
from .javalite.parser import parse_compilation_unit

log = logging.getLogger(__name__)

EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"
_HEX = re.compile(r"^[0-9a-fA-F]{4,64}$")
_HUNK = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


@dataclass(frozen=True)
class CommitRef:
    repository_path: str
    commit_id: str

    def __post_init__(self):
        object.__setattr__(self, "repository_path", str(self.repository_path))
        if not _HEX.match(self.commit_id or ""):
            raise ValueError(f"commit id {self.commit_id!r} is not a hex hash")


@dataclass(frozen=True)
class MethodChange:
    file: str
    method_name: str
    method_id: int
    declaration_span: A.LineRange
    changed_lines: tuple[A.LineRange, ...]
    source_text: str = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "changed_lines", tuple(self.changed_lines))
        for r in self.changed_lines:
            if not r.overlaps(self.declaration_span):
                raise ValueError(f"changed range {r} lies outside {self.declaration_span}")

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.file, self.method_name, self.method_id)


@dataclass(frozen=True)
class FileDiff:
    old_path: Optional[str]
    new_path: Optional[str]
    removed: tuple[tuple[int, int], ...]  # pre-image (start, count), count may be 0
    added: tuple[tuple[int, int], ...]  # post-image (start, count), count may be 0


# ----------------------------------------------------------------------- git

def git(repo, *args: str) -> str:
    try:
        proc = subprocess.run(
            ["git", "-C", str(repo), *args],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, check=False,
        )
    except OSError as exc:
        raise RepositoryAccessError(f"cannot run git: {exc}") from exc
    if proc.returncode != 0:
        err = proc.stderr.decode("utf-8", errors="replace").strip()
        raise RepositoryAccessError(f"git {' '.join(args)} failed: {err}")
    return proc.stdout.decode("utf-8", errors="replace").replace("\r\n", "\n").replace("\r", "\n")


def resolve(repo, rev: str) -> str:
    return git(repo, "rev-parse", "--verify", rev + "^{commit}").strip()


def parent_of(repo, commit: str) -> Optional[str]:
    line = git(repo, "rev-list", "--parents", "-n", "1", commit).split()
    return line[1] if len(line) > 1 else None


def show_file(repo, commit: str, path: str) -> str:
    return git(repo, "show", f"{commit}:{path}")


def _unquote(path: str) -> str:
    if path.startswith('"') and path.endswith('"'):
        body = path[1:-1].encode("latin-1", errors="backslashreplace").decode("unicode_escape")
        return body.encode("latin-1", errors="replace").decode("utf-8", errors="replace")
    return path


def parse_unified_diff(text: str) -> list[FileDiff]:
    """Parse ``git diff --unified=0`` output into per-file hunk ranges."""
    files: list[FileDiff] = []
    old = new = None
    removed: list = []
    added: list = []
    in_file = False

    def flush():
        if in_file:
            files.append(FileDiff(old, new, tuple(removed), tuple(added)))

    for line in text.split("\n"):
        if line.startswith("diff --git "):
            flush()
            in_file, old, new, removed, added = True, None, None, [], []
        elif line.startswith("--- "):
            p = _unquote(line[4:].strip())
            old = None if p == "/dev/null" else p[2:] if p.startswith("a/") else p
        elif line.startswith("+++ "):
            p = _unquote(line[4:].strip())
            new = None if p == "/dev/null" else p[2:] if p.startswith("b/") else p
        elif line.startswith("@@"):
            m = _HUNK.match(line)
            if m:
                a, b = int(m.group(1)), int(m.group(2) or 1)
                c, d = int(m.group(3)), int(m.group(4) or 1)
                removed.append((a, b))
                added.append((c, d))
    flush()
    return files


def commit_diff(repo, commit: str, parent: Optional[str]) -> list[FileDiff]:
    base = parent if parent is not None else EMPTY_TREE
    out = git(repo, "diff", "--no-color", "--no-ext-diff", "--unified=0", "-M", base, commit, "--", "*.java")
    return [f for f in parse_unified_diff(out) if (f.new_path or f.old_path or "").endswith(".java")]


# ----------------------------------------------------------- changed methods

def methods_in(unit: A.CompilationUnit) -> list[tuple[A.MethodDecl, int]]:
    """Methods in file order with per-name occurrence ids."""
    seen: dict[str, int] = {}
    out = []
    for _, m in sorted(unit.iter_methods(), key=lambda tm: tm[1].start_offset):
        mid = seen.get(m.name, 0)
        seen[m.name] = mid + 1
        out.append((m, mid))
    return out


def changed_methods(commit: CommitRef, diagnostics: Optional[list] = None) -> list[MethodChange]:
    """Methods of the post-commit tree touched by the commit's diff.

    A method is changed when an added or modified line falls inside its
    declaration, or when a pure deletion sits inside it (checked against the
    same-named method of the parent revision).
    """
    repo = commit.repository_path
    sha = resolve(repo, commit.commit_id)
    parent = parent_of(repo, sha)
    result: list[MethodChange] = []
    for fd in commit_diff(repo, sha, parent):
        if fd.new_path is None:
            continue
        try:
            unit = parse_compilation_unit(show_file(repo, sha, fd.new_path), fd.new_path)
        except JavaSyntaxError as exc:
            log.warning("skipping unparseable %s at %s: %s", fd.new_path, sha[:10], exc)
            if diagnostics is not None:
                diagnostics.append({"kind": "ParseSkipped", "file": fd.new_path, "error": str(exc)})
            continue
        pre_spans: dict[str, list[A.LineRange]] = {}
        deletions = [(a, b, c) for (a, b), (c, d) in zip(fd.removed, fd.added) if d == 0]
        if deletions and parent is not None and fd.old_path is not None:
            try:
                old_unit = parse_compilation_unit(show_file(repo, parent, fd.old_path), fd.old_path)
                for _, m in old_unit.iter_methods():
                    pre_spans.setdefault(m.name, []).append(m.span)
            except JavaSyntaxError:
                pass
        for m, mid in methods_in(unit):
            span = m.span
            hits = []
            for c, d in fd.added:
                if d == 0:
                    continue
                r = A.LineRange(fd.new_path, c, c + d - 1)
                if r.overlaps(span):
                    hits.append(A.LineRange(fd.new_path, max(r.start, span.start), min(r.end, span.end)))
            for a, b, c in deletions:
                # git places a pure deletion between post-image lines c and c + 1
                inside_post = span.start <= c < span.end
                inside_pre = any(s.start <= a and a + b - 1 <= s.end for s in pre_spans.get(m.name, []))
                if inside_post and inside_pre:
                    hits.append(A.LineRange(fd.new_path, c, c))
            if hits:
                result.append(MethodChange(
                    fd.new_path, m.name, mid, span, tuple(_merge(hits)), unit.method_source(m),
                ))
    return result


def _merge(ranges: Sequence[A.LineRange]) -> list[A.LineRange]:
    out: list[A.LineRange] = []
    for r in sorted(ranges, key=lambda r: (r.start, r.end)):
        if out and r.start <= out[-1].end + 1:
            last = out.pop()
            out.append(A.LineRange(r.file, last.start, max(last.end, r.end)))
        else:
            out.append(r)
    return out


def count_methods(repo, commit: str, diagnostics: Optional[list] = None) -> int:
    """Number of method declarations across the ``.java`` files of a revision."""
    listing = git(repo, "ls-tree", "-r", "--name-only", commit)
    total = 0
    for path in listing.split("\n"):
        if not path.endswith(".java"):
            continue
        try:
            unit = parse_compilation_unit(show_file(repo, commit, path), path)
        except JavaSyntaxError as exc:
            if diagnostics is not None:
                diagnostics.append({"kind": "ParseSkipped", "file": path, "error": str(exc)})
            continue
        total += sum(1 for _ in unit.iter_methods())
    return total


# --------------------------------------------------------------------- SZZ

@dataclass(frozen=True)
class BlameLine:
    commit: str
    committer_time: int
    path: str
    line: int


def blame(repo, rev: str, path: str, start: int, end: int) -> list[BlameLine]:
    out = git(repo, "blame", "--line-porcelain", "-L", f"{start},{end}", rev, "--", path)
    lines: list[BlameLine] = []
    current: Optional[str] = None
    final_line = 0
    ctime = 0
    for raw in out.split("\n"):
        if not raw:
            continue
        if raw.startswith("\t"):
            if current is not None:
                lines.append(BlameLine(current, ctime, path, final_line))
            current = None
            continue
        parts = raw.split(" ")
        if current is None and re.fullmatch(r"[0-9a-f]{40}|[0-9a-f]{64}", parts[0]):
            current = parts[0]
            final_line = int(parts[2])
        elif parts[0] == "committer-time":
            ctime = int(parts[1])
    return lines


def misuse_introducing_commit(repo, fixing_commit: CommitRef, fixed_files: Optional[Sequence[str]] = None) -> CommitRef:
    """Latest commit that last touched the lines the fix removed or modified.

    "Latest" is by committer time; ties go to the lexicographically greatest hash.
    """
    repo = str(repo)
    sha = resolve(repo, fixing_commit.commit_id)
    parent = parent_of(repo, sha)
    if parent is None:
        raise NoBlamedLines(f"{sha[:10]} is a root commit; nothing to blame")
    wanted = None if fixed_files is None else {Path(p).as_posix() for p in fixed_files}
    blamed: dict[str, int] = {}
    for fd in commit_diff(repo, sha, parent):
        if fd.old_path is None:
            continue
        if wanted is not None and fd.old_path not in wanted and fd.new_path not in wanted:
            continue
        for a, b in fd.removed:
            if b == 0:
                continue
            for bl in blame(repo, parent, fd.old_path, a, a + b - 1):
                blamed[bl.commit] = bl.committer_time
    if not blamed:
        raise NoBlamedLines(f"{sha[:10]} only adds lines; no pre-existing line to blame")
    best = max(blamed.items(), key=lambda kv: (kv[1], kv[0]))[0]
    return CommitRef(repo, best)
