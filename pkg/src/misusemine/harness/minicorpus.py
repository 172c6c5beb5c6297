"""Builds the bundled mini-corpus: a small git project with one planted misuse and a local search corpus."""

from __future__ import annotations

import os
import shutil
import subprocess
from importlib import resources
from pathlib import Path

from .manifest import MisuseManifestEntry, dump_manifest

ENTRY_ID = "minicorpus-loader_1"
MISUSE_FILE = "src/main/java/com/example/app/Loader.java"
MISUSE_METHOD = "load"
MISUSED_IMPORTS = ("org.acme.io.DataReader",)
BASE_EPOCH = 1_600_000_000
IDENTITY = ("Mini Corpus", "mini@example.org")


def data_root() -> Path:
    return Path(str(resources.files("misusemine") / "data" / "minicorpus"))


def _git(cwd: Path, *args: str, env=None) -> str:
    name, email = IDENTITY
    cmd = ["git", "-c", f"user.name={name}", "-c", f"user.email={email}",
           "-c", "commit.gpgsign=false", "-c", "init.defaultBranch=main", *args]
    out = subprocess.run(cmd, cwd=cwd, env=env, check=True, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    return out.stdout.decode().strip()


def build_history(history_dir: Path, dest: Path) -> list[str]:
    """Replays snapshot directories (sorted by name) as commits with fixed dates; returns the hashes."""
    dest.mkdir(parents=True, exist_ok=True)
    _git(dest, "init", "-q")
    hashes = []
    for i, step in enumerate(sorted(p for p in history_dir.iterdir() if p.is_dir())):
        for child in dest.iterdir():
            if child.name != ".git":
                shutil.rmtree(child) if child.is_dir() else child.unlink()
        message = "snapshot"
        for src in sorted(step.rglob("*")):
            if src.is_dir():
                continue
            rel = src.relative_to(step)
            if rel.as_posix() == "MESSAGE":
                message = src.read_text(encoding="utf-8").strip()
                continue
            target = dest / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(src, target)
        stamp = f"{BASE_EPOCH + 3600 * i} +0000"
        env = dict(os.environ, GIT_AUTHOR_DATE=stamp, GIT_COMMITTER_DATE=stamp)
        _git(dest, "add", "-A", env=env)
        _git(dest, "commit", "-q", "-m", message, env=env)
        hashes.append(_git(dest, "rev-parse", "HEAD"))
    return hashes


def build_minicorpus(dest) -> Path:
    """Materialize project repo, corpus, fixing patterns and ``manifest.jsonl`` under ``dest``.

    Returns the manifest path. Commit hashes are reproducible because author,
    committer and dates are fixed.
    """
    dest = Path(dest)
    root = data_root()
    if dest.exists() and any(dest.iterdir()):
        raise FileExistsError(f"{dest} is not empty")
    hashes = build_history(root / "history", dest / "project")
    shutil.copytree(root / "corpus", dest / "corpus")
    shutil.copytree(root / "fixing-patterns", dest / "fixing-patterns")
    patterns = sorted(p.relative_to(dest).as_posix() for p in (dest / "fixing-patterns").glob("*.aug"))
    entry = MisuseManifestEntry(
        id=ENTRY_ID,
        repo_url_or_path="project",
        fixing_commit=hashes[-1],
        misused_imports=MISUSED_IMPORTS,
        misuse_file=MISUSE_FILE,
        misuse_method=MISUSE_METHOD,
        label="Misuse",
        corpus_dir="corpus",
        fixing_patterns=tuple(patterns),
    )
    manifest = dest / "manifest.jsonl"
    dump_manifest([entry], manifest)
    return manifest
