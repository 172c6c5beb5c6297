"""Misuse manifest: one JSON object per line."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

_HEX = re.compile(r"^[0-9a-fA-F]{4,64}$")
LABELS = ("Misuse", "Correct")


@dataclass(frozen=True)
class MisuseManifestEntry:
    id: str
    repo_url_or_path: str
    fixing_commit: str
    misused_imports: tuple[str, ...]
    misuse_file: str
    misuse_method: str
    label: Optional[str] = None
    commit: Optional[str] = None  # known misuse-introducing commit, skips the blame step
    corpus_dir: Optional[str] = None
    fixing_patterns: tuple[str, ...] = ()
    base_dir: str = field(default=".", compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "misused_imports", tuple(self.misused_imports or ()))
        object.__setattr__(self, "fixing_patterns", tuple(self.fixing_patterns or ()))
        if not self.id or "/" in self.id or self.id in (".", ".."):
            raise ValueError(f"invalid entry id {self.id!r}")
        if not _HEX.match(self.fixing_commit or ""):
            raise ValueError(f"{self.id}: fixing_commit {self.fixing_commit!r} is not a hex hash")
        if self.commit is not None and not _HEX.match(self.commit):
            raise ValueError(f"{self.id}: commit {self.commit!r} is not a hex hash")
        if self.label is not None and self.label not in LABELS:
            raise ValueError(f"{self.id}: label must be one of {LABELS}")

    def resolve(self, rel: Optional[str]) -> Optional[Path]:
        """Path relative to the manifest's directory (absolute paths pass through)."""
        if rel is None:
            return None
        p = Path(rel)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def is_remote(self) -> bool:
        return "://" in self.repo_url_or_path or self.repo_url_or_path.startswith("git@")

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "repo_url_or_path": self.repo_url_or_path,
            "fixing_commit": self.fixing_commit,
            "misused_imports": list(self.misused_imports),
            "misuse_file": self.misuse_file,
            "misuse_method": self.misuse_method,
            "label": self.label,
        }
        if self.commit is not None:
            out["commit"] = self.commit
        if self.corpus_dir is not None:
            out["corpus_dir"] = self.corpus_dir
        if self.fixing_patterns:
            out["fixing_patterns"] = list(self.fixing_patterns)
        return out


_FIELDS = {f for f in MisuseManifestEntry.__dataclass_fields__ if f != "base_dir"}


def parse_entry(obj: dict, base_dir=".") -> MisuseManifestEntry:
    unknown = set(obj) - _FIELDS
    if unknown:
        raise ValueError(f"unknown manifest fields: {sorted(unknown)}")
    return MisuseManifestEntry(**obj, base_dir=str(base_dir))


def load_manifest(path) -> list[MisuseManifestEntry]:
    path = Path(path)
    entries = []
    ids = set()
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            entry = parse_entry(json.loads(line), path.parent)
        except (ValueError, TypeError) as exc:
            raise ValueError(f"{path}:{n}: {exc}") from exc
        if entry.id in ids:
            raise ValueError(f"{path}:{n}: duplicate entry id {entry.id!r}")
        ids.add(entry.id)
        entries.append(entry)
    return entries


def dump_manifest(entries, path) -> None:
    lines = [json.dumps(e.to_json(), sort_keys=True) for e in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
