"""Candidate retrieval: same-project files and external search providers."""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Protocol, Sequence

from .api import ApiContext, package_prefix
from .errors import ProviderError

log = logging.getLogger(__name__)

SESSION_CAP = 1000
PAGE_SIZE = 100
_PACKAGE = re.compile(r"^\s*package\s+([\w.]+)\s*;", re.MULTILINE)
_IMPORT = re.compile(r"^\s*import\s+(static\s+)?([\w.]+?)(\.\*)?\s*;", re.MULTILINE)
_COMMENTS = re.compile(r"/\*.*?\*/|//[^\n]*", re.DOTALL)


class Origin(str, Enum):
    INTERNAL = "Internal"
    EXTERNAL = "External"


@dataclass(frozen=True)
class SourceDoc:
    origin: Origin
    identity: str
    raw_text: str = field(repr=False)
    relevance_rank: int = 0

    @cached_property
    def package_name(self) -> str:
        m = _PACKAGE.search(_COMMENTS.sub(" ", self.raw_text))
        return m.group(1) if m else ""

    @cached_property
    def import_lines(self) -> frozenset:
        """Imported names; wildcard imports keep their trailing ``.*``."""
        text = _COMMENTS.sub(" ", self.raw_text)
        out = set()
        for m in _IMPORT.finditer(text):
            out.add(m.group(2) + (m.group(3) or ""))
        return frozenset(out)


@dataclass(frozen=True)
class SearchQuery:
    import_statements: tuple[str, ...]
    page_limit: int = PAGE_SIZE

    def __post_init__(self):
        stmts = tuple(dict.fromkeys(self.import_statements))
        object.__setattr__(self, "import_statements", stmts)
        if not stmts:
            raise ValueError("a search query needs at least one import statement")
        if self.page_limit < 1:
            raise ValueError("page_limit must be positive")


@dataclass(frozen=True)
class Hit:
    identity: str
    relevance_rank: int
    raw_text: Optional[str] = None
    fetch_url: Optional[str] = None


class SearchProvider(Protocol):
    def query(self, q: SearchQuery, page: int) -> list[Hit]: ...

    def fetch(self, hit: Hit) -> str: ...


def imports_match(doc_imports: Iterable[str], wanted: str) -> bool:
    """``wanted`` is imported explicitly or through its package wildcard."""
    imports = set(doc_imports)
    package = wanted.rsplit(".", 1)[0] if "." in wanted else ""
    return wanted in imports or (package and package + ".*" in imports)


def select_by_imports(docs: Sequence[SourceDoc], imports: Iterable[str]) -> list[SourceDoc]:
    """Docs importing at least one of ``imports``, order preserved."""
    wanted = list(imports)
    return [d for d in docs if any(imports_match(d.import_lines, w) for w in wanted)]


# ------------------------------------------------------------ internal search

def _java_files(root: Path) -> list[str]:
    found = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = [d for d in dirnames if d != ".git"]
        for name in filenames:
            if name.endswith(".java"):
                found.append(Path(dirpath, name).relative_to(root).as_posix())
    return sorted(found)


def internal_candidates(project_root, exclude_file: Optional[str] = None,
                        diagnostics: Optional[list] = None) -> list[SourceDoc]:
    """Every ``.java`` file under ``project_root`` except ``exclude_file``, lexicographic order."""
    root = Path(project_root)
    if not root.is_dir():
        raise OSError(f"project root {root} is not a readable directory")
    files = _java_files(root)
    exclude = Path(exclude_file).as_posix() if exclude_file else None
    if exclude is not None and exclude not in files:
        log.warning("excluded file %s is not part of %s", exclude, root)
        if diagnostics is not None:
            diagnostics.append({"kind": "ExcludeMissing", "file": exclude})
    docs = []
    for rel in files:
        if rel == exclude:
            continue
        text = (root / rel).read_text(encoding="utf-8", errors="replace")
        docs.append(SourceDoc(Origin.INTERNAL, rel, text, len(docs)))
    return docs


# ----------------------------------------------------------------- providers

class FilesystemProvider:
    """Indexes a local corpus; a file matches when it imports any query import.

    Results are ranked by relative path.
    """

    def __init__(self, corpus_dir):
        self.root = Path(corpus_dir)
        self._lock = threading.Lock()
        self._index: Optional[list[tuple[str, frozenset, str]]] = None

    def _load(self):
        with self._lock:
            if self._index is None:
                index = []
                if self.root.is_dir():
                    for rel in _java_files(self.root):
                        text = (self.root / rel).read_text(encoding="utf-8", errors="replace")
                        doc = SourceDoc(Origin.EXTERNAL, rel, text)
                        index.append((rel, doc.import_lines, text))
                self._index = index
            return self._index

    def query(self, q: SearchQuery, page: int) -> list[Hit]:
        if page < 0:
            raise ValueError("page must be non-negative")
        matches = [
            (rel, text) for rel, imports, text in self._load()
            if any(imports_match(imports, w) for w in q.import_statements)
        ]
        start = page * q.page_limit
        chunk = matches[start:start + q.page_limit]
        return [Hit(rel, start + i, text) for i, (rel, text) in enumerate(chunk)]

    def fetch(self, hit: Hit) -> str:
        if hit.raw_text is not None:
            return hit.raw_text
        return (self.root / hit.identity).read_text(encoding="utf-8", errors="replace")


class HttpProvider:
    """Client for a searchcode-style REST endpoint.

    ``GET {base_url}/api/codesearch_I/?q=..&p=..&per_page=..`` returns
    ``{"results": [{"id", "filename", "repo", "lines", "raw_url"?}]}``; raw file
    text comes from ``raw_url`` or ``{base_url}/codesearch/raw/{id}/``.
    """

    def __init__(self, base_url: str, min_interval: float = 0.0, retries: int = 2,
                 backoff: float = 0.5, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.min_interval = min_interval
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self._lock = threading.Lock()
        self._last = 0.0

    def _throttle(self):
        with self._lock:
            wait = self._last + self.min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last = time.monotonic()

    def _get(self, url: str) -> bytes:
        last_exc: Optional[Exception] = None
        for attempt in range(self.retries + 1):
            self._throttle()
            try:
                with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                    return resp.read()
            except (urllib.error.URLError, OSError) as exc:
                last_exc = exc
                if isinstance(exc, urllib.error.HTTPError) and 400 <= exc.code < 500 and exc.code != 429:
                    break
                if attempt < self.retries:
                    time.sleep(self.backoff * (2 ** attempt))
        raise ProviderError(f"request to {url} failed: {last_exc}")

    def query(self, q: SearchQuery, page: int) -> list[Hit]:
        terms = " ".join(q.import_statements)
        params = urllib.parse.urlencode({"q": terms, "p": page, "per_page": q.page_limit})
        body = self._get(f"{self.base_url}/api/codesearch_I/?{params}")
        try:
            payload = json.loads(body.decode("utf-8"))
            results = payload.get("results") or []
        except (ValueError, AttributeError) as exc:
            raise ProviderError(f"malformed search response: {exc}") from exc
        hits = []
        for i, r in enumerate(results):
            ident = str(r["id"])
            url = r.get("raw_url") or f"{self.base_url}/codesearch/raw/{urllib.parse.quote(ident)}/"
            hits.append(Hit(ident, page * q.page_limit + i, None, url))
        return hits

    def fetch(self, hit: Hit) -> str:
        if hit.raw_text is not None:
            return hit.raw_text
        return self._get(hit.fetch_url).decode("utf-8", errors="replace")


# ------------------------------------------------------------ external search

def run_session(provider: SearchProvider, imports: Sequence[str], cap: int = SESSION_CAP,
                page_size: int = PAGE_SIZE) -> list[Hit]:
    """Page through one search session until ``cap`` hits or an empty page."""
    q = SearchQuery(tuple(imports), min(page_size, cap))
    hits: list[Hit] = []
    page = 0
    while len(hits) < cap:
        batch = provider.query(q, page)
        if not batch:
            break
        hits.extend(batch)
        if len(batch) < q.page_limit:
            break
        page += 1
    return hits[:cap]


def external_candidates(context: ApiContext, provider: SearchProvider, origin_package_prefix: str,
                        cap: int = SESSION_CAP, page_size: int = PAGE_SIZE,
                        diagnostics: Optional[list] = None) -> list[SourceDoc]:
    """Merge a misused-imports session and an all-imports session.

    Session-1 hits come first, then unseen session-2 hits. Files sharing the
    origin project's package prefix are dropped.
    """
    if not context.api_imports:
        raise ValueError("context has no api imports to search for")
    sessions = []
    if context.misused_imports:
        sessions.append(context.misused_import_names)
    sessions.append(context.api_import_names)
    prefix = tuple(origin_package_prefix.split(".")) if origin_package_prefix else ()
    seen: set[str] = set()
    docs: list[SourceDoc] = []
    for imports in sessions:
        for hit in run_session(provider, imports, cap, page_size):
            if hit.identity in seen:
                continue
            seen.add(hit.identity)
            text = provider.fetch(hit)
            doc = SourceDoc(Origin.EXTERNAL, hit.identity, text, len(docs))
            if prefix and tuple(doc.package_name.split("."))[:len(prefix)] == prefix:
                if diagnostics is not None:
                    diagnostics.append({"kind": "SameProjectExcluded", "doc": hit.identity})
                continue
            docs.append(doc)
    return docs


def origin_prefix(package_name: str) -> str:
    """Leading qualifiers identifying the origin project."""
    return ".".join(package_prefix(package_name))
