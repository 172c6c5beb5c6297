"""File-level satisfaction-ratio filter and method-level keyword filter."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import EmptyInput, EmptyKeywordSet, JavaSyntaxError
from .javalite import ast as A
from .javalite.lexer import JAVA_KEYWORDS, LITERAL_WORDS
from .javalite.parser import parse_compilation_unit

log = logging.getLogger(__name__)

SR_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
STRIPPED_WORDS = JAVA_KEYWORDS | LITERAL_WORDS
_WORD = re.compile(r"[A-Za-z0-9_$]+")


class SearchLoc(str, Enum):
    INTERNAL = "Internal"
    EXTERNAL = "External"
    BOTH = "Both"


class SearchImp(str, Enum):
    ALL_IMPORTS = "AllImports"
    MISUSED_IMPORTS = "MisusedImports"


def as_ratio(value) -> Fraction:
    """Exact ratio from a float, string or Fraction; floats go through their shortest decimal form."""
    if isinstance(value, Fraction):
        r = value
    elif isinstance(value, float):
        r = Fraction(repr(value))
    else:
        r = Fraction(value)
    if not 0 <= r <= 1:
        raise ValueError(f"satisfaction ratio {value} outside [0, 1]")
    return r


@dataclass(frozen=True)
class StrategyConfig:
    search_loc: SearchLoc = SearchLoc.EXTERNAL
    search_imp: SearchImp = SearchImp.ALL_IMPORTS
    sr: Fraction = Fraction(0)
    method_filter: bool = True

    def __post_init__(self):
        object.__setattr__(self, "search_loc", SearchLoc(self.search_loc))
        object.__setattr__(self, "search_imp", SearchImp(self.search_imp))
        object.__setattr__(self, "sr", as_ratio(self.sr))

    def key(self) -> str:
        """Stable, human-readable cell name."""
        sr = f"{self.sr.numerator}-{self.sr.denominator}"
        mf = "mf" if self.method_filter else "nomf"
        return f"{self.search_loc.value}_{self.search_imp.value}_sr{sr}_{mf}"

    def to_json(self) -> dict:
        return {
            "search_loc": self.search_loc.value,
            "search_imp": self.search_imp.value,
            "sr": str(self.sr),
            "method_filter": self.method_filter,
        }


# ---------------------------------------------------------- file filtering

@lru_cache(maxsize=4096)
def _word_set(text: str) -> frozenset:
    return frozenset(_WORD.findall(text))


def contains_keyword(text: str, keyword: str, mode: str = "token") -> bool:
    """Whether ``text`` contains ``keyword``.

    ``token`` mode requires identifier boundaries on both sides; ``substring``
    mode is a plain substring test.
    """
    if mode == "substring":
        return keyword in text
    if mode != "token":
        raise ValueError(f"unknown match mode {mode!r}")
    if _WORD.fullmatch(keyword):
        return keyword in _word_set(text)
    return re.search(r"(?<![A-Za-z0-9_$])" + re.escape(keyword) + r"(?![A-Za-z0-9_$])", text) is not None


def _text_of(doc) -> str:
    return doc if isinstance(doc, str) else doc.raw_text


def satisfaction_ratio(doc, kw_set: Iterable[str], mode: str = "token") -> Fraction:
    """Share of ``kw_set`` found in ``doc`` (a SourceDoc or raw text)."""
    kws = set(kw_set)
    if not kws:
        raise EmptyKeywordSet("keyword set is empty")
    text = _text_of(doc)
    return Fraction(sum(contains_keyword(text, k, mode) for k in kws), len(kws))


def filter_files(docs: Sequence, kw_set: Iterable[str], sr_min, mode: str = "token") -> list:
    """Docs whose satisfaction ratio reaches ``sr_min``, in input order."""
    threshold = as_ratio(sr_min)
    docs = list(docs)
    if threshold == 0:
        return docs
    kws = set(kw_set)
    if not kws:
        raise EmptyKeywordSet("keyword set is empty")
    return [d for d in docs if satisfaction_ratio(d, kws, mode) >= threshold]


# -------------------------------------------------------- method filtering

@dataclass(frozen=True)
class FoundMethod:
    doc: object
    unit: A.CompilationUnit
    method: A.MethodDecl
    method_id: int

    @property
    def identity(self) -> str:
        return getattr(self.doc, "identity", str(self.doc))


def method_token_set(method: A.MethodDecl) -> frozenset:
    """Declaration tokens without Java reserved words and boolean/null literals."""
    return frozenset(t for t in method.tokens if t not in STRIPPED_WORDS)


def iter_methods_with_ids(unit: A.CompilationUnit):
    """``(type, method, method_id)`` where ``method_id`` numbers same-named methods in file order."""
    seen: dict[str, int] = {}
    pairs = sorted(unit.iter_methods(), key=lambda tm: tm[1].start_offset)
    for t, m in pairs:
        mid = seen.get(m.name, 0)
        seen[m.name] = mid + 1
        yield t, m, mid


@lru_cache(maxsize=2048)
def _parse_cached(identity: str, text: str):
    try:
        return parse_compilation_unit(text, identity)
    except JavaSyntaxError as exc:
        return exc


def parse_doc(doc, diagnostics: Optional[list] = None) -> Optional[A.CompilationUnit]:
    """Parsed unit of ``doc`` or ``None`` (logged, with a ParseSkipped diagnostic)."""
    result = _parse_cached(doc.identity, doc.raw_text)
    if isinstance(result, JavaSyntaxError):
        log.info("skipping unparseable document %s: %s", doc.identity, result)
        if diagnostics is not None:
            diagnostics.append({"kind": "ParseSkipped", "doc": doc.identity, "error": str(result)})
        return None
    return result


def filter_methods(docs: Sequence, kw_set: Iterable[str], enabled: bool = True,
                   diagnostics: Optional[list] = None) -> list[FoundMethod]:
    """Methods whose token set meets ``kw_set``; every method when ``enabled`` is false."""
    kws = frozenset(kw_set)
    out = []
    for doc in docs:
        unit = parse_doc(doc, diagnostics)
        if unit is None:
            continue
        for _, m, mid in iter_methods_with_ids(unit):
            if not enabled or method_token_set(m) & kws:
                out.append(FoundMethod(doc, unit, m, mid))
    return out


def method_sr(method: A.MethodDecl, kw_set: Iterable[str]) -> Fraction:
    kws = set(kw_set)
    if not kws:
        raise EmptyKeywordSet("keyword set is empty")
    return Fraction(len(method_token_set(method) & kws), len(kws))


def mean_method_sr(methods: Sequence, kw_set: Iterable[str]) -> Fraction:
    """Mean token-level satisfaction ratio over methods (MethodDecl or FoundMethod)."""
    if not methods:
        raise EmptyInput("no methods")
    kws = set(kw_set)
    total = sum(method_sr(getattr(m, "method", m), kws) for m in methods)
    return total / len(methods)
