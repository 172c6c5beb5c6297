"""Import classification and API context (imports and keywords) of changed methods."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .javalite import ast as A
from .javalite.walk import calls, iter_nodes

PREFIX_SEGMENTS = 3


class ImportClass(str, Enum):
    INTERNAL = "Internal"
    THIRD_PARTY = "ThirdParty"
    JAVA_LANG = "JavaLang"


def package_prefix(package_name: str, segments: int = PREFIX_SEGMENTS) -> tuple[str, ...]:
    if not package_name:
        return ()
    return tuple(package_name.split("."))[:segments]


def shares_prefix(qualified_name: str, package_name: str) -> bool:
    """Segment-wise test that ``qualified_name`` starts with the package's leading qualifiers."""
    prefix = package_prefix(package_name)
    return tuple(qualified_name.split("."))[:len(prefix)] == prefix


def classify_import(imp: A.ImportDecl, package_name: str) -> ImportClass:
    if not package_name:
        return ImportClass.INTERNAL
    if imp.qualified_name.startswith("java.lang."):
        return ImportClass.JAVA_LANG
    if shares_prefix(imp.qualified_name, package_name):
        return ImportClass.INTERNAL
    return ImportClass.THIRD_PARTY


def third_party_imports(unit: A.CompilationUnit) -> dict[str, A.ImportDecl]:
    """Explicit, non-static third-party imports by simple name."""
    out = {}
    for imp in unit.imports:
        if imp.is_wildcard or imp.is_static:
            continue
        if classify_import(imp, unit.package_name) is ImportClass.THIRD_PARTY:
            out.setdefault(imp.simple_name, imp)
    return out


def enclosing_type(method: A.MethodDecl, unit: A.CompilationUnit) -> Optional[A.TypeDecl]:
    for t, m in unit.iter_methods():
        if m is method:
            return t
    return None


def is_override(method: A.MethodDecl) -> bool:
    return "Override" in method.annotations


def relevant_types(method: A.MethodDecl, unit: A.CompilationUnit) -> set[str]:
    """Explicitly imported third-party type names the method relies on.

    A type counts when it appears as a parameter, return or thrown type, is
    mentioned anywhere in the body, or is a supertype of the enclosing class
    of an ``@Override`` method.
    """
    candidates = third_party_imports(unit)
    if not candidates:
        return set()
    mentioned: set[str] = set()
    for t in method.parameter_types:
        mentioned.update(t.mentioned_names())
    if method.return_type is not None:
        mentioned.update(method.return_type.mentioned_names())
    for t in method.thrown_types:
        mentioned.update(t.mentioned_names())
    if method.body is not None:
        mentioned.update(_body_names(method))
    if is_override(method):
        owner = enclosing_type(method, unit)
        if owner is not None:
            for t in owner.extends + owner.implements:
                mentioned.update(t.mentioned_names())
    return {name for name in candidates if name in mentioned}


def _body_names(method: A.MethodDecl) -> set[str]:
    # identifier tokens of the body cover names inside opaque statements too
    names = set(method.tokens)
    for n in iter_nodes(method.body):
        if isinstance(n, A.TypeRef):
            names.update(n.mentioned_names())
    return names


@dataclass(frozen=True)
class ApiContext:
    method: object  # MethodChange or any method provenance
    api_imports: frozenset = frozenset()
    keywords: frozenset = frozenset()
    misused_imports: Optional[frozenset] = None

    def __post_init__(self):
        object.__setattr__(self, "api_imports", frozenset(self.api_imports))
        object.__setattr__(self, "keywords", frozenset(self.keywords))
        if any(i.is_wildcard for i in self.api_imports):
            raise ValueError("api imports must be explicit")
        if self.misused_imports is not None:
            object.__setattr__(self, "misused_imports", frozenset(self.misused_imports))
            if not self.misused_imports <= self.api_imports:
                raise ValueError("misused imports must be a subset of the api imports")

    @property
    def api_import_names(self) -> list[str]:
        return sorted(i.qualified_name for i in self.api_imports)

    @property
    def misused_import_names(self) -> list[str]:
        return sorted(i.qualified_name for i in (self.misused_imports or ()))


def method_keywords(method: A.MethodDecl, types: Iterable[str]) -> set[str]:
    kws = set(types)
    for c in calls(method):
        if not c.is_constructor and c.method_name not in ("this", "super"):
            kws.add(c.method_name)
    if is_override(method):
        kws.add(method.name)
    return kws


def extract_context(
    method: A.MethodDecl,
    unit: A.CompilationUnit,
    ref: object = None,
    misused_manifest: Optional[Iterable[str]] = None,
) -> ApiContext:
    """Third-party imports and keywords of ``method``.

    ``misused_manifest`` holds qualified names from an external manifest; the
    resulting ``misused_imports`` is its intersection with the API imports.
    """
    types = relevant_types(method, unit)
    by_name = third_party_imports(unit)
    api_imports = frozenset(by_name[t] for t in types)
    misused = None
    if misused_manifest is not None:
        wanted = set(misused_manifest)
        misused = frozenset(i for i in api_imports if i.qualified_name in wanted)
    return ApiContext(ref if ref is not None else method, api_imports, method_keywords(method, types), misused)
