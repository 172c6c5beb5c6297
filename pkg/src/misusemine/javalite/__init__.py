"""A small Java-subset front end: tokenizer, parser, tree walkers and printer."""

from .ast import CallExpr, CompilationUnit, ImportDecl, LineRange, MethodDecl, TypeDecl, TypeRef
from .lexer import JAVA_KEYWORDS, LITERAL_WORDS, tokenize
from .parser import method_tokens, parse_compilation_unit, parse_method
from .printer import pretty
from .walk import calls, iter_nodes

__all__ = [
    "CallExpr", "CompilationUnit", "ImportDecl", "LineRange", "MethodDecl", "TypeDecl",
    "TypeRef", "JAVA_KEYWORDS", "LITERAL_WORDS", "tokenize", "method_tokens",
    "parse_compilation_unit", "parse_method", "pretty", "calls", "iter_nodes",
]
