"""Tokenizer for the Java subset.

Comments are dropped. ``>`` is always emitted as a single token so that nested
generic closers (``List<List<A>>``) need no splitting; the expression parser
re-joins adjacent ``>`` tokens into shift and comparison operators.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import JavaSyntaxError

JAVA_KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while _
    """.split()
)
LITERAL_WORDS = frozenset({"true", "false", "null"})
PRIMITIVES = frozenset({"boolean", "byte", "char", "short", "int", "long", "float", "double"})

_OPERATORS = [
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", "<<",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "(", ")", "{", "}", "[", "]", ";", ",", ".", "@", "=", "<", ">", "!", "~",
    "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
]

_NUMBER = re.compile(
    r"""
    0[xX][0-9a-fA-F_]+(\.[0-9a-fA-F_]*)?([pP][+-]?\d+)?[lLfFdD]?
  | 0[bB][01_]+[lL]?
  | (\d[\d_]*)?\.\d[\d_]*([eE][+-]?\d+)?[fFdD]?
  | \d[\d_]*(\.(?![.\w])[\d_]*)?([eE][+-]?\d+)?[lLfFdD]?
    """,
    re.VERBOSE,
)
_IDENT = re.compile(r"[A-Za-z_$\u0080-￿][A-Za-z0-9_$\u0080-￿]*")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, literal, number, string, char, op, eof
    text: str
    line: int
    col: int
    start: int
    end: int

    def is_op(self, *ops):
        return self.kind == "op" and self.text in ops

    def is_kw(self, *words):
        return self.kind == "keyword" and self.text in words


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens; the list always ends with an ``eof`` token."""
    text = source.replace("\r\n", "\n").replace("\r", "\n")
    tokens: list[Token] = []
    i, n = 0, len(text)
    line, line_start = 1, 0

    def newlines(a, b):
        nonlocal line, line_start
        k = text.count("\n", a, b)
        if k:
            line += k
            line_start = text.rfind("\n", a, b) + 1

    while i < n:
        c = text[i]
        if c in " \t\f\n":
            if c == "\n":
                line += 1
                line_start = i + 1
            i += 1
            continue
        col = i - line_start + 1
        if text.startswith("//", i):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                raise JavaSyntaxError("unterminated comment", line, col)
            newlines(i, j + 2)
            i = j + 2
            continue
        if text.startswith('"""', i):
            j = text.find('"""', i + 3)
            while j > 0 and _escaped(text, j):
                j = text.find('"""', j + 1)
            if j < 0:
                raise JavaSyntaxError("unterminated text block", line, col)
            tokens.append(Token("string", text[i:j + 3], line, col, i, j + 3))
            newlines(i, j + 3)
            i = j + 3
            continue
        if c == '"' or c == "'":
            j = i + 1
            while j < n and text[j] != c:
                if text[j] == "\\":
                    j += 1
                elif text[j] == "\n":
                    raise JavaSyntaxError("unterminated literal", line, col)
                j += 1
            if j >= n:
                raise JavaSyntaxError("unterminated literal", line, col)
            kind = "string" if c == '"' else "char"
            tokens.append(Token(kind, text[i:j + 1], line, col, i, j + 1))
            i = j + 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER.match(text, i)
            tokens.append(Token("number", m.group(0), line, col, i, m.end()))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group(0)
            if word in JAVA_KEYWORDS:
                kind = "keyword"
            elif word in LITERAL_WORDS:
                kind = "literal"
            else:
                kind = "ident"
            tokens.append(Token(kind, word, line, col, i, m.end()))
            i = m.end()
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("op", op, line, col, i, i + len(op)))
                i += len(op)
                break
        else:
            raise JavaSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, i - line_start + 1, n, n))
    return tokens


def _escaped(text, j):
    k, count = j - 1, 0
    while text[k] == "\\":
        count += 1
        k -= 1
    return count % 2 == 1
