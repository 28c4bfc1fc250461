"""Tokenizer for ``.proc`` sources."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

KEYWORDS = frozenset(
    {
        "lin",
        "un",
        "end",
        "rec",
        "open",
        "close",
        "dual",
        "type",
        "proc",
        "assume",
        "main",
    }
)

# Longest symbols first so that "(+)" wins over "(".
SYMBOLS = (
    "(+)",
    "(",
    ")",
    "{",
    "}",
    "<",
    ">",
    ",",
    ".",
    ":",
    ";",
    "!",
    "?",
    "|",
    "*",
    "=",
)

_TOKEN = re.compile(
    r"(?P<space>[ \t\r]+)"
    r"|(?P<newline>\n)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<ident>[^\W\d][\w']*)"
    r"|(?P<zero>0(?![\w']))"
    r"|(?P<symbol>" + "|".join(re.escape(s) for s in SYMBOLS) + r")"
)


class ParseError(ValueError):
    """A syntax or resolution error at a source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.render())

    def render(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    def is_symbol(self, text: str) -> bool:
        return self.kind == "symbol" and self.text == text

    def is_keyword(self, text: str) -> bool:
        return self.kind == "keyword" and self.text == text


EOF = "eof"


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens, ending with an ``eof`` token.

    Raises:
        ParseError: On a character that starts no token.
    """
    return list(_tokens(text))


def _tokens(text: str) -> Iterator[Token]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        value = match.group()
        pos = match.end()
        if kind == "newline":
            line, line_start = line + 1, pos
        elif kind == "ident":
            kind = "keyword" if value in KEYWORDS else "ident"
            yield Token(kind, value, line, column)
        elif kind in ("zero", "symbol"):
            yield Token("symbol", value, line, column)
    yield Token(EOF, "", line, pos - line_start + 1)
