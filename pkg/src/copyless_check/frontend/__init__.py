"""Concrete syntax for ``.proc`` sources."""

from copyless_check.frontend.lexer import ParseError
from copyless_check.frontend.parser import (
    SourceProgram,
    parse,
    parse_process,
    parse_type,
)
from copyless_check.frontend.render import render

__all__ = [
    "ParseError",
    "SourceProgram",
    "parse",
    "parse_process",
    "parse_type",
    "render",
]
