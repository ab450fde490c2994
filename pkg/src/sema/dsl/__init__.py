"""Lexer, parser and printer for the storyboard language (``.sb`` files)."""

from .lexer import KEYWORDS, Token, TokenKind, tokenize
from .parser import parse, parse_source
from .printer import format_expr, format_guard, pretty_print
from .syntax import RawStoryboard

__all__ = [
    "KEYWORDS", "Token", "TokenKind", "tokenize", "parse", "parse_source",
    "pretty_print", "format_expr", "format_guard", "RawStoryboard",
]
