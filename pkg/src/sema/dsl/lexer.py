"""Tokenizer for the storyboard language.

Whitespace and ``//`` comments are skipped. Multi-word keywords such as
``was pressed`` are emitted as a single token whose text is the verbatim
slice, so joining token texts with the skipped material gives back the input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from ..errors import LexError
from ..span import SourceSpan


class TokenKind(str, Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    STRING = "string-literal"
    INT = "integer-literal"
    PUNCT = "punctuation"


KEYWORDS = frozenset({
    "application", "resources", "security-requirements", "screen",
    "launcher", "exported", "private", "shared", "external",
    "sensitive", "privileged", "Button", "TextView", "TextInput", "init",
    "go from", "to", "when", "propagate", "as", "was pressed", "condition",
    "and", "or", "not", "is private",
})

# first word -> second word, joined by horizontal whitespace only
_MULTIWORD = {"go": "from", "was": "pressed", "is": "private"}

_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")
_HSPACE = re.compile(r"[ \t]+")
_PUNCT = ("->", "{", "}", "(", ")", ":", ",", ".")


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan

    @property
    def value(self) -> str:
        """Text with internal whitespace collapsed (keywords) or unescaped (strings)."""
        if self.kind is TokenKind.KEYWORD:
            return " ".join(self.text.split())
        if self.kind is TokenKind.STRING:
            return unescape(self.text)
        return self.text

    def is_kw(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.value == word

    def is_punct(self, p: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.text == p


def unescape(literal: str) -> str:
    body = literal[1:-1]
    return re.sub(r"\\([\"\\])", r"\1", body)


def escape(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


class _Cursor:
    def __init__(self, source: str, file: str):
        self.src = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def advance(self, n: int) -> None:
        chunk = self.src[self.pos:self.pos + n]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.col = len(chunk) - chunk.rfind("\n")
        else:
            self.col += n
        self.pos += n

    def span_from(self, line: int, col: int) -> SourceSpan:
        return SourceSpan(self.file, line, col, self.line, self.col)


def tokenize(source: str | bytes, file: str = "<input>") -> list[Token]:
    """Split ``source`` into tokens. Raises :class:`LexError` on bad input."""
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            line = bytes(source)[:exc.start].count(b"\n") + 1
            raise LexError(SourceSpan(file, line, 1, line, 1), "input is not valid UTF-8") from None
    cur = _Cursor(source, file)
    src = source
    tokens: list[Token] = []
    n = len(src)
    while cur.pos < n:
        ch = src[cur.pos]
        if ch in " \t\r\n\f\v":
            cur.advance(1)
            continue
        if src.startswith("//", cur.pos):
            end = src.find("\n", cur.pos)
            cur.advance((n if end < 0 else end) - cur.pos)
            continue
        line, col = cur.line, cur.col
        if ch == '"':
            tokens.append(Token(TokenKind.STRING, _scan_string(cur), cur.span_from(line, col)))
            continue
        m = _WORD.match(src, cur.pos)
        if m:
            text = _scan_word(src, m)
            if text in KEYWORDS or " ".join(text.split()) in KEYWORDS:
                kind = TokenKind.KEYWORD
            else:
                kind = TokenKind.IDENT
            cur.advance(len(text))
            tokens.append(Token(kind, text, cur.span_from(line, col)))
            continue
        m = _INT.match(src, cur.pos)
        if m:
            cur.advance(m.end() - m.start())
            tokens.append(Token(TokenKind.INT, m.group(), cur.span_from(line, col)))
            continue
        for p in _PUNCT:
            if src.startswith(p, cur.pos):
                cur.advance(len(p))
                tokens.append(Token(TokenKind.PUNCT, p, cur.span_from(line, col)))
                break
        else:
            raise LexError(SourceSpan(file, line, col, line, col + 1), f"illegal character {ch!r}")
    return tokens


def _scan_word(src: str, m: re.Match) -> str:
    word = m.group()
    end = m.end()
    if word == "security" and src.startswith("-requirements", end):
        after = end + len("-requirements")
        if after >= len(src) or not (src[after].isalnum() or src[after] == "_"):
            return src[m.start():after]
    second = _MULTIWORD.get(word)
    if second:
        gap = _HSPACE.match(src, end)
        if gap:
            nxt = _WORD.match(src, gap.end())
            if nxt and nxt.group() == second:
                return src[m.start():nxt.end()]
    return word


def _scan_string(cur: _Cursor) -> str:
    src = cur.src
    start = cur.pos
    line, col = cur.line, cur.col
    i = start + 1
    while i < len(src):
        c = src[i]
        if c == '"':
            cur.advance(i + 1 - start)
            return src[start:i + 1]
        if c == "\n":
            break
        if c == "\\":
            if i + 1 < len(src) and src[i + 1] in '"\\':
                i += 2
                continue
            bad = src[i + 1] if i + 1 < len(src) else "end of input"
            offset = i - start
            raise LexError(SourceSpan(cur.file, line, col + offset, line, col + offset + 1),
                           f"invalid escape sequence before {bad!r}")
        i += 1
    end_col = col + (i - start)
    raise LexError(SourceSpan(cur.file, line, col, line, max(end_col, col)),
                   "unterminated string literal")
