import pytest

from sema.dsl import TokenKind, tokenize
from sema.dsl.lexer import escape, unescape
from sema.errors import LexError
from sema.span import SourceSpan


def kinds(src):
    return [(t.kind, t.text) for t in tokenize(src)]


def test_multiword_keywords_are_single_tokens():
    toks = tokenize("go from A to B when X was pressed")
    assert [t.text for t in toks] == ["go from", "A", "to", "B", "when", "X", "was pressed"]
    assert toks[0].kind is TokenKind.KEYWORD and toks[-1].kind is TokenKind.KEYWORD


def test_hyphenated_keyword():
    assert kinds("security-requirements") == [(TokenKind.KEYWORD, "security-requirements")]


def test_multiword_keyword_does_not_span_lines():
    toks = tokenize("go\nfrom")
    assert [t.kind for t in toks] == [TokenKind.IDENT, TokenKind.IDENT]


def test_comments_and_whitespace_skipped():
    assert kinds("A // comment { }\n B") == [(TokenKind.IDENT, "A"), (TokenKind.IDENT, "B")]


def test_spans_are_one_based_and_end_exclusive():
    t = tokenize('\n  "ab"', "f.sb")[0]
    assert t.span == SourceSpan("f.sb", 2, 3, 2, 7)
    assert str(t.span) == "f.sb:2:3"


def test_string_escapes_round_trip():
    assert unescape(r'"a\"b\\c"') == 'a"b\\c'
    for s in ["", "plain", 'q"uote', "back\\slash", '\\"']:
        assert unescape(escape(s)) == s


def test_integer_and_punctuation():
    assert kinds("f(1, 23) -> :") == [
        (TokenKind.IDENT, "f"), (TokenKind.PUNCT, "("), (TokenKind.INT, "1"),
        (TokenKind.PUNCT, ","), (TokenKind.INT, "23"), (TokenKind.PUNCT, ")"),
        (TokenKind.PUNCT, "->"), (TokenKind.PUNCT, ":")]


@pytest.mark.parametrize("src,msg", [
    ('"open', "unterminated string"),
    ("a @ b", "illegal character"),
    (r'"\n"', "escape"),
])
def test_lex_errors_carry_spans(src, msg):
    with pytest.raises(LexError) as ei:
        tokenize(src, "x.sb")
    assert msg in str(ei.value)
    assert ei.value.span.file == "x.sb"


def test_invalid_utf8_rejected():
    with pytest.raises(LexError, match="UTF-8"):
        tokenize(b"\xff\xfe")


def test_bytes_input_decoded():
    assert kinds(b"screen") == [(TokenKind.KEYWORD, "screen")]


def test_span_validation():
    with pytest.raises(ValueError):
        SourceSpan("f", 0, 1, 1, 1)
    with pytest.raises(ValueError):
        SourceSpan("f", 2, 1, 1, 1)
    a, b = SourceSpan("f", 1, 1, 1, 3), SourceSpan("f", 2, 4, 2, 9)
    assert a.cover(b) == SourceSpan("f", 1, 1, 2, 9)
