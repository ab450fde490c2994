"""Recursive-descent parser with panic-mode recovery.

Errors inside a resource or screen are recorded and the parser skips to the
next resource/screen boundary, so one run reports every recoverable error.
"""

from __future__ import annotations

from typing import Optional

from ..errors import ParseError, ParseErrors
from ..span import SourceSpan
from . import syntax as ast
from .lexer import Token, TokenKind, tokenize

TRUST_LEVELS = ("private", "shared", "external")
WIDGET_KINDS = ("Button", "TextView", "TextInput")
ANNOTATIONS = ("sensitive", "privileged")


class _Sync(Exception):
    """Unwinds to the nearest recovery point after an error was recorded."""


def _describe(tok: Optional[Token]) -> str:
    if tok is None:
        return "end of input"
    return f"{tok.kind.value} {tok.text!r}"


class Parser:
    def __init__(self, tokens: list[Token], file: str = "<input>"):
        self.toks = tokens
        self.file = tokens[0].span.file if tokens else file
        self.i = 0
        self.depth = 0
        self.errors: list[ParseError] = []

    # -- token plumbing -------------------------------------------------

    def peek(self, offset: int = 0) -> Optional[Token]:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        if tok.is_punct("{"):
            self.depth += 1
        elif tok.is_punct("}"):
            self.depth -= 1
        return tok

    def at_kw(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is TokenKind.KEYWORD and tok.value in words

    def at_punct(self, p: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.is_punct(p)

    def at_kind(self, kind: TokenKind) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is kind

    def _eof_span(self) -> SourceSpan:
        if self.toks:
            last = self.toks[-1].span
            return SourceSpan(self.file, last.end_line, last.end_col, last.end_line, last.end_col)
        return SourceSpan(self.file, 1, 1, 1, 1)

    def fail(self, expected: str) -> _Sync:
        tok = self.peek()
        span = tok.span if tok else self._eof_span()
        self.errors.append(ParseError(span, expected, f"expected {expected}, found {_describe(tok)}"))
        return _Sync()

    def expect_kw(self, word: str) -> Token:
        if self.at_kw(word):
            return self.next()
        raise self.fail(f"'{word}'")

    def expect_punct(self, p: str) -> Token:
        if self.at_punct(p):
            return self.next()
        raise self.fail(f"'{p}'")

    def expect_ident(self, what: str) -> Token:
        if self.at_kind(TokenKind.IDENT):
            return self.next()
        raise self.fail(what)

    def _prev_span(self) -> SourceSpan:
        return self.toks[self.i - 1].span

    # -- recovery -------------------------------------------------------

    def _skip_block(self, base: int, stop_at_resource: bool = False) -> None:
        while (tok := self.peek()) is not None:
            if tok.is_kw("screen") or tok.is_kw("security-requirements"):
                break
            if stop_at_resource and self.depth == base and self._at_resource_head():
                break
            if tok.is_punct("}"):
                if self.depth <= base:
                    break
                self.next()
                if self.depth == base:
                    break
                continue
            self.next()
        self.depth = base

    def _at_resource_head(self) -> bool:
        a, b = self.peek(), self.peek(1)
        return a is not None and a.kind is TokenKind.IDENT and b is not None and b.is_punct(":")

    # -- grammar --------------------------------------------------------

    def parse_storyboard(self) -> ast.RawStoryboard:
        if not self.at_kw("application"):
            tok = self.peek()
            span = tok.span if tok else self._eof_span()
            self.errors.append(ParseError(span, "'application'", "no application block present"))
            raise ParseErrors(self.errors)
        start = self.next().span
        try:
            name = self.expect_ident("application name").text
            self.expect_punct("{")
        except _Sync:
            raise ParseErrors(self.errors) from None
        resources: tuple[ast.RawResource, ...] = ()
        requirements: tuple[ast.RawRequirement, ...] = ()
        if self.at_kw("resources"):
            resources = self.parse_resources()
        if self.at_kw("security-requirements"):
            requirements = self.parse_requirements()
        screens = []
        while (tok := self.peek()) is not None and not tok.is_punct("}"):
            if tok.is_kw("screen"):
                scr = self.parse_screen()
                if scr is not None:
                    screens.append(scr)
                continue
            self.fail("'screen' or '}'")
            self.next()
            while (tok := self.peek()) is not None and not tok.is_kw("screen"):
                self.next()
            self.depth = 1
        if self.peek() is None:
            self.fail("'}'")
        else:
            self.next()
            if self.peek() is not None:
                self.fail("end of input")
        if not screens and not self.errors:
            self.fail("'screen'")
        if self.errors:
            raise ParseErrors(self.errors)
        return ast.RawStoryboard(name, tuple(resources), tuple(requirements), tuple(screens),
                                 span=start.cover(self._prev_span()))

    def parse_resources(self) -> tuple[ast.RawResource, ...]:
        self.next()
        base = self.depth
        try:
            self.expect_punct("{")
        except _Sync:
            self._skip_block(base)
            return ()
        inner = self.depth
        out = []
        while not self.at_punct("}") and self.peek() is not None:
            if self.at_kw("screen", "security-requirements"):
                break
            start = self.i
            try:
                out.append(self.parse_resource())
            except _Sync:
                self._skip_block(inner, stop_at_resource=True)
                if self.i == start:
                    self.next()
                    self.depth = inner
        if not out and not self.errors:
            self.fail("resource declaration")
        if self.at_punct("}"):
            self.next()
        elif not self.errors:
            self.fail("'}'")
        self.depth = base
        return tuple(out)

    def parse_resource(self) -> ast.RawResource:
        name_tok = self.expect_ident("resource name")
        self.expect_punct(":")
        if not self.at_kw(*TRUST_LEVELS):
            raise self.fail("trust level (private, shared or external)")
        trust = self.next().value
        self.expect_punct("{")
        caps = [self.parse_capability()]
        while not self.at_punct("}"):
            caps.append(self.parse_capability())
        self.next()
        return ast.RawResource(name_tok.text, trust, tuple(caps),
                               span=name_tok.span.cover(self._prev_span()))

    def parse_capability(self) -> ast.RawCapability:
        name_tok = self.expect_ident("capability name")
        self.expect_punct("(")
        params: tuple[ast.RawParam, ...] = ()
        if not self.at_punct(")"):
            params = self.parse_params()
        self.expect_punct(")")
        returns = None
        if self.at_punct("->"):
            self.next()
            returns = self.expect_ident("return type name").text
        annots = []
        while self.at_kw(*ANNOTATIONS):
            annots.append(self.next().value)
        return ast.RawCapability(name_tok.text, params, returns, tuple(annots),
                                 span=name_tok.span.cover(self._prev_span()))

    def parse_params(self) -> tuple[ast.RawParam, ...]:
        out = [self.parse_param()]
        while self.at_punct(","):
            self.next()
            out.append(self.parse_param())
        return tuple(out)

    def parse_param(self) -> ast.RawParam:
        name = self.expect_ident("parameter name")
        self.expect_punct(":")
        type_tok = self.expect_ident("type name")
        return ast.RawParam(name.text, type_tok.text, span=name.span.cover(type_tok.span))

    def parse_requirements(self) -> tuple[ast.RawRequirement, ...]:
        self.next()
        base = self.depth
        out = []
        try:
            self.expect_punct("{")
            while True:
                if not self.at_kind(TokenKind.STRING):
                    raise self.fail("asset string literal")
                lit = self.next()
                kw = self.expect_kw("is private")
                out.append(ast.RawRequirement(lit.value, span=lit.span.cover(kw.span)))
                if self.at_punct("}"):
                    self.next()
                    break
        except _Sync:
            self._skip_block(base)
        return tuple(out)

    def parse_screen(self) -> Optional[ast.RawScreen]:
        start = self.next().span
        base = self.depth
        try:
            name = self.expect_ident("screen name").text
            flags = []
            while self.at_kw("launcher", "exported"):
                flags.append(self.next().value)
            params = None
            if self.at_punct("("):
                self.next()
                params = self.parse_params()
                self.expect_punct(")")
            self.expect_punct("{")
            widgets = []
            while self.at_kw(*WIDGET_KINDS):
                widgets.append(self.parse_widget())
            transitions = []
            while self.at_kw("go from"):
                transitions.append(self.parse_transition())
            if not self.at_punct("}"):
                expected = "transition or '}'" if transitions else "widget, transition or '}'"
                raise self.fail(expected)
            self.next()
        except _Sync:
            self._skip_block(base)
            return None
        return ast.RawScreen(name, tuple(flags), params, tuple(widgets), tuple(transitions),
                             span=start.cover(self._prev_span()))

    def parse_widget(self) -> ast.RawWidget:
        kind_tok = self.next()
        name = self.expect_ident("widget name")
        init = None
        if self.at_kw("init"):
            self.next()
            init = self.parse_expr()
        return ast.RawWidget(kind_tok.value, name.text, init, span=kind_tok.span.cover(self._prev_span()))

    def parse_transition(self) -> ast.RawTransition:
        start = self.next().span
        source = self.expect_ident("source screen name").text
        self.expect_kw("to")
        target = self.expect_ident("target screen name").text
        guard = None
        if self.at_kw("when"):
            self.next()
            guard = self.parse_guard()
        props = []
        while self.at_kw("propagate"):
            p_start = self.next().span
            expr = self.parse_expr()
            self.expect_kw("as")
            param = self.expect_ident("target parameter name")
            props.append(ast.RawPropagation(expr, param.text, span=p_start.cover(param.span)))
        return ast.RawTransition(source, target, guard, tuple(props), span=start.cover(self._prev_span()))

    def parse_guard(self) -> ast.RawGuard:
        left = self.parse_and()
        while self.at_kw("or"):
            self.next()
            right = self.parse_and()
            left = ast.OrGuard(left, right, span=left.span.cover(right.span))
        return left

    def parse_and(self) -> ast.RawGuard:
        left = self.parse_not()
        while self.at_kw("and"):
            self.next()
            right = self.parse_not()
            left = ast.AndGuard(left, right, span=left.span.cover(right.span))
        return left

    def parse_not(self) -> ast.RawGuard:
        if self.at_kw("not"):
            start = self.next().span
            operand = self.parse_not()
            return ast.NotGuard(operand, span=start.cover(operand.span))
        if self.at_punct("("):
            self.next()
            inner = self.parse_guard()
            self.expect_punct(")")
            return inner
        if self.at_kw("condition"):
            start = self.next().span
            expr = self.parse_expr()
            return ast.CondAtom(expr, span=start.cover(expr.span))
        if self.at_kind(TokenKind.IDENT):
            button = self.next()
            kw = self.expect_kw("was pressed")
            return ast.PressAtom(button.text, span=button.span.cover(kw.span))
        raise self.fail("guard (button press, 'condition', 'not' or '(')")

    def parse_expr(self) -> ast.RawExpr:
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.STRING:
            self.next()
            return ast.StrLit(tok.value, span=tok.span)
        if tok is not None and tok.kind is TokenKind.INT:
            self.next()
            return ast.IntLit(int(tok.text), span=tok.span)
        if tok is None or tok.kind is not TokenKind.IDENT:
            raise self.fail("expression")
        self.next()
        member = None
        if self.at_punct("."):
            self.next()
            member = self.expect_ident("member name").text
        args = None
        if self.at_punct("("):
            self.next()
            items: list[ast.RawExpr] = []
            if not self.at_punct(")"):
                items.append(self.parse_expr())
                while self.at_punct(","):
                    self.next()
                    items.append(self.parse_expr())
            self.expect_punct(")")
            args = tuple(items)
        return ast.RefExpr(tok.text, member, args, span=tok.span.cover(self._prev_span()))


def parse(tokens: list[Token], file: str = "<input>") -> ast.RawStoryboard:
    """Parse a token sequence. Raises :class:`ParseErrors` with every error found."""
    return Parser(list(tokens), file).parse_storyboard()


def parse_source(source: str | bytes, file: str = "<input>") -> ast.RawStoryboard:
    return parse(tokenize(source, file), file)
