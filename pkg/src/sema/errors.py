"""Exception types raised by the pipeline stages."""

from __future__ import annotations

from typing import Iterable, Optional

from .span import SourceSpan


class SemaError(Exception):
    """Base class for every error this package raises on purpose."""


class LexError(SemaError):
    def __init__(self, span: SourceSpan, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


class ParseError(SemaError):
    def __init__(self, span: SourceSpan, expected: str, message: str):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.expected = expected
        self.message = message


class ParseErrors(SemaError):
    """All syntax errors collected during one parse."""

    def __init__(self, errors: Iterable[ParseError]):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


class ResolveError(SemaError):
    def __init__(self, kind: str, span: SourceSpan, message: str):
        super().__init__(f"{span}: {kind}: {message}")
        self.kind = kind
        self.span = span
        self.message = message


class ResolveErrors(SemaError):
    def __init__(self, errors: Iterable[ResolveError]):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))

    @property
    def kinds(self) -> list[str]:
        return [e.kind for e in self.errors]


class NoPath(SemaError):
    """Raised when a witness is requested for an unreachable sink."""


class EvalError(SemaError):
    pass


class InvalidEvent(SemaError):
    pass


class BudgetExceeded(SemaError):
    def __init__(self, limit: int):
        super().__init__(f"trace enumeration exceeded {limit} steps")
        self.limit = limit


class GenRefused(SemaError):
    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        super().__init__(message)
        self.span = span
