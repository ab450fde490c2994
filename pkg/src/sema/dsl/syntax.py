"""Syntax tree produced by the parser.

Spans are excluded from equality so two trees compare equal when they have
the same structure, which is what the round-trip property checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..span import NO_SPAN, SourceSpan


def _span() -> SourceSpan:
    return field(default=NO_SPAN, compare=False, repr=False)


@dataclass(frozen=True)
class StrLit:
    value: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class IntLit:
    value: int
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RefExpr:
    """``name``, ``name.member``, optionally followed by an argument list.

    ``args is None`` means no parentheses were written.
    """

    name: str
    member: Optional[str] = None
    args: Optional[tuple[RawExpr, ...]] = None
    span: SourceSpan = _span()


RawExpr = Union[StrLit, IntLit, RefExpr]


@dataclass(frozen=True)
class PressAtom:
    button: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class CondAtom:
    expr: RawExpr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class AndGuard:
    left: RawGuard
    right: RawGuard
    span: SourceSpan = _span()


@dataclass(frozen=True)
class OrGuard:
    left: RawGuard
    right: RawGuard
    span: SourceSpan = _span()


@dataclass(frozen=True)
class NotGuard:
    operand: RawGuard
    span: SourceSpan = _span()


RawGuard = Union[PressAtom, CondAtom, AndGuard, OrGuard, NotGuard]


@dataclass(frozen=True)
class RawParam:
    name: str
    type_name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawCapability:
    name: str
    params: tuple[RawParam, ...] = ()
    returns: Optional[str] = None
    annotations: tuple[str, ...] = ()
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawResource:
    name: str
    trust: str
    capabilities: tuple[RawCapability, ...]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawRequirement:
    asset: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawWidget:
    kind: str
    name: str
    init: Optional[RawExpr] = None
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawPropagation:
    expr: RawExpr
    param: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawTransition:
    source: str
    target: str
    guard: Optional[RawGuard] = None
    propagations: tuple[RawPropagation, ...] = ()
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawScreen:
    name: str
    flags: tuple[str, ...] = ()
    params: Optional[tuple[RawParam, ...]] = None
    widgets: tuple[RawWidget, ...] = ()
    transitions: tuple[RawTransition, ...] = ()
    span: SourceSpan = _span()


@dataclass(frozen=True)
class RawStoryboard:
    app_name: str
    resources: tuple[RawResource, ...] = ()
    requirements: tuple[RawRequirement, ...] = ()
    screens: tuple[RawScreen, ...] = ()
    span: SourceSpan = _span()
