"""Resolved, immutable storyboard model."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from ..dsl.syntax import RawStoryboard
from ..span import NO_SPAN, SourceSpan


def _span() -> SourceSpan:
    return field(default=NO_SPAN, compare=False, repr=False)


class Trust(str, Enum):
    PRIVATE = "private"
    SHARED = "shared"
    EXTERNAL = "external"


class WidgetKind(str, Enum):
    BUTTON = "Button"
    TEXT_VIEW = "TextView"
    TEXT_INPUT = "TextInput"


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: Union[str, int]
    span: SourceSpan = _span()


@dataclass(frozen=True)
class WidgetRef:
    screen: str
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class ParamRef:
    screen: str
    name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Call:
    resource: str
    capability: str
    args: tuple[Expr, ...] = ()
    # parentheses were written in the source; kept for printing only
    parens: bool = field(default=True, compare=False)
    span: SourceSpan = _span()

    @property
    def literal_key(self) -> Optional[Union[str, int]]:
        """The statically known asset key (first argument), if it is a literal."""
        if self.args and isinstance(self.args[0], Literal):
            return self.args[0].value
        return None


Expr = Union[Literal, WidgetRef, ParamRef, Call]


def iter_calls(expr: Expr) -> Iterator[Call]:
    """Calls inside ``expr`` in evaluation order (arguments before the call)."""
    if isinstance(expr, Call):
        for a in expr.args:
            yield from iter_calls(a)
        yield expr


# -- guards -----------------------------------------------------------------

@dataclass(frozen=True)
class Press:
    button: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Cond:
    expr: Expr
    span: SourceSpan = _span()


@dataclass(frozen=True)
class And:
    left: Guard
    right: Guard
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Or:
    left: Guard
    right: Guard
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Not:
    operand: Guard
    span: SourceSpan = _span()


Guard = Union[Press, Cond, And, Or, Not]


def guard_atoms(guard: Optional[Guard]) -> Iterator[Union[Press, Cond]]:
    """Atoms of ``guard`` left to right."""
    if guard is None:
        return
    if isinstance(guard, (Press, Cond)):
        yield guard
    elif isinstance(guard, Not):
        yield from guard_atoms(guard.operand)
    else:
        yield from guard_atoms(guard.left)
        yield from guard_atoms(guard.right)


# -- declarations -----------------------------------------------------------

@dataclass(frozen=True)
class Capability:
    name: str
    params: tuple[tuple[str, str], ...] = ()
    returns: Optional[str] = None
    sensitive: bool = False
    privileged: bool = False
    span: SourceSpan = _span()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ResourceView:
    name: str
    trust: Trust
    capabilities: tuple[Capability, ...]
    span: SourceSpan = _span()

    def capability(self, name: str) -> Capability:
        for cap in self.capabilities:
            if cap.name == name:
                return cap
        raise KeyError(f"{self.name}.{name}")


@dataclass(frozen=True)
class SecurityRequirement:
    asset: str
    kind: str = "IsPrivate"
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Widget:
    kind: WidgetKind
    name: str
    init: Optional[Expr] = None
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Propagation:
    expr: Expr
    param: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Transition:
    source: str
    index: int
    target: str
    guard: Optional[Guard] = None
    propagations: tuple[Propagation, ...] = ()
    span: SourceSpan = _span()

    @property
    def label(self) -> str:
        return f"{self.source}->{self.target}#{self.index}"


@dataclass(frozen=True)
class Screen:
    name: str
    launcher: bool = False
    exported: bool = False
    params: tuple[tuple[str, str], ...] = ()
    widgets: tuple[Widget, ...] = ()
    transitions: tuple[Transition, ...] = ()
    span: SourceSpan = _span()

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.params)

    def widget(self, name: str) -> Widget:
        for w in self.widgets:
            if w.name == name:
                return w
        raise KeyError(f"{self.name}.{name}")

    @property
    def buttons(self) -> tuple[str, ...]:
        return tuple(w.name for w in self.widgets if w.kind is WidgetKind.BUTTON)


@dataclass(frozen=True)
class Storyboard:
    app_name: str
    screens: tuple[Screen, ...]
    resources: tuple[ResourceView, ...]
    requirements: tuple[SecurityRequirement, ...]
    entry: str
    file: str = field(default="<input>", compare=False)
    raw: Optional[RawStoryboard] = field(default=None, compare=False, repr=False)

    def screen(self, name: str) -> Screen:
        for s in self.screens:
            if s.name == name:
                return s
        raise KeyError(name)

    def resource(self, name: str) -> ResourceView:
        for r in self.resources:
            if r.name == name:
                return r
        raise KeyError(name)

    def transitions(self) -> Iterator[Transition]:
        for s in self.screens:
            yield from s.transitions

    @property
    def private_assets(self) -> frozenset[str]:
        return frozenset(r.asset for r in self.requirements)

    def call_sites(self) -> Iterator[tuple[str, Call]]:
        """Every call with the screen it executes on, in source order."""
        for s in self.screens:
            for w in s.widgets:
                if w.init is not None:
                    for c in iter_calls(w.init):
                        yield s.name, c
            for t in s.transitions:
                for atom in guard_atoms(t.guard):
                    if isinstance(atom, Cond):
                        for c in iter_calls(atom.expr):
                            yield s.name, c
                for p in t.propagations:
                    for c in iter_calls(p.expr):
                        yield s.name, c
