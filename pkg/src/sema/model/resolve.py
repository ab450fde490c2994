"""Name resolution and validation: syntax tree -> :class:`Storyboard`."""

from __future__ import annotations

from typing import Optional

from ..dsl import syntax as ast
from ..errors import ResolveError, ResolveErrors
from ..span import SourceSpan
from .types import (
    And, Call, Capability, Cond, Expr, Guard, Literal, Not, Or, ParamRef, Press,
    Propagation, ResourceView, Screen, SecurityRequirement, Storyboard, Transition,
    Trust, Widget, WidgetKind, WidgetRef,
)

UNKNOWN_SCREEN = "UnknownScreen"
UNKNOWN_RESOURCE = "UnknownResource"
UNKNOWN_CAPABILITY = "UnknownCapability"
ARITY_MISMATCH = "ArityMismatch"
DUPLICATE_NAME = "DuplicateName"
NO_LAUNCHER = "NoLauncher"
MULTIPLE_LAUNCHERS = "MultipleLaunchers"
PRESS_ON_NON_BUTTON = "PressOnNonButton"
UNBOUND_PARAM = "UnboundParam"
# kinds beyond the core set, for constructs the grammar accepts but the model cannot bind
UNKNOWN_NAME = "UnknownName"
MALFORMED_EXPR = "MalformedExpr"
INVALID_INIT = "InvalidInit"
MISPLACED_TRANSITION = "MisplacedTransition"
EMPTY_ASSET = "EmptyAsset"


class _Resolver:
    def __init__(self, raw: ast.RawStoryboard):
        self.raw = raw
        self.errors: list[ResolveError] = []
        self.resources: dict[str, ResourceView] = {}
        self.raw_screens: dict[str, ast.RawScreen] = {}

    def error(self, kind: str, span: SourceSpan, message: str) -> None:
        self.errors.append(ResolveError(kind, span, message))

    def run(self) -> Storyboard:
        raw = self.raw
        resources = [self.resource(r) for r in raw.resources]
        requirements = self.requirements(raw.requirements)

        for scr in raw.screens:
            if scr.name in self.raw_screens:
                self.error(DUPLICATE_NAME, scr.span, f"screen {scr.name!r} declared twice")
            else:
                self.raw_screens[scr.name] = scr

        launchers = [s for s in raw.screens if "launcher" in s.flags]
        entry = launchers[0].name if launchers else ""
        if not launchers:
            self.error(NO_LAUNCHER, raw.span, "no screen is marked 'launcher'")
        for extra in launchers[1:]:
            self.error(MULTIPLE_LAUNCHERS, extra.span,
                       f"screen {extra.name!r} is a second launcher (first: {entry!r})")

        screens = [self.screen(s) for s in raw.screens]
        if self.errors:
            raise ResolveErrors(self.errors)
        return Storyboard(raw.app_name, tuple(screens), tuple(resources), tuple(requirements),
                          entry, file=raw.span.file, raw=raw)

    # -- declarations ---------------------------------------------------

    def resource(self, r: ast.RawResource) -> ResourceView:
        caps: list[Capability] = []
        seen: set[str] = set()
        for c in r.capabilities:
            if c.name in seen:
                self.error(DUPLICATE_NAME, c.span, f"capability {r.name}.{c.name} declared twice")
                continue
            seen.add(c.name)
            params = self.params(c.params, f"capability {r.name}.{c.name}")
            caps.append(Capability(c.name, params, c.returns, "sensitive" in c.annotations,
                                   "privileged" in c.annotations, span=c.span))
        view = ResourceView(r.name, Trust(r.trust), tuple(caps), span=r.span)
        if r.name in self.resources:
            self.error(DUPLICATE_NAME, r.span, f"resource {r.name!r} declared twice")
        else:
            self.resources[r.name] = view
        return view

    def params(self, params: tuple[ast.RawParam, ...], owner: str) -> tuple[tuple[str, str], ...]:
        out = []
        seen: set[str] = set()
        for p in params:
            if p.name in seen:
                self.error(DUPLICATE_NAME, p.span, f"parameter {p.name!r} of {owner} declared twice")
                continue
            seen.add(p.name)
            out.append((p.name, p.type_name))
        return tuple(out)

    def requirements(self, reqs: tuple[ast.RawRequirement, ...]) -> list[SecurityRequirement]:
        out = []
        seen: set[str] = set()
        for r in reqs:
            if not r.asset:
                self.error(EMPTY_ASSET, r.span, "security requirement names an empty asset")
            elif r.asset in seen:
                self.error(DUPLICATE_NAME, r.span, f"asset {r.asset!r} listed twice")
            else:
                seen.add(r.asset)
                out.append(SecurityRequirement(r.asset, span=r.span))
        return out

    def screen(self, s: ast.RawScreen) -> Screen:
        params = self.params(s.params or (), f"screen {s.name}")
        param_names = {p for p, _ in params}
        widgets: list[Widget] = []
        names: set[str] = set()
        for w in s.widgets:
            if w.name in names or w.name in param_names:
                self.error(DUPLICATE_NAME, w.span, f"name {w.name!r} already declared in screen {s.name!r}")
                continue
            kind = WidgetKind(w.kind)
            init = None
            if w.init is not None:
                if kind is WidgetKind.BUTTON:
                    self.error(INVALID_INIT, w.span, f"Button {w.name!r} cannot have an init expression")
                else:
                    init = self.expr(w.init, s.name, param_names, {x.name: x.kind for x in widgets})
            widgets.append(Widget(kind, w.name, init, span=w.span))
            names.add(w.name)
        scope = {w.name: w.kind for w in widgets}
        transitions = [self.transition(t, i, s, param_names, scope)
                       for i, t in enumerate(s.transitions)]
        return Screen(s.name, "launcher" in s.flags, "exported" in s.flags, params,
                      tuple(widgets), tuple(t for t in transitions if t is not None), span=s.span)

    def transition(self, t: ast.RawTransition, index: int, s: ast.RawScreen,
                   params: set[str], widgets: dict[str, WidgetKind]) -> Optional[Transition]:
        if t.source not in self.raw_screens:
            self.error(UNKNOWN_SCREEN, t.span, f"unknown source screen {t.source!r}")
        elif t.source != s.name:
            self.error(MISPLACED_TRANSITION, t.span,
                       f"transition from {t.source!r} is declared inside screen {s.name!r}")
        target = self.raw_screens.get(t.target)
        if target is None:
            self.error(UNKNOWN_SCREEN, t.span, f"unknown target screen {t.target!r}")
        guard = self.guard(t.guard, s.name, params, widgets) if t.guard is not None else None
        props = []
        covered: set[str] = set()
        target_params = {p.name for p in (target.params or ())} if target is not None else None
        for p in t.propagations:
            expr = self.expr(p.expr, s.name, params, widgets)
            if target_params is not None and p.param not in target_params:
                self.error(UNBOUND_PARAM, p.span,
                           f"screen {t.target!r} has no parameter {p.param!r}")
            elif p.param in covered:
                self.error(DUPLICATE_NAME, p.span, f"parameter {p.param!r} propagated twice")
            covered.add(p.param)
            if expr is not None:
                props.append(Propagation(expr, p.param, span=p.span))
        if target is not None:
            for p in target.params or ():
                if p.name not in covered:
                    self.error(UNBOUND_PARAM, t.span,
                               f"transition to {t.target!r} does not propagate parameter {p.name!r}")
        return Transition(s.name, index, t.target, guard, tuple(props), span=t.span)

    # -- guards and expressions ---------------------------------------------

    def guard(self, g: ast.RawGuard, screen: str, params: set[str],
              widgets: dict[str, WidgetKind]) -> Optional[Guard]:
        if isinstance(g, ast.PressAtom):
            if widgets.get(g.button) is not WidgetKind.BUTTON:
                what = "not a Button" if g.button in widgets else "not a widget"
                self.error(PRESS_ON_NON_BUTTON, g.span,
                           f"{g.button!r} is {what} of screen {screen!r}")
            return Press(g.button, span=g.span)
        if isinstance(g, ast.CondAtom):
            expr = self.expr(g.expr, screen, params, widgets)
            return Cond(expr, span=g.span) if expr is not None else None
        if isinstance(g, ast.NotGuard):
            inner = self.guard(g.operand, screen, params, widgets)
            return Not(inner, span=g.span) if inner is not None else None
        left = self.guard(g.left, screen, params, widgets)
        right = self.guard(g.right, screen, params, widgets)
        if left is None or right is None:
            return None
        cls = And if isinstance(g, ast.AndGuard) else Or
        return cls(left, right, span=g.span)

    def expr(self, e: ast.RawExpr, screen: str, params: set[str],
             widgets: dict[str, WidgetKind]) -> Optional[Expr]:
        if isinstance(e, (ast.StrLit, ast.IntLit)):
            return Literal(e.value, span=e.span)
        if e.member is None:
            if e.args is not None:
                self.error(MALFORMED_EXPR, e.span,
                           f"call {e.name}(...) must name a resource capability as Resource.capability(...)")
                return None
            if e.name in widgets:
                return WidgetRef(screen, e.name, span=e.span)
            if e.name in params:
                return ParamRef(screen, e.name, span=e.span)
            self.error(UNKNOWN_NAME, e.span, f"{e.name!r} is not a parameter or earlier widget of {screen!r}")
            return None
        res = self.resources.get(e.name)
        if res is None:
            self.error(UNKNOWN_RESOURCE, e.span, f"unknown resource {e.name!r}")
            return None
        try:
            cap = res.capability(e.member)
        except KeyError:
            self.error(UNKNOWN_CAPABILITY, e.span, f"resource {e.name!r} has no capability {e.member!r}")
            return None
        raw_args = e.args or ()
        if len(raw_args) != cap.arity:
            self.error(ARITY_MISMATCH, e.span,
                       f"{e.name}.{e.member} takes {cap.arity} argument(s), got {len(raw_args)}")
        args = [self.expr(a, screen, params, widgets) for a in raw_args]
        if any(a is None for a in args):
            return None
        return Call(e.name, e.member, tuple(args), parens=e.args is not None, span=e.span)


def resolve(raw: ast.RawStoryboard) -> Storyboard:
    """Resolve ``raw``; raises :class:`ResolveErrors` listing every problem found."""
    return _Resolver(raw).run()
