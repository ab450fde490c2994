"""Deterministic single-step semantics of a storyboard."""

from __future__ import annotations

from typing import Optional

from ..errors import EvalError, InvalidEvent
from ..flow.graph import FlowNode
from ..flow.properties import Property, SOURCE_KIND
from ..flow.taint import origin_kind
from ..model import types as mt
from ..model.types import Storyboard, Trust, WidgetKind
from .values import (
    ADVERSARY, BUTTON, FAILURE, FRESH, SUCCESS, UNSET, USER_INPUT, EnvWrite, Event, ExecState,
    LaunchExported, Press, Restart, TaggedValue, TraceStep, canonical_store,
)

_P1, _P2, _P3, _P4 = (Property.P1, Property.P2, Property.P3, Property.P4)


def _flow(prop: Property, sink: str) -> tuple[str, str, str]:
    return (prop.value, SOURCE_KIND[prop], sink)


class _Exec:
    """Mutable scratch space for evaluating one event."""

    def __init__(self, sb: Storyboard, store: dict, entry_exported: Optional[str]):
        self.sb = sb
        self.store = store
        self.entry_exported = entry_exported
        self.flows: set = set()
        self.assets = sb.private_assets

    def eval(self, e: mt.Expr, widgets: dict, bindings: dict) -> TaggedValue:
        if isinstance(e, mt.Literal):
            return TaggedValue(e.value)
        if isinstance(e, mt.WidgetRef):
            try:
                return widgets[e.name]
            except KeyError:
                raise EvalError(f"widget {e.name!r} used before initialisation") from None
        if isinstance(e, mt.ParamRef):
            return bindings[e.name]
        args = [self.eval(a, widgets, bindings) for a in e.args]
        return self.call(e, args)

    def call(self, call: mt.Call, args: list[TaggedValue]) -> TaggedValue:
        try:
            res = self.sb.resource(call.resource)
            cap = res.capability(call.capability)
        except KeyError:
            raise EvalError(f"undeclared capability {call.resource}.{call.capability}") from None
        label = f"{res.name}.{cap.name}"
        if cap.sensitive:
            for a in args:
                for o in a.taint:
                    kind = origin_kind(o)
                    if kind == "exported-input":
                        self.flows.add(_flow(_P1, label))
                    elif kind == "external-resource":
                        self.flows.add(_flow(_P2, label))
        if res.trust is Trust.EXTERNAL and any(a.sensitivity for a in args):
            self.flows.add(_flow(_P3, label))
        if cap.privileged and self.entry_exported is not None:
            self.flows.add(_flow(_P4, label))

        key = args[0].value if args else None
        if cap.returns is not None:
            stored = self.store.get((res.name, key), TaggedValue(FRESH))
            sens = set()
            if res.trust is Trust.PRIVATE:
                sens.add(res.name)
            if isinstance(key, str) and key in self.assets:
                sens.add(key)
            return stored.with_tags(frozenset(), frozenset(sens))
        if args:
            taint = frozenset().union(*(a.taint for a in args))
            sens = frozenset().union(*(a.sensitivity for a in args))
            self.store[(res.name, key)] = TaggedValue(args[-1].value, taint, sens)
        return TaggedValue(SUCCESS if all(a.truthy for a in args) else FAILURE)

    def guard(self, g: mt.Guard, ev: Event, widgets: dict, bindings: dict, acc: list) -> bool:
        if isinstance(g, mt.Press):
            return isinstance(ev, Press) and ev.button == g.button
        if isinstance(g, mt.Cond):
            v = self.eval(g.expr, widgets, bindings)
            acc[0] |= v.taint
            acc[1] |= v.sensitivity
            return v.truthy
        if isinstance(g, mt.Not):
            return not self.guard(g.operand, ev, widgets, bindings, acc)
        if isinstance(g, mt.And):
            return (self.guard(g.left, ev, widgets, bindings, acc)
                    and self.guard(g.right, ev, widgets, bindings, acc))
        return (self.guard(g.left, ev, widgets, bindings, acc)
                or self.guard(g.right, ev, widgets, bindings, acc))

    def enter(self, screen: mt.Screen, bindings: dict) -> dict:
        widgets: dict = {}
        for w in screen.widgets:
            if w.init is not None:
                widgets[w.name] = self.eval(w.init, widgets, bindings)
            elif w.kind is WidgetKind.BUTTON:
                widgets[w.name] = TaggedValue(BUTTON)
            elif w.kind is WidgetKind.TEXT_INPUT:
                widgets[w.name] = TaggedValue(USER_INPUT)
            else:
                widgets[w.name] = TaggedValue("")
        return widgets


def _state(sb, current, widgets, bindings, store, entry_exported, trace) -> ExecState:
    return ExecState(sb, current, tuple(widgets.items()), tuple(bindings.items()),
                     canonical_store(store), entry_exported, trace)


def init_state(sb: Storyboard, store: Optional[dict] = None) -> ExecState:
    """Launch the app at its entry screen. ``store`` pre-seeds persisted data."""
    ex = _Exec(sb, dict(store or {}), None)
    entry = sb.screen(sb.entry)
    bindings = {p: TaggedValue(UNSET) for p in entry.param_names}
    widgets = ex.enter(entry, bindings)
    return _state(sb, entry.name, widgets, bindings, ex.store, None, ())


def step(state: ExecState, ev: Event) -> ExecState:
    """Apply one event. Raises :class:`InvalidEvent` if ``ev`` is not allowed in ``state``."""
    sb = state.sb
    ex = _Exec(sb, dict(state.store), state.entry_exported)
    current = sb.screen(state.current)
    widgets = dict(state.widgets)
    bindings = dict(state.bindings)
    taken = None

    if isinstance(ev, Press):
        if ev.button not in current.buttons:
            raise InvalidEvent(f"{ev.button!r} is not a button of screen {current.name!r}")
        for t in current.transitions:
            acc = [frozenset(), frozenset()]
            if t.guard is not None and not ex.guard(t.guard, ev, widgets, bindings, acc):
                continue
            new_bindings = {}
            for p in t.propagations:
                v = ex.eval(p.expr, widgets, bindings).with_tags(acc[0], acc[1])
                if current.exported and v.sensitivity:
                    ex.flows.add(_flow(_P3, f"propagate:{t.source}->{t.target}.{p.param}"))
                new_bindings[p.param] = v
            target = sb.screen(t.target)
            widgets = ex.enter(target, new_bindings)
            bindings = new_bindings
            current = target
            taken = t.label
            break
    elif isinstance(ev, LaunchExported):
        target = sb.screen(ev.screen) if ev.screen in {s.name for s in sb.screens} else None
        if target is None or not target.exported:
            raise InvalidEvent(f"screen {ev.screen!r} is not exported")
        if len(ev.args) != len(target.params):
            raise InvalidEvent(f"screen {ev.screen!r} takes {len(target.params)} argument(s)")
        ex.entry_exported = target.name
        bindings = dict(zip(target.param_names, ev.args))
        widgets = ex.enter(target, bindings)
        current = target
    elif isinstance(ev, EnvWrite):
        try:
            res = sb.resource(ev.resource)
        except KeyError:
            res = None
        if res is None or res.trust is not Trust.EXTERNAL:
            raise InvalidEvent(f"resource {ev.resource!r} is not external")
        ex.store[(res.name, ev.key)] = ev.value
    elif isinstance(ev, Restart):
        ex.entry_exported = None
        current = sb.screen(sb.entry)
        bindings = {p: TaggedValue(UNSET) for p in current.param_names}
        widgets = ex.enter(current, bindings)
    else:
        raise InvalidEvent(f"unknown event {ev!r}")

    record = TraceStep(ev, taken, frozenset(ex.flows), current.name)
    return _state(sb, current.name, widgets, bindings, ex.store, ex.entry_exported,
                  state.trace + (record,))


def adversary_value(origin: FlowNode) -> TaggedValue:
    """The canonical untrusted payload entering at ``origin``."""
    return TaggedValue(ADVERSARY, frozenset({origin}))
