"""Concrete values, events and states of the storyboard interpreter."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from ..flow.graph import FlowNode, NodeKind
from ..model.types import Storyboard


@dataclass(frozen=True)
class Opaque:
    """A value the storyboard cannot inspect, e.g. user input or an adversary payload."""

    name: str

    def __repr__(self) -> str:
        return f"<{self.name}>"


FRESH = Opaque("fresh")
SUCCESS = Opaque("success")
FAILURE = Opaque("failure")
USER_INPUT = Opaque("user-input")
ADVERSARY = Opaque("adversary")
UNSET = Opaque("unset")
BUTTON = Opaque("button")
SEED = Opaque("seed")

_FALSY = frozenset({FRESH, FAILURE, UNSET})

Value = Union[str, int, Opaque]
StoreKey = tuple  # (resource name, asset key or None)


@dataclass(frozen=True)
class TaggedValue:
    value: Value
    taint: frozenset = frozenset()        # origins (FlowNode) of untrusted data
    sensitivity: frozenset = frozenset()  # sensitive asset names

    @property
    def truthy(self) -> bool:
        if isinstance(self.value, Opaque):
            return self.value not in _FALSY
        return bool(self.value)

    def with_tags(self, taint: frozenset, sensitivity: frozenset) -> TaggedValue:
        if taint <= self.taint and sensitivity <= self.sensitivity:
            return self
        return TaggedValue(self.value, self.taint | taint, self.sensitivity | sensitivity)


# -- events -----------------------------------------------------------------

@dataclass(frozen=True)
class Press:
    button: str


@dataclass(frozen=True)
class LaunchExported:
    screen: str
    args: tuple[TaggedValue, ...] = ()


@dataclass(frozen=True)
class EnvWrite:
    resource: str
    key: Union[str, int, None]
    value: TaggedValue


@dataclass(frozen=True)
class Restart:
    pass


Event = Union[Press, LaunchExported, EnvWrite, Restart]

Flow = tuple  # (property tag, source kind, sink)


@dataclass(frozen=True)
class TraceStep:
    event: Event
    taken: Optional[str]
    flows: frozenset
    screen: str


@dataclass(frozen=True)
class ExecState:
    """Interpreter state. ``store`` survives restarts; it models persisted data.

    Only the current screen's widgets are kept, because a screen re-runs its
    init expressions every time it is entered.
    """

    sb: Storyboard = field(compare=False, repr=False, hash=False)
    current: str
    widgets: tuple[tuple[str, TaggedValue], ...]
    bindings: tuple[tuple[str, TaggedValue], ...]
    store: tuple[tuple[StoreKey, TaggedValue], ...]
    entry_exported: Optional[str] = None
    trace: tuple[TraceStep, ...] = field(default=(), compare=False, hash=False)

    def key(self) -> tuple:
        return (self.current, self.widgets, self.bindings, self.store, self.entry_exported)

    @property
    def widget_values(self) -> dict[tuple[str, str], TaggedValue]:
        return {(self.current, n): v for n, v in self.widgets}

    @property
    def binding_map(self) -> dict[str, TaggedValue]:
        return dict(self.bindings)

    @property
    def store_map(self) -> dict[StoreKey, TaggedValue]:
        return dict(self.store)


def canonical_store(store: dict) -> tuple:
    return tuple(sorted(store.items(), key=lambda kv: repr(kv[0])))


# -- JSON -------------------------------------------------------------------

def value_json(v: Value) -> Any:
    return {"opaque": v.name} if isinstance(v, Opaque) else v


def value_from_json(obj: Any) -> Value:
    return Opaque(obj["opaque"]) if isinstance(obj, dict) else obj


def origin_json(o: FlowNode) -> dict[str, Any]:
    return {"kind": o.kind.value, "parts": list(o.parts)}


def origin_from_json(obj: dict[str, Any]) -> FlowNode:
    return FlowNode(NodeKind(obj["kind"]), tuple(obj["parts"]))


def tagged_json(tv: TaggedValue) -> dict[str, Any]:
    return {"value": value_json(tv.value),
            "taint": [origin_json(o) for o in sorted(tv.taint, key=lambda o: o.sort_key)],
            "sensitivity": sorted(tv.sensitivity)}


def event_json(ev: Event) -> dict[str, Any]:
    if isinstance(ev, Press):
        return {"press": ev.button}
    if isinstance(ev, LaunchExported):
        return {"launch": ev.screen, "args": [tagged_json(a) for a in ev.args]}
    if isinstance(ev, EnvWrite):
        return {"env-write": {"resource": ev.resource, "key": ev.key, "value": tagged_json(ev.value)}}
    return {"restart": True}


def tagged_from_json(obj: dict[str, Any]) -> TaggedValue:
    return TaggedValue(value_from_json(obj["value"]),
                       frozenset(origin_from_json(o) for o in obj["taint"]),
                       frozenset(obj["sensitivity"]))


def event_from_json(obj: dict[str, Any]) -> Event:
    if "press" in obj:
        return Press(obj["press"])
    if "launch" in obj:
        return LaunchExported(obj["launch"], tuple(tagged_from_json(a) for a in obj["args"]))
    if "env-write" in obj:
        w = obj["env-write"]
        return EnvWrite(w["resource"], w["key"], tagged_from_json(w["value"]))
    return Restart()
