"""Concrete interpreter: the dynamic oracle for the static flow analysis."""

from .explore import (
    Adversary, alphabet, enumerate_traces, environment_events, observed_flows, trace_jsonl,
)
from .machine import adversary_value, init_state, step
from .values import (
    EnvWrite, Event, ExecState, LaunchExported, Opaque, Press, Restart, TaggedValue, TraceStep,
    event_from_json, event_json, tagged_json,
)

__all__ = [
    "Adversary", "alphabet", "enumerate_traces", "environment_events", "observed_flows",
    "trace_jsonl", "adversary_value", "init_state", "step", "EnvWrite", "Event", "ExecState",
    "LaunchExported", "Opaque", "Press", "Restart", "TaggedValue", "TraceStep",
    "event_from_json", "event_json", "tagged_json",
]
