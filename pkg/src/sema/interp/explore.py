"""Bounded exhaustive exploration of event sequences."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from ..errors import BudgetExceeded
from ..flow.graph import FlowNode, literal_keys
from ..model.types import Storyboard, Trust
from .machine import adversary_value, init_state, step
from .values import EnvWrite, Event, ExecState, LaunchExported, Press, Restart, TraceStep, event_json

MAX_DEPTH = 8
DEFAULT_BUDGET = 10 ** 6
TRACE_SCHEMA = "sema-trace/1"

Trace = tuple  # tuple[TraceStep, ...]


@dataclass(frozen=True)
class Adversary:
    """Which environment moves are available besides the user's button presses."""

    env_writes: bool = True
    launch_exported: bool = True
    restart: bool = True


def environment_events(sb: Storyboard, env: Adversary = Adversary()) -> list[Event]:
    """Events available in every state: tainted writes, exported launches, restart."""
    out: list[Event] = []
    if env.env_writes:
        keys = literal_keys(sb)
        nullary = {c.resource for _, c in sb.call_sites() if not c.args}
        for r in sb.resources:
            if r.trust is not Trust.EXTERNAL:
                continue
            targets = list(keys[r.name]) + ([None] if r.name in nullary else [])
            for k in targets:
                out.append(EnvWrite(r.name, k, adversary_value(FlowNode.cell(r.name, k))))
    if env.launch_exported:
        for s in sb.screens:
            if s.exported:
                args = tuple(adversary_value(FlowNode.param(s.name, p)) for p in s.param_names)
                out.append(LaunchExported(s.name, args))
    if env.restart:
        out.append(Restart())
    return out


def alphabet(state: ExecState, env_events: list[Event]) -> list[Event]:
    presses: list[Event] = [Press(b) for b in state.sb.screen(state.current).buttons]
    return presses + env_events


def enumerate_traces(sb: Storyboard, depth: int, env: Adversary = Adversary(),
                     max_steps: int = DEFAULT_BUDGET, dedup: bool = True,
                     start: Optional[ExecState] = None) -> list[Trace]:
    """All event sequences of length <= ``depth``, breadth first.

    With ``dedup`` a trace is still reported but not extended when its final
    state was already reached by an earlier (no longer) trace. Every state and
    every flow reachable within ``depth`` is still covered.
    """
    if not 0 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be between 0 and {MAX_DEPTH}")
    env_events = environment_events(sb, env)
    root = start if start is not None else init_state(sb)
    traces: list[Trace] = [()]
    frontier = [root]
    seen = {root.key()}
    steps = 0
    for _ in range(depth):
        nxt = []
        for state in frontier:
            for ev in alphabet(state, env_events):
                steps += 1
                if steps > max_steps:
                    raise BudgetExceeded(max_steps)
                after = step(state, ev)
                traces.append(after.trace)
                if dedup:
                    k = after.key()
                    if k in seen:
                        continue
                    seen.add(k)
                nxt.append(after)
        frontier = nxt
    return traces


def observed_flows(traces: Iterable[Trace]) -> set[tuple[str, str, str]]:
    out: set = set()
    for trace in traces:
        for s in trace:
            out |= s.flows
    return out


def trace_jsonl(traces: Iterable[Trace]) -> str:
    lines = []
    for i, trace in enumerate(traces):
        for j, s in enumerate(trace):
            lines.append(json.dumps({
                "schema": TRACE_SCHEMA, "trace": i, "step": j, "event": event_json(s.event),
                "taken": s.taken, "screen": s.screen,
                "flows": [list(f) for f in sorted(s.flows)],
            }, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")
