"""Characterization tests: one replayable scenario per transition, one per screen.

A transition test drives the interpreter to the transition's source screen and
checks that the stimulus fires it. A negative test checks that an unmatched
event leaves the screen and its bindings untouched. Expectations compare taint
and sensitivity tags only, never concrete values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from ..flow.graph import literal_keys
from ..model.checks import is_contradictory
from ..model.serialize import storyboard_hash
from ..model.types import Storyboard, Transition
from ..interp.explore import alphabet, environment_events
from ..interp.machine import init_state, step
from ..interp.values import (SEED, EnvWrite, Event, ExecState, Press, Restart, LaunchExported,
                             TaggedValue, event_from_json, event_json, origin_from_json,
                             origin_json, tagged_from_json, tagged_json)

SCHEMA = "sema-tests/1"
SEARCH_DEPTH = 4

OK = "ok"
SKIPPED = "skipped"

Seed = tuple  # (resource, key, TaggedValue)
BindingTags = tuple  # (param, frozenset taint, frozenset sensitivity)


@dataclass(frozen=True)
class TestSpec:
    __test__ = False  # keep pytest from collecting this class

    name: str
    kind: str                      # "transition" or "negative"
    status: str = OK
    reason: str = ""
    transition: Optional[str] = None
    seeds: tuple = ()
    setup: tuple = ()
    stimulus: Optional[Event] = None
    expect_screen: Optional[str] = None
    expect_bindings: tuple = ()


def binding_tags(state: ExecState) -> tuple:
    return tuple((p, v.taint, v.sensitivity) for p, v in state.bindings)


def replay(sb: Storyboard, spec: TestSpec) -> ExecState:
    """Run a spec's seeds, setup and stimulus; return the final state."""
    state = init_state(sb, {(r, k): v for r, k, v in spec.seeds})
    for ev in spec.setup:
        state = step(state, ev)
    return step(state, spec.stimulus)


def conforms(sb: Storyboard, spec: TestSpec) -> bool:
    if spec.status != OK:
        return True
    after = replay(sb, spec)
    if spec.transition is not None and after.trace[-1].taken != spec.transition:
        return False
    if spec.kind == "negative" and after.trace[-1].taken is not None:
        return False
    return after.current == spec.expect_screen and binding_tags(after) == spec.expect_bindings


def _all_seeds(sb: Storyboard) -> tuple:
    keys = literal_keys(sb)
    nullary = {c.resource for _, c in sb.call_sites() if not c.args}
    out = []
    for r in sb.resources:
        for k in list(keys[r.name]) + ([None] if r.name in nullary else []):
            out.append((r.name, k, TaggedValue(SEED)))
    return tuple(out)


def _search(sb: Storyboard, seeds: tuple, depth: int):
    """Shortest event sequences firing each transition and reaching each screen."""
    env = environment_events(sb)
    root = init_state(sb, {(r, k): v for r, k, v in seeds})
    fired: dict[str, tuple] = {}
    reached: dict[str, tuple] = {root.current: ((), root)}
    seen = {root.key()}
    frontier = [((), root)]
    for _ in range(depth):
        nxt = []
        for events, state in frontier:
            for ev in alphabet(state, env):
                after = step(state, ev)
                path = events + (ev,)
                taken = after.trace[-1].taken
                if taken is not None and taken not in fired:
                    fired[taken] = path
                if after.current not in reached:
                    reached[after.current] = (path, after)
                k = after.key()
                if k not in seen:
                    seen.add(k)
                    nxt.append((path, after))
        frontier = nxt
    return fired, reached


def _fires(sb: Storyboard, t: Transition, seeds: tuple, events: tuple) -> bool:
    state = init_state(sb, {(r, k): v for r, k, v in seeds})
    for ev in events:
        state = step(state, ev)
    return state.trace[-1].taken == t.label


def _minimize(sb: Storyboard, t: Transition, seeds: tuple, events: tuple) -> tuple:
    kept = list(seeds)
    for s in seeds:
        trial = tuple(x for x in kept if x != s)
        if _fires(sb, t, trial, events):
            kept = list(trial)
    return tuple(kept)


def _spec_name(prefix: str, *parts: str) -> str:
    return "_".join((prefix,) + parts)


def _transition_spec(sb, t, events, seeds) -> TestSpec:
    spec = TestSpec(_spec_name("fires", t.source, "to", t.target, str(t.index)), "transition",
                    transition=t.label, seeds=seeds, setup=events[:-1], stimulus=events[-1])
    after = replay(sb, spec)
    return TestSpec(**{**spec.__dict__, "expect_screen": after.current,
                       "expect_bindings": binding_tags(after)})


def _negative_spec(sb, screen: str, reached) -> TestSpec:
    name = _spec_name("stays", screen)
    if screen not in reached:
        return TestSpec(name, "negative", SKIPPED, f"screen not reachable within {SEARCH_DEPTH} events")
    events, state = reached[screen]
    env = [e for e in environment_events(sb) if isinstance(e, EnvWrite)]
    for ev in alphabet(state, env):
        after = step(state, ev)
        if after.trace[-1].taken is None and after.current == screen \
                and binding_tags(after) == binding_tags(state):
            return TestSpec(name, "negative", setup=events, stimulus=ev,
                            expect_screen=screen, expect_bindings=binding_tags(state))
    return TestSpec(name, "negative", SKIPPED, "every available event leaves the screen")


def generate_characterization_tests(sb: Storyboard, depth: int = SEARCH_DEPTH) -> list[TestSpec]:
    """Transition specs in declaration order, then one negative spec per screen.

    Every emitted spec with status ``ok`` is replayed before it is returned.
    """
    plain_fired, reached = _search(sb, (), depth)
    seeds = _all_seeds(sb)
    seeded_fired = _search(sb, seeds, depth)[0] if seeds else {}
    specs = []
    for t in sb.transitions():
        name = _spec_name("fires", t.source, "to", t.target, str(t.index))
        if t.guard is not None and is_contradictory(t.guard):
            specs.append(TestSpec(name, "transition", SKIPPED, "guard is unsatisfiable",
                                  transition=t.label))
            continue
        plain, seeded = plain_fired.get(t.label), seeded_fired.get(t.label)
        if plain is None and seeded is None:
            specs.append(TestSpec(name, "transition", SKIPPED,
                                  f"no firing trace within {depth} events", transition=t.label))
        elif seeded is not None and (plain is None or len(seeded) < len(plain)):
            specs.append(_transition_spec(sb, t, seeded, _minimize(sb, t, seeds, seeded)))
        else:
            specs.append(_transition_spec(sb, t, plain, ()))
    for s in sb.screens:
        specs.append(_negative_spec(sb, s.name, reached))
    for spec in specs:
        if not conforms(sb, spec):
            raise AssertionError(f"generated spec {spec.name} does not replay")
    return specs


# -- JSON ---------------------------------------------------------------------

def spec_json(spec: TestSpec) -> dict:
    return {
        "name": spec.name, "kind": spec.kind, "status": spec.status, "reason": spec.reason,
        "transition": spec.transition,
        "seeds": [{"resource": r, "key": k, "value": tagged_json(v)} for r, k, v in spec.seeds],
        "setup": [event_json(e) for e in spec.setup],
        "stimulus": event_json(spec.stimulus) if spec.stimulus is not None else None,
        "expect": {
            "screen": spec.expect_screen,
            "bindings": [{"param": p,
                          "taint": [origin_json(o) for o in sorted(t, key=lambda o: o.sort_key)],
                          "sensitivity": sorted(s)} for p, t, s in spec.expect_bindings],
        },
    }


def spec_from_json(obj: dict) -> TestSpec:
    exp = obj["expect"]
    return TestSpec(
        obj["name"], obj["kind"], obj["status"], obj["reason"], obj["transition"],
        tuple((s["resource"], s["key"], tagged_from_json(s["value"])) for s in obj["seeds"]),
        tuple(event_from_json(e) for e in obj["setup"]),
        event_from_json(obj["stimulus"]) if obj["stimulus"] is not None else None,
        exp["screen"],
        tuple((b["param"], frozenset(origin_from_json(o) for o in b["taint"]),
               frozenset(b["sensitivity"])) for b in exp["bindings"]),
    )


def tests_document(sb: Storyboard, specs: list[TestSpec]) -> dict:
    return {"schema": SCHEMA, "storyboard": storyboard_hash(sb),
            "tests": [spec_json(s) for s in specs]}


def dumps(sb: Storyboard, specs: list[TestSpec]) -> str:
    return json.dumps(tests_document(sb, specs), indent=2, sort_keys=True) + "\n"
