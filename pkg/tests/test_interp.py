import json

import jsonschema
import pytest

from sema import analyze, load_storyboard
from sema.corpus import corpus
from sema.errors import BudgetExceeded, InvalidEvent
from sema.flow.graph import FlowNode
from sema.interp import (Adversary, EnvWrite, LaunchExported, Press, Restart, TaggedValue,
                         enumerate_traces, init_state, observed_flows, step, trace_jsonl)
from sema.interp.machine import adversary_value
from sema.interp.values import ADVERSARY, FAILURE, FRESH, SUCCESS, USER_INPUT
from sema.schemas import load_schema

from conftest import app

RES = ("NET : external { post(u: Url, d: Data) fetch(u: Url) -> Data } "
       "SMS : shared { send(n: Num) sensitive } DB : private { get(k: Key) -> Data put(k: Key, d: Data) }")

ATTACK = EnvWrite("EXT_STORE", "MyContacts.txt",
                  adversary_value(FlowNode.cell("EXT_STORE", "MyContacts.txt")))


def run(state, *events):
    for ev in events:
        state = step(state, ev)
    return state


def test_initial_state(messenger):
    s = init_state(messenger)
    assert s.current == "Messenger"
    assert s.widget_values[("Messenger", "Title")].value == "Emergency"
    assert s.store == () and s.trace == ()


def test_unguarded_navigation_and_persisted_write(messenger):
    s = run(init_state(messenger), Press("Add"), Press("Save"))
    assert s.current == "SaveStatus"
    assert s.store_map[("EXT_STORE", "MyContacts.txt")].value == USER_INPUT
    assert [t.taken for t in s.trace] == ["Messenger->Contacts#0", "Contacts->SaveStatus#0"]


def test_read_of_empty_cell_is_falsy(messenger):
    s = run(init_state(messenger), Press("SendMsg"))
    assert s.current == "Messenger" and s.trace[-1].taken is None


def test_store_poisoning_attack_is_observed(messenger):
    s = run(init_state(messenger), ATTACK, Press("SendMsg"))
    assert s.current == "MsgStatus"
    assert s.binding_map["status"].value == "Message sent"
    assert s.trace[-1].flows == {("P2-UntrustedSourceToSensitiveOp", "external-resource", "SMS.send")}


def test_fixed_app_has_no_observable_flow(messenger_fixed):
    assert observed_flows(enumerate_traces(messenger_fixed, 5)) == set()


def test_restart_keeps_store(messenger):
    s = run(init_state(messenger), Press("Add"), Press("Save"), Restart())
    assert s.current == "Messenger"
    assert ("EXT_STORE", "MyContacts.txt") in s.store_map
    s = step(s, Press("SendMsg"))
    assert s.current == "MsgStatus" and s.trace[-1].flows == frozenset()


@pytest.mark.parametrize("ev", [
    Press("Nope"), LaunchExported("Messenger", ()), EnvWrite("SMS", "x", TaggedValue("v")),
])
def test_invalid_events(messenger, ev):
    with pytest.raises(InvalidEvent):
        step(init_state(messenger), ev)


def test_launch_exported_checks_arity():
    sb = load_storyboard(app("screen S launcher { } screen E exported (a: Text) { }"))
    with pytest.raises(InvalidEvent):
        step(init_state(sb), LaunchExported("E", ()))
    s = step(init_state(sb), LaunchExported("E", (TaggedValue("x"),)))
    assert s.current == "E" and s.entry_exported == "E"
    assert step(s, Restart()).entry_exported is None


def test_first_matching_transition_wins():
    sb = load_storyboard(app("screen S launcher { Button B go from S to T when B was pressed "
                             "go from S to U when B was pressed } screen T { } screen U { }"))
    assert step(init_state(sb), Press("B")).current == "T"


def test_guards_short_circuit():
    sb = load_storyboard(app('screen S launcher { Button A Button B '
                             'go from S to S when A was pressed and condition DB.put("k", "v") '
                             'go from S to T when B was pressed or condition DB.put("j", "v") } '
                             'screen T { }', RES))
    s = step(init_state(sb), Press("B"))
    assert s.current == "T"
    assert s.store_map == {}


def test_effect_call_result_tracks_argument_truth():
    sb = load_storyboard(app('screen S launcher { Button B '
                             'go from S to T when B was pressed and condition DB.put("k", DB.get("z")) '
                             'go from S to U when B was pressed and condition DB.put("k", "ok") } '
                             'screen T { } screen U { }', RES))
    s = step(init_state(sb), Press("B"))
    assert s.current == "U"
    assert s.store_map[("DB", "k")].value == "ok"


def test_private_read_is_sensitive():
    sb = load_storyboard(app('screen S launcher { Button B go from S to S when B was pressed '
                             'and condition NET.post("u", DB.get("k")) }', RES))
    s = run(init_state(sb, {("DB", "k"): TaggedValue("secret")}), Press("B"))
    assert ("P3-SensitiveDisclosure", "sensitive-data", "NET.post") in s.trace[-1].flows


def test_exported_input_reaching_sink():
    sb = load_storyboard(app("screen S launcher { } screen E exported (n: Num) { Button B "
                             "go from E to E when B was pressed and condition SMS.send(n) "
                             "propagate n as n }", RES))
    arg = adversary_value(FlowNode.param("E", "n"))
    s = run(init_state(sb), LaunchExported("E", (arg,)), Press("B"))
    assert s.trace[-1].flows == {("P1-ExportedInputToSensitiveOp", "exported-input", "SMS.send")}
    assert s.binding_map["n"].taint == {FlowNode.param("E", "n")}


def test_values_and_truth():
    assert not TaggedValue(FRESH).truthy and not TaggedValue(FAILURE).truthy
    assert TaggedValue(SUCCESS).truthy and TaggedValue(ADVERSARY).truthy
    assert not TaggedValue("").truthy and not TaggedValue(0).truthy
    assert TaggedValue("x").with_tags(frozenset(), frozenset()) == TaggedValue("x")


def test_depth_limits(messenger):
    assert enumerate_traces(messenger, 0) == [()]
    with pytest.raises(ValueError):
        enumerate_traces(messenger, 9)
    with pytest.raises(BudgetExceeded):
        enumerate_traces(messenger, 6, max_steps=10)


def test_dedup_preserves_observed_flows():
    for src in corpus(25, seed=21):
        sb = load_storyboard(src)
        full = observed_flows(enumerate_traces(sb, 3, dedup=False))
        assert observed_flows(enumerate_traces(sb, 3)) == full


def test_adversary_can_be_restricted(messenger):
    quiet = Adversary(env_writes=False, launch_exported=False, restart=False)
    assert observed_flows(enumerate_traces(messenger, 6, quiet)) == set()


def test_enumeration_is_deterministic(messenger):
    assert trace_jsonl(enumerate_traces(messenger, 4)) == trace_jsonl(enumerate_traces(messenger, 4))


def test_trace_jsonl_matches_schema(messenger):
    schema = load_schema("sema-trace/1")
    lines = trace_jsonl(enumerate_traces(messenger, 3)).splitlines()
    assert lines
    for line in lines:
        jsonschema.validate(json.loads(line), schema)


def test_observed_flows_are_reported_statically():
    for src in corpus(60, seed=8):
        sb = load_storyboard(src)
        static = {f.flow for f in analyze(sb)}
        assert observed_flows(enumerate_traces(sb, 4)) <= static
