import json

import pytest

from sema import load_storyboard
from sema.corpus import corpus
from sema.errors import ResolveErrors
from sema.fixtures import source
from sema.model import (Call, ParamRef, Trust, WidgetRef, check_wellformed, dumps, is_contradictory,
                        iter_calls, reachable_screens, storyboard_hash)
from sema.model.text import guard_text

from conftest import app

RES = "R : shared { f(x: T) g() -> T }"


def resolve_kinds(src):
    with pytest.raises(ResolveErrors) as ei:
        load_storyboard(src, "t.sb")
    return ei.value.kinds


@pytest.mark.parametrize("src,kind", [
    (app("screen S launcher { Button B go from S to T when B was pressed }"), "UnknownScreen"),
    (app("screen S launcher { } screen S { }"), "DuplicateName"),
    (app("screen S launcher { Button B TextView B }"), "DuplicateName"),
    (app("screen S { }"), "NoLauncher"),
    (app("screen S launcher { } screen T launcher { }"), "MultipleLaunchers"),
    (app("screen S launcher { TextView B go from S to S when B was pressed }"), "PressOnNonButton"),
    (app("screen S launcher { TextView V init R.f(1, 2) }", RES), "ArityMismatch"),
    (app("screen S launcher { TextView V init R.h(1) }", RES), "UnknownCapability"),
    (app("screen S launcher { TextView V init Q.f(1) }", RES), "UnknownResource"),
    (app("screen S launcher { Button B go from S to T when B was pressed propagate 1 as q } "
         "screen T { }"), "UnboundParam"),
    (app("screen S launcher { Button B go from S to T when B was pressed } "
         "screen T (q: Text) { }"), "UnboundParam"),
    (app("screen S launcher { TextView V init nope }"), "UnknownName"),
])
def test_resolve_error_kinds(src, kind):
    assert kind in resolve_kinds(src)


def test_errors_are_aggregated():
    kinds = resolve_kinds(app("screen S { TextView V init Q.f(1) } screen S { }"))
    assert {"NoLauncher", "DuplicateName", "UnknownResource"} <= set(kinds)


def test_messenger_model(messenger):
    assert messenger.entry == "Messenger"
    assert messenger.resource("EXT_STORE").trust is Trust.EXTERNAL
    assert messenger.resource("SMS").capability("send").sensitive
    t = messenger.screen("Messenger").transitions[1]
    assert t.label == "Messenger->MsgStatus#1"
    calls = [f"{c.resource}.{c.capability}" for _, c in messenger.call_sites()]
    assert calls == ["EXT_STORE.read", "SMS.send", "EXT_STORE.write"]


def test_private_requirement(messenger_private):
    assert messenger_private.private_assets == frozenset({"MyContacts.txt"})


def test_every_reference_is_bound():
    for src in corpus(40, seed=5):
        sb = load_storyboard(src)
        for s in sb.screens:
            names = set(s.param_names) | {w.name for w in s.widgets}
            exprs = [w.init for w in s.widgets if w.init] + \
                    [p.expr for t in s.transitions for p in t.propagations]
            for e in exprs:
                for c in iter_calls(e):
                    sb.resource(c.resource).capability(c.capability)
                if isinstance(e, (WidgetRef, ParamRef)):
                    assert e.name in names


def test_widget_init_scope_is_ordered():
    assert "UnknownName" in resolve_kinds(
        app("screen S launcher { TextView A init B TextView B init \"x\" }"))
    load_storyboard(app("screen S launcher { TextView B init \"x\" TextView A init B }"))


def test_wellformed_warnings():
    sb = load_storyboard(app(
        "screen S launcher { Button B go from S to S when B was pressed and not B was pressed } "
        "screen Lost { } screen Open exported { }"))
    codes = sorted(d.code for d in check_wellformed(sb))
    assert codes == ["ExportedWithoutParams", "Unreachable", "UnsatisfiableGuard"]
    assert reachable_screens(sb) == {"S", "Open"}
    assert all(d.severity == "warning" for d in check_wellformed(sb))


def test_contradiction_is_syntactic_only():
    sb = load_storyboard(app(
        "screen S launcher { Button A Button B "
        "go from S to S when A was pressed and not B was pressed "
        "go from S to S when A was pressed and B was pressed and not A was pressed }"))
    t0, t1 = sb.screen("S").transitions
    assert not is_contradictory(t0.guard)
    assert is_contradictory(t1.guard)


def test_fixtures_are_well_formed(messenger, messenger_fixed):
    assert check_wellformed(messenger) == []
    assert check_wellformed(messenger_fixed) == []


def test_serialization_is_canonical(messenger):
    again = load_storyboard("// moved\n\n" + source("messenger"), "elsewhere.sb")
    assert dumps(messenger) == dumps(again)
    assert storyboard_hash(messenger) == storyboard_hash(again)
    doc = json.loads(dumps(messenger))
    assert doc["schema"] == "sema-model/1"
    assert "span" not in dumps(messenger)


def test_hash_changes_with_content(messenger, messenger_fixed):
    assert storyboard_hash(messenger) != storyboard_hash(messenger_fixed)
    assert len(storyboard_hash(messenger)) == 16


def test_guard_text_matches_source(messenger):
    g = messenger.screen("Messenger").transitions[1].guard
    assert guard_text(g) == ('SendMsg was pressed and condition '
                             'SMS.send("Help!", EXT_STORE.read("MyContacts.txt"))')


def test_call_literal_key(messenger):
    reads = [c for _, c in messenger.call_sites() if c.capability == "read"]
    assert isinstance(reads[0], Call) and reads[0].literal_key == "MyContacts.txt"
