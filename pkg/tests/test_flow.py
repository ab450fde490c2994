import random
from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from sema import analyze, load_storyboard
from sema.corpus import corpus
from sema.errors import NoPath
from sema.flow import (ALL_PROPERTIES, EdgeReason, FlowEdge, FlowGraph, FlowNode, NodeKind, Property,
                       apply_rewrite, build_flow_graph, check_properties, extract_witness,
                       propagate_taint)
from sema.flow.graph import TOP
from sema.model import resolve
from sema.dsl import parse_source, pretty_print
from sema.span import SourceSpan

from conftest import app, random_flow_graph

RES = ("NET : external { post(u: Url, d: Data) fetch(u: Url) -> Data } "
       "SMS : shared { send(n: Num) sensitive } SYS : shared { wipe() privileged } "
       "DB : private { get(k: Key) -> Data put(k: Key, d: Data) }")

W = FlowNode.world()
CELL = FlowNode.cell("EXT_STORE", "MyContacts.txt")
READ = FlowNode.cap_out("EXT_STORE", "read")
SEND_P = FlowNode.cap_in("SMS", "send", 1, "p")


def sb_of(body, requirements=""):
    return load_storyboard(app(body, RES, requirements), "t.sb")


# -- graph construction --------------------------------------------------------

def test_messenger_graph_has_poisoning_path(messenger):
    g = build_flow_graph(messenger)
    edges = {(e.src, e.dst, e.reason) for e in g.edges}
    assert (W, CELL, EdgeReason.ENV_WRITE) in edges
    assert (CELL, READ, EdgeReason.PERSIST) in edges
    assert (READ, SEND_P, EdgeReason.CAP_CALL) in edges


def test_env_write_edges_only_leave_the_world(messenger):
    g = build_flow_graph(messenger)
    for e in g.edges:
        assert (e.reason is EdgeReason.ENV_WRITE) == (e.src == W)


def test_private_resource_gets_no_env_write(messenger_fixed):
    g = build_flow_graph(messenger_fixed)
    assert all(e.dst.resource != "INT_STORE" for e in g.out_edges(W))


def test_exported_params_written_by_world():
    sb = sb_of("screen S launcher { } screen E exported (a: Num, b: Num) { }")
    targets = {e.dst for e in build_flow_graph(sb).out_edges(W)}
    assert {n for n in targets if n.kind is NodeKind.PARAM} == {FlowNode.param("E", "a"),
                                                               FlowNode.param("E", "b")}
    assert FlowNode.cell("NET", TOP) in targets


def test_non_literal_key_uses_top_cell():
    sb = sb_of('screen S launcher { TextInput K Button B '
               'go from S to S when B was pressed and condition DB.put(K, "v") '
               'go from S to S when B was pressed and condition SMS.send(DB.get("a")) }')
    g = build_flow_graph(sb)
    top, a = FlowNode.cell("DB", TOP), FlowNode.cell("DB", "a")
    assert any(e.src == top and e.dst == a for e in g.edges)


def test_guard_use_and_init_edges():
    sb = sb_of('screen S launcher { TextInput I TextView V init I Button B '
               'go from S to T when B was pressed and condition SMS.send(V) propagate V as x } '
               'screen T (x: Text) { }')
    reasons = {(str(e.src), str(e.dst)): e.reason for e in build_flow_graph(sb).edges}
    assert reasons[("WidgetSlot(S.I)", "WidgetSlot(S.V)")] is EdgeReason.INIT
    assert reasons[("WidgetSlot(S.V)", "ParamSlot(T.x)")] is EdgeReason.PROPAGATE
    assert reasons[("WidgetSlot(S.V)", "CapabilityIn(SMS.send, n)")] is EdgeReason.CAP_CALL


# -- fixpoint --------------------------------------------------------------------

def closure_oracle(g: FlowGraph):
    """Origins and assets per node by plain reachability, independent of the worklist."""
    def reach(start):
        seen, q = {start}, deque([start])
        while q:
            u = q.popleft()
            for e in g.out_edges(u):
                if e.reason is not EdgeReason.ENV_WRITE and e.dst not in seen:
                    seen.add(e.dst)
                    q.append(e.dst)
        return seen
    taint = {n: set() for n in g.nodes}
    sens = {n: set() for n in g.nodes}
    if W in taint:
        taint[W].add(W)
    for e in g.out_edges(W):
        for n in reach(e.dst):
            taint[n].add(e.dst)
    for n, assets in g.seeds.items():
        for m in reach(n):
            sens[m] |= assets
    return taint, sens


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_fixpoint_matches_reachability_oracle(seed):
    g = random_flow_graph(random.Random(seed))
    t = propagate_taint(g)
    taint, sens = closure_oracle(g)
    for n in g.nodes:
        assert t.origins(n) == taint[n]
        assert t.assets(n) == sens[n]


def test_fixpoint_on_storyboards_matches_oracle():
    for src in corpus(40, seed=3):
        g = build_flow_graph(load_storyboard(src))
        t = propagate_taint(g)
        taint, sens = closure_oracle(g)
        assert all(t.origins(n) == taint[n] and t.assets(n) == sens[n] for n in g.nodes)


def chain_storyboard(n):
    screens = ["screen S launcher { }",
               "screen C0 exported (p: Text) { Button B go from C0 to C1 when B was pressed propagate p as p }"]
    for i in range(1, n):
        screens.append(f"screen C{i} (p: Text) {{ Button B go from C{i} to C{i + 1} "
                       f"when B was pressed propagate p as p }}")
    screens.append(f"screen C{n} (p: Text) {{ }}")
    return load_storyboard(app(" ".join(screens)))


def test_ten_edge_propagation_chain():
    sb = chain_storyboard(10)
    g = build_flow_graph(sb)
    assert sum(1 for e in g.edges if e.reason is EdgeReason.PROPAGATE) == 10
    t = propagate_taint(g)
    origin = FlowNode.param("C0", "p")
    assert t.origins(FlowNode.param("C10", "p")) == {origin}
    assert t.iterations <= len(g.nodes)
    assert len(extract_witness(g, origin, FlowNode.param("C10", "p"))) == 10


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_idempotent_and_monotone(seed):
    rng = random.Random(seed)
    g = random_flow_graph(rng)
    t = propagate_taint(g)
    assert propagate_taint(g, initial=t) == t
    nodes = g.nodes[1:]
    e = FlowEdge(rng.choice(nodes), rng.choice(nodes), EdgeReason.PROPAGATE)
    assert t.leq(propagate_taint(g.with_edge(e)))


def test_empty_graph():
    t = propagate_taint(FlowGraph())
    assert t.taint == {} and t.iterations == 0


# -- witnesses -------------------------------------------------------------------

def span(line, col):
    return SourceSpan("w.sb", line, col, line, col + 1)


def test_diamond_prefers_earlier_site():
    g = FlowGraph()
    a, b, c, d = (FlowNode.cell("R", k) for k in "abcd")
    g.add_edge(FlowEdge(a, c, EdgeReason.PERSIST, span(5, 1)))
    g.add_edge(FlowEdge(a, b, EdgeReason.PERSIST, span(3, 1)))
    g.add_edge(FlowEdge(b, d, EdgeReason.PERSIST, span(9, 1)))
    g.add_edge(FlowEdge(c, d, EdgeReason.PERSIST, span(1, 1)))
    assert [e.dst for e in extract_witness(g, a, d)] == [b, d]


def test_diamond_ties_broken_by_node_order():
    g = FlowGraph()
    a, b, c, d = (FlowNode.cell("R", k) for k in "adcb")
    for mid in (b, c):
        g.add_edge(FlowEdge(a, mid, EdgeReason.PERSIST))
        g.add_edge(FlowEdge(mid, d, EdgeReason.PERSIST))
    first = extract_witness(g, a, d)
    assert first[0].dst == min((b, c), key=lambda n: n.sort_key)
    assert extract_witness(g.copy(), a, d) == first


def test_witness_is_shortest():
    g = FlowGraph()
    ns = [FlowNode.cell("R", i) for i in range(5)]
    for x, y in zip(ns, ns[1:]):
        g.add_edge(FlowEdge(x, y, EdgeReason.PERSIST, span(1, 1)))
    g.add_edge(FlowEdge(ns[0], ns[4], EdgeReason.PERSIST, span(99, 1)))
    assert len(extract_witness(g, ns[0], ns[4])) == 1


def test_no_path_and_self_loop():
    g = FlowGraph()
    a, b = FlowNode.cell("R", "a"), FlowNode.cell("R", "b")
    g.add_node(a)
    g.add_node(b)
    with pytest.raises(NoPath):
        extract_witness(g, a, b)
    with pytest.raises(NoPath):
        extract_witness(g, a, a)
    g.add_edge(FlowEdge(a, a, EdgeReason.PERSIST))
    assert len(extract_witness(g, a, a)) == 1


# -- properties ------------------------------------------------------------------

def test_messenger_detection(messenger):
    (f,) = analyze(messenger)
    assert f.property is Property.P2 and f.sink == "SMS.send"
    assert [e.dst for e in f.witness] == [CELL, READ, SEND_P]
    assert f.witness[0].src == W
    assert f.severity == "high" and f.is_error


def test_private_requirement_adds_r1(messenger_private):
    fs = analyze(messenger_private)
    assert sorted(f.property.short for f in fs) == ["P2", "R1"]
    r1 = next(f for f in fs if f.property is Property.R1)
    assert r1.sink == 'EXT_STORE["MyContacts.txt"]'


def test_fixed_fixture_is_clean(messenger_fixed):
    assert analyze(messenger_fixed) == []


def test_p1_exported_input():
    sb = sb_of("screen S launcher { } screen E exported (n: Num) { Button B "
               "go from E to E when B was pressed and condition SMS.send(n) propagate n as n }")
    (f,) = analyze(sb)
    assert f.property is Property.P1 and f.severity == "medium"
    assert f.witness[0].dst == FlowNode.param("E", "n")
    assert f.fix.description == "validate or do not forward exported input"
    assert f.fix.rewrite is None


def test_p3_write_to_external():
    sb = sb_of('screen S launcher { Button B '
               'go from S to S when B was pressed and condition NET.post("u", DB.get("k")) }')
    (f,) = analyze(sb)
    assert (f.property, f.sink) == (Property.P3, "NET.post")


def test_p3_propagation_out_of_exported_screen():
    sb = sb_of('screen S launcher { } screen E exported (n: Num) { Button B '
               'go from E to T when B was pressed propagate DB.get("k") as x } screen T (x: Data) { }')
    (f,) = analyze(sb)
    assert (f.property, f.sink) == (Property.P3, "propagate:E->T.x")


def test_p4_reaches_privileged_call_through_navigation():
    sb = sb_of("screen S launcher { } screen E exported (n: Num) { Button B "
               "go from E to T when B was pressed } screen T { TextView V init SYS.wipe() }")
    (f,) = analyze(sb)
    assert f.property is Property.P4
    assert [e.reason for e in f.witness] == [EdgeReason.ENV_WRITE, EdgeReason.NAVIGATE,
                                            EdgeReason.CAP_CALL]


def test_privileged_call_without_exported_entry_is_fine():
    sb = sb_of("screen S launcher { TextView V init SYS.wipe() }")
    assert analyze(sb) == []


def test_r1_literal_asset_in_external_store():
    sb = sb_of('screen S launcher { Button B go from S to S when B was pressed '
               'and condition NET.post("secret", "x") }', '"secret" is private')
    (f,) = analyze(sb)
    assert (f.property, f.sink) == (Property.R1, 'NET["secret"]')


def test_property_selection(messenger_private):
    t = propagate_taint(build_flow_graph(messenger_private))
    only = check_properties(messenger_private, t, frozenset({Property.R1}))
    assert [f.property for f in only] == [Property.R1]
    assert check_properties(messenger_private, t, frozenset()) == []


def test_findings_are_deduplicated():
    sb = sb_of('screen S launcher { Button B '
               'go from S to S when B was pressed and condition SMS.send(NET.fetch("a")) '
               'go from S to S when B was pressed and condition SMS.send(NET.fetch("b")) }')
    fs = analyze(sb)
    assert [(f.property, f.sink) for f in fs] == [(Property.P2, "SMS.send")]


def test_findings_ordered_by_position():
    for src in corpus(60, seed=9):
        fs = analyze(load_storyboard(src))
        keys = [f.witness[-1].sort_key[0] for f in fs]
        assert keys == sorted(keys)


def test_analysis_is_deterministic():
    for src in corpus(20, seed=4):
        assert analyze(load_storyboard(src)) == analyze(load_storyboard(src))


# -- fixes -----------------------------------------------------------------------

def test_fix_rehomes_to_private_store(messenger):
    (f,) = analyze(messenger)
    rw = f.fix.rewrite
    assert rw.target == "INT_STORE" and rw.moves == (("EXT_STORE", "MyContacts.txt"),)
    assert f.fix.patch.startswith("--- a/")
    fixed = resolve(parse_source(pretty_print(apply_rewrite(messenger.raw, rw))))
    assert analyze(fixed) == []
    assert fixed.resource("INT_STORE").trust.value == "private"


def test_fix_reuses_existing_private_store():
    sb = load_storyboard(app(
        'screen S launcher { Button B go from S to S when B was pressed '
        'and condition SMS.send(NET.fetch("a")) }',
        RES.replace("DB : private", "INT_STORE : private")))
    (f,) = analyze(sb)
    raw = apply_rewrite(sb.raw, f.fix.rewrite)
    assert [r.name for r in raw.resources].count("INT_STORE") == 1
    assert analyze(resolve(raw)) == []


def test_fix_skips_non_private_name_clash():
    sb = load_storyboard(app(
        'screen S launcher { Button B go from S to S when B was pressed '
        'and condition SMS.send(NET.fetch("a")) }',
        RES + " INT_STORE : shared { x() }"))
    (f,) = analyze(sb)
    assert f.fix.rewrite.target == "INT_STORE_2"


def test_every_rehoming_fix_is_effective():
    applied = 0
    for seed in (1, 2, 3):
        for src in corpus(100, seed=seed):
            sb = load_storyboard(src)
            for f in analyze(sb):
                if f.fix is None or f.fix.rewrite is None:
                    continue
                applied += 1
                after = analyze(resolve(parse_source(pretty_print(apply_rewrite(sb.raw, f.fix.rewrite)))))
                keys = {(g.property, g.sink) for g in after}
                assert (f.property, f.sink) not in keys
                before = {(g.property, g.sink) for g in analyze(sb)}
                new = {k for k in keys - before if k[0] in (Property.P2, Property.R1)}
                assert not new
    assert applied > 0


def test_no_rewrite_when_rehoming_cannot_close_the_flow():
    # a nullary read also sees the whole-resource cell, which the adversary writes directly
    sb = load_storyboard(app(
        'screen S launcher { Button B '
        'go from S to S when B was pressed and condition SMS.send(NET.fetch("a")) '
        'go from S to S when B was pressed and condition SMS.send(NET.all()) }',
        RES.replace("fetch(u: Url) -> Data", "fetch(u: Url) -> Data all() -> Data")))
    (f,) = analyze(sb)
    assert f.property is Property.P2
    assert f.fix.rewrite is None and f.fix.patch == ""
    assert "validate" in f.fix.description
