"""Dataflow graph over value slots of a storyboard.

Capabilities use a fixed summary: every argument flows into the resource
cell addressed by the call, and a capability's return value flows out of
that cell. Cells are keyed by the first argument when it is a literal and
by the whole-resource cell ``TOP`` otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Union

from ..model.types import (
    Call, Cond, Expr, Literal, ParamRef, Storyboard, Trust, WidgetRef, guard_atoms,
)
from ..span import SourceSpan

TOP = None  # key of the whole-resource cell


class NodeKind(str, Enum):
    WIDGET = "WidgetSlot"
    PARAM = "ParamSlot"
    CELL = "ResourceCell"
    CAP_IN = "CapabilityIn"
    CAP_OUT = "CapabilityOut"
    WORLD = "ExternalWorld"
    # used only in privileged-exposure witnesses; never part of a FlowGraph
    SCREEN = "ScreenEntry"


class EdgeReason(str, Enum):
    INIT = "Init"
    PROPAGATE = "Propagate"
    GUARD_USE = "GuardUse"
    CAP_CALL = "CapCall"
    PERSIST = "Persist"
    ENV_WRITE = "EnvWrite"
    NAVIGATE = "Navigate"


@dataclass(frozen=True)
class FlowNode:
    kind: NodeKind
    parts: tuple = ()

    @staticmethod
    def world() -> FlowNode:
        return FlowNode(NodeKind.WORLD)

    @staticmethod
    def widget(screen: str, name: str) -> FlowNode:
        return FlowNode(NodeKind.WIDGET, (screen, name))

    @staticmethod
    def param(screen: str, name: str) -> FlowNode:
        return FlowNode(NodeKind.PARAM, (screen, name))

    @staticmethod
    def cell(resource: str, key: Union[str, int, None]) -> FlowNode:
        return FlowNode(NodeKind.CELL, (resource, key))

    @staticmethod
    def cap_in(resource: str, cap: str, index: int, param: str = "") -> FlowNode:
        return FlowNode(NodeKind.CAP_IN, (resource, cap, index, param))

    @staticmethod
    def cap_out(resource: str, cap: str) -> FlowNode:
        return FlowNode(NodeKind.CAP_OUT, (resource, cap))

    @staticmethod
    def screen(name: str) -> FlowNode:
        return FlowNode(NodeKind.SCREEN, (name,))

    @property
    def resource(self) -> Optional[str]:
        if self.kind in (NodeKind.CELL, NodeKind.CAP_IN, NodeKind.CAP_OUT):
            return self.parts[0]
        return None

    @property
    def sort_key(self) -> tuple:
        return (self.kind.value, tuple(repr(p) for p in self.parts))

    def __str__(self) -> str:
        k, p = self.kind, self.parts
        if k is NodeKind.WORLD:
            return "ExternalWorld"
        if k in (NodeKind.WIDGET, NodeKind.PARAM):
            return f"{k.value}({p[0]}.{p[1]})"
        if k is NodeKind.CELL:
            key = "⊤" if p[1] is None else (f'"{p[1]}"' if isinstance(p[1], str) else str(p[1]))
            return f"ResourceCell({p[0]}, {key})"
        if k is NodeKind.CAP_IN:
            return f"CapabilityIn({p[0]}.{p[1]}, {p[3] or p[2]})"
        if k is NodeKind.CAP_OUT:
            return f"CapabilityOut({p[0]}.{p[1]})"
        return f"ScreenEntry({p[0]})"


@dataclass(frozen=True)
class FlowEdge:
    src: FlowNode
    dst: FlowNode
    reason: EdgeReason
    site: Optional[SourceSpan] = None

    @property
    def sort_key(self) -> tuple:
        s = self.site
        pos = (s.start_line, s.start_col, s.end_line, s.end_col) if s else (0, 0, 0, 0)
        return (pos, self.dst.sort_key, self.src.sort_key, self.reason.value)


class FlowGraph:
    """Directed multigraph; nodes keep insertion order, identical edges are merged."""

    def __init__(self) -> None:
        self._nodes: dict[FlowNode, None] = {}
        self._edges: dict[FlowEdge, None] = {}
        self._out: dict[FlowNode, list[FlowEdge]] = {}
        self._in: dict[FlowNode, list[FlowEdge]] = {}
        self.seeds: dict[FlowNode, frozenset[str]] = {}

    def add_node(self, n: FlowNode) -> FlowNode:
        if n not in self._nodes:
            self._nodes[n] = None
            self._out[n] = []
            self._in[n] = []
        return n

    def add_edge(self, e: FlowEdge) -> None:
        if e in self._edges:
            return
        self.add_node(e.src)
        self.add_node(e.dst)
        self._edges[e] = None
        self._out[e.src].append(e)
        self._in[e.dst].append(e)

    def seed(self, n: FlowNode, assets: Iterable[str]) -> None:
        self.add_node(n)
        self.seeds[n] = self.seeds.get(n, frozenset()) | frozenset(assets)

    @property
    def nodes(self) -> list[FlowNode]:
        return list(self._nodes)

    @property
    def edges(self) -> list[FlowEdge]:
        return list(self._edges)

    def __contains__(self, n: object) -> bool:
        return n in self._nodes

    def out_edges(self, n: FlowNode) -> list[FlowEdge]:
        return self._out.get(n, [])

    def in_edges(self, n: FlowNode) -> list[FlowEdge]:
        return self._in.get(n, [])

    def copy(self) -> FlowGraph:
        g = FlowGraph()
        for n in self._nodes:
            g.add_node(n)
        for e in self._edges:
            g.add_edge(e)
        g.seeds = dict(self.seeds)
        return g

    def with_edge(self, e: FlowEdge) -> FlowGraph:
        g = self.copy()
        g.add_edge(e)
        return g


def expr_sources(sb: Storyboard, expr: Expr) -> list[FlowNode]:
    """Slots whose contents the value of ``expr`` depends on."""
    if isinstance(expr, Literal):
        return []
    if isinstance(expr, WidgetRef):
        return [FlowNode.widget(expr.screen, expr.name)]
    if isinstance(expr, ParamRef):
        return [FlowNode.param(expr.screen, expr.name)]
    assert isinstance(expr, Call)
    cap = sb.resource(expr.resource).capability(expr.capability)
    return [FlowNode.cap_out(expr.resource, expr.capability)] if cap.returns is not None else []


def literal_keys(sb: Storyboard) -> dict[str, list]:
    """Literal asset keys used with each resource, in first-use order."""
    keys: dict[str, list] = {r.name: [] for r in sb.resources}
    for _, call in sb.call_sites():
        k = call.literal_key
        if k is not None and k not in keys[call.resource]:
            keys[call.resource].append(k)
    return keys


def call_node(sb: Storyboard, call: Call) -> FlowNode:
    """The node a call site is identified by: its first input, or its output if nullary."""
    cap = sb.resource(call.resource).capability(call.capability)
    if cap.params:
        return FlowNode.cap_in(call.resource, call.capability, 0, cap.params[0][0])
    return FlowNode.cap_out(call.resource, call.capability)


def build_flow_graph(sb: Storyboard) -> FlowGraph:
    g = FlowGraph()
    world = g.add_node(FlowNode.world())
    for s in sb.screens:
        for p in s.param_names:
            g.add_node(FlowNode.param(s.name, p))
        for w in s.widgets:
            g.add_node(FlowNode.widget(s.name, w.name))
    keys = literal_keys(sb)
    assets = sb.private_assets

    def wire(call: Call) -> None:
        res = sb.resource(call.resource)
        cap = res.capability(call.capability)
        ins = [g.add_node(FlowNode.cap_in(res.name, cap.name, i, cap.params[i][0]))
               for i in range(len(call.args))]
        for i, arg in enumerate(call.args):
            for n in expr_sources(sb, arg):
                g.add_edge(FlowEdge(n, ins[i], EdgeReason.CAP_CALL, arg.span))
        key = call.literal_key
        cell = g.add_node(FlowNode.cell(res.name, key))
        for n in ins:
            g.add_edge(FlowEdge(n, cell, EdgeReason.PERSIST, call.span))
        if key is None and ins:
            for k in keys[res.name]:
                g.add_edge(FlowEdge(cell, FlowNode.cell(res.name, k), EdgeReason.PERSIST, call.span))
        if cap.returns is not None:
            out = g.add_node(FlowNode.cap_out(res.name, cap.name))
            read_from = [key] if key is not None else [TOP] + keys[res.name]
            for k in read_from:
                g.add_edge(FlowEdge(FlowNode.cell(res.name, k), out, EdgeReason.PERSIST, call.span))
            if res.trust is Trust.PRIVATE:
                g.seed(out, [res.name])
            if key is None and ins and assets:
                g.seed(out, assets)

    for _, call in sb.call_sites():
        wire(call)

    for s in sb.screens:
        for w in s.widgets:
            if w.init is not None:
                dst = FlowNode.widget(s.name, w.name)
                for n in expr_sources(sb, w.init):
                    g.add_edge(FlowEdge(n, dst, EdgeReason.INIT, w.init.span))
        for t in s.transitions:
            conds = [a for a in guard_atoms(t.guard) if isinstance(a, Cond)]
            for p in t.propagations:
                dst = FlowNode.param(t.target, p.param)
                for n in expr_sources(sb, p.expr):
                    g.add_edge(FlowEdge(n, dst, EdgeReason.PROPAGATE, p.span))
                for c in conds:
                    for n in expr_sources(sb, c.expr):
                        g.add_edge(FlowEdge(n, dst, EdgeReason.GUARD_USE, c.span))

    for r in sb.resources:
        if r.trust is Trust.EXTERNAL:
            for k in keys[r.name]:
                g.add_edge(FlowEdge(world, FlowNode.cell(r.name, k), EdgeReason.ENV_WRITE))
            g.add_edge(FlowEdge(world, FlowNode.cell(r.name, TOP), EdgeReason.ENV_WRITE))
        for k in keys[r.name]:
            if isinstance(k, str) and k in assets:
                g.seed(FlowNode.cell(r.name, k), [k])
    for s in sb.screens:
        if s.exported:
            for p in s.param_names:
                g.add_edge(FlowEdge(world, FlowNode.param(s.name, p), EdgeReason.ENV_WRITE))
    return g
