"""The pre-defined security properties and their findings."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional

from ..errors import NoPath
from ..model.types import Cond, Storyboard, Trust, guard_atoms
from .graph import (
    EdgeReason, FlowEdge, FlowGraph, FlowNode, NodeKind, call_node, expr_sources, literal_keys,
)
from .taint import TaintState, origin_kind
from .witness import extract_witness, path_key


class Property(str, Enum):
    P1 = "P1-ExportedInputToSensitiveOp"
    P2 = "P2-UntrustedSourceToSensitiveOp"
    P3 = "P3-SensitiveDisclosure"
    P4 = "P4-PrivilegedExposure"
    R1 = "R1-PrivateAssetInSharedStore"

    @property
    def short(self) -> str:
        return self.value.split("-", 1)[0]

    @classmethod
    def parse(cls, text: str) -> Property:
        for p in cls:
            if text in (p.value, p.short, p.name):
                return p
        raise ValueError(f"unknown property {text!r}")


ALL_PROPERTIES = frozenset(Property)

SEVERITY = {Property.P1: "medium", Property.P2: "high", Property.P3: "high",
            Property.P4: "medium", Property.R1: "high"}
ERROR_SEVERITIES = frozenset({"high"})

SOURCE_KIND = {Property.P1: "exported-input", Property.P2: "external-resource",
               Property.P3: "sensitive-data", Property.P4: "exported-entry",
               Property.R1: "private-asset"}

_ORDER = {p: i for i, p in enumerate(Property)}


@dataclass(frozen=True)
class Finding:
    property: Property
    sink: str
    witness: tuple[FlowEdge, ...]
    message: str
    fix: Optional["FixSuggestion"] = None  # noqa: F821

    @property
    def severity(self) -> str:
        return SEVERITY[self.property]

    @property
    def source_kind(self) -> str:
        return SOURCE_KIND[self.property]

    @property
    def flow(self) -> tuple[str, str, str]:
        """(property tag, source kind, sink), comparable with interpreter observations."""
        return (self.property.value, self.source_kind, self.sink)

    @property
    def sink_node(self) -> FlowNode:
        return self.witness[-1].dst

    @property
    def is_error(self) -> bool:
        return self.severity in ERROR_SEVERITIES


def _order_key(f: Finding) -> tuple:
    site = f.witness[-1].site
    pos = (site.start_line, site.start_col) if site else (0, 0)
    return (pos, _ORDER[f.property], f.sink)


def _best(current: Optional[tuple], candidate: tuple) -> tuple:
    if current is None or path_key(candidate) < path_key(current):
        return candidate
    return current


def _env_edge(g: FlowGraph, origin: FlowNode) -> FlowEdge:
    return min((e for e in g.in_edges(origin) if e.reason is EdgeReason.ENV_WRITE),
               key=lambda e: e.sort_key)


def _cap_label(n: FlowNode) -> str:
    return f"{n.parts[0]}.{n.parts[1]}"


def _check_untrusted(sb: Storyboard, t: TaintState, selected) -> list[Finding]:
    g = t.graph
    sensitive = {(r.name, c.name) for r in sb.resources for c in r.capabilities if c.sensitive}
    best: dict[tuple[Property, str], tuple] = {}
    for n in g.nodes:
        if n.kind is not NodeKind.CAP_IN or (n.parts[0], n.parts[1]) not in sensitive:
            continue
        for origin in t.origins(n):
            kind = origin_kind(origin)
            prop = Property.P1 if kind == "exported-input" else Property.P2 if kind else None
            if prop not in selected:
                continue
            path = (_env_edge(g, origin),) + extract_witness(g, origin, n)
            key = (prop, _cap_label(n))
            best[key] = _best(best.get(key), path)
    out = []
    for (prop, sink), path in best.items():
        entry = path[0].dst
        if prop is Property.P1:
            msg = f"input of exported screen via {entry} reaches sensitive operation {sink}"
        else:
            msg = f"untrusted data from {entry} reaches sensitive operation {sink}"
        out.append(Finding(prop, sink, path, msg))
    return out


def _seed_path(g: FlowGraph, t: TaintState, assets: frozenset, node: FlowNode) -> Optional[tuple]:
    best = None
    for seed, seeded in g.seeds.items():
        if not seeded & assets:
            continue
        if seed == node:
            return ()
        try:
            best = _best(best, extract_witness(g, seed, node))
        except NoPath:
            continue
    return best


def _check_disclosure(sb: Storyboard, t: TaintState) -> list[Finding]:
    g = t.graph
    external = {r.name for r in sb.resources if r.trust is Trust.EXTERNAL}
    best: dict[str, tuple] = {}
    for n in g.nodes:
        if n.kind is NodeKind.CAP_IN and n.parts[0] in external and t.assets(n):
            path = _seed_path(g, t, t.assets(n), n)
            if path:
                best[_cap_label(n)] = _best(best.get(_cap_label(n)), path)
    messages = {sink: f"sensitive data reaches external resource through {sink}" for sink in best}

    for s in sb.screens:
        if not s.exported:
            continue
        for tr in s.transitions:
            conds = [a for a in guard_atoms(tr.guard) if isinstance(a, Cond)]
            for p in tr.propagations:
                dst = FlowNode.param(tr.target, p.param)
                edges = [FlowEdge(n, dst, EdgeReason.PROPAGATE, p.span) for n in expr_sources(sb, p.expr)]
                edges += [FlowEdge(n, dst, EdgeReason.GUARD_USE, c.span)
                          for c in conds for n in expr_sources(sb, c.expr)]
                sink = f"propagate:{tr.source}->{tr.target}.{p.param}"
                for e in edges:
                    if not t.assets(e.src):
                        continue
                    prefix = _seed_path(g, t, t.assets(e.src), e.src)
                    if prefix is None:
                        continue
                    best[sink] = _best(best.get(sink), prefix + (e,))
                    messages[sink] = (f"sensitive data leaves exported screen {tr.source!r} "
                                      f"as parameter {p.param!r} of {tr.target!r}")
    return [Finding(Property.P3, sink, path, messages[sink]) for sink, path in best.items()]


def exposed_screens(sb: Storyboard) -> dict[str, tuple[FlowEdge, ...]]:
    """Screens reachable from an exported screen, with a navigation witness for each."""
    world = FlowNode.world()
    paths: dict[str, tuple[FlowEdge, ...]] = {}
    queue: deque[str] = deque()
    for s in sb.screens:
        if s.exported:
            paths[s.name] = (FlowEdge(world, FlowNode.screen(s.name), EdgeReason.ENV_WRITE),)
            queue.append(s.name)
    while queue:
        cur = sb.screen(queue.popleft())
        for tr in cur.transitions:
            if tr.target not in paths:
                step = FlowEdge(FlowNode.screen(cur.name), FlowNode.screen(tr.target),
                                EdgeReason.NAVIGATE, tr.span)
                paths[tr.target] = paths[cur.name] + (step,)
                queue.append(tr.target)
    return paths


def _check_privileged(sb: Storyboard) -> list[Finding]:
    exposed = exposed_screens(sb)
    best: dict[str, tuple] = {}
    for screen, call in sb.call_sites():
        cap = sb.resource(call.resource).capability(call.capability)
        if not cap.privileged or screen not in exposed:
            continue
        step = FlowEdge(FlowNode.screen(screen), call_node(sb, call), EdgeReason.CAP_CALL, call.span)
        sink = f"{call.resource}.{call.capability}"
        best[sink] = _best(best.get(sink), exposed[screen] + (step,))
    return [Finding(Property.P4, sink, path,
                    f"privileged operation {sink} is reachable from exported screen "
                    f"{path[0].dst.parts[0]!r} (over-approximate)")
            for sink, path in best.items()]


def _check_private_assets(sb: Storyboard, g: FlowGraph) -> list[Finding]:
    keys = literal_keys(sb)
    out = []
    for req in sb.requirements:
        for r in sb.resources:
            if r.trust is Trust.PRIVATE or req.asset not in keys[r.name]:
                continue
            cell = FlowNode.cell(r.name, req.asset)
            into = g.in_edges(cell)
            sited = [e for e in into if e.site is not None] or list(into)
            if not sited:
                continue
            edge = min(sited, key=lambda e: e.sort_key)
            out.append(Finding(Property.R1, f'{r.name}["{req.asset}"]', (edge,),
                               f"private asset {req.asset!r} is stored in {r.trust.value} resource {r.name}"))
    return out


def check_properties(sb: Storyboard, t: TaintState,
                     selected: Iterable[Property] = ALL_PROPERTIES,
                     with_fixes: bool = True) -> list[Finding]:
    """Findings for the selected properties, one per (property, sink), in source order."""
    selected = frozenset(selected)
    findings: list[Finding] = []
    if selected & {Property.P1, Property.P2}:
        findings += _check_untrusted(sb, t, selected)
    if Property.P3 in selected:
        findings += _check_disclosure(sb, t)
    if Property.P4 in selected:
        findings += _check_privileged(sb)
    if Property.R1 in selected:
        findings += _check_private_assets(sb, t.graph)
    findings.sort(key=_order_key)
    if with_fixes:
        from .fixes import suggest_fix
        findings = [replace(f, fix=suggest_fix(sb, f, t)) for f in findings]
    return findings
