"""Least-fixpoint taint and sensitivity labelling of a flow graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .graph import EdgeReason, FlowGraph, FlowNode, NodeKind

Origins = frozenset  # frozenset[FlowNode]: entry points where adversarial data enters
_EMPTY: frozenset = frozenset()


@dataclass
class TaintState:
    """Per-node taint origins and sensitive-asset labels.

    A node is tainted iff its origin set is non-empty. Origins are the targets
    of ``EnvWrite`` edges, so they say *where* untrusted data came in.
    """

    graph: FlowGraph = field(compare=False, repr=False)
    taint: dict[FlowNode, frozenset]
    sensitivity: dict[FlowNode, frozenset]
    iterations: int = field(default=0, compare=False)

    def origins(self, n: FlowNode) -> frozenset:
        return self.taint.get(n, _EMPTY)

    def assets(self, n: FlowNode) -> frozenset:
        return self.sensitivity.get(n, _EMPTY)

    def is_tainted(self, n: FlowNode) -> bool:
        return bool(self.taint.get(n))

    def leq(self, other: TaintState) -> bool:
        """Pointwise ordering: every label here is also present in ``other``."""
        return all(v <= other.origins(n) for n, v in self.taint.items()) and all(
            v <= other.assets(n) for n, v in self.sensitivity.items())


def propagate_taint(g: FlowGraph, initial: Optional[TaintState] = None) -> TaintState:
    """Worklist fixpoint. ``initial`` lets a previous result be used as the start point."""
    taint = {n: _EMPTY for n in g.nodes}
    sens = {n: _EMPTY for n in g.nodes}
    world = FlowNode.world()
    if world in taint:
        taint[world] = frozenset({world})
    for n, assets in g.seeds.items():
        sens[n] = sens[n] | assets
    if initial is not None:
        for n, v in initial.taint.items():
            if n in taint:
                taint[n] = taint[n] | v
        for n, v in initial.sensitivity.items():
            if n in sens:
                sens[n] = sens[n] | v

    work = deque(n for n in g.nodes if taint[n] or sens[n])
    queued = set(work)
    iterations = 0
    while work:
        u = work.popleft()
        queued.discard(u)
        iterations += 1
        tu, su = taint[u], sens[u]
        for e in g.out_edges(u):
            v = e.dst
            if e.reason is EdgeReason.ENV_WRITE:
                flow = frozenset({v}) if tu else _EMPTY
            else:
                flow = tu
            nt = taint[v] | flow
            ns = sens[v] | su
            if nt != taint[v] or ns != sens[v]:
                taint[v], sens[v] = nt, ns
                if v not in queued:
                    queued.add(v)
                    work.append(v)
    return TaintState(g, taint, sens, iterations)


def origin_kind(origin: FlowNode) -> Optional[str]:
    if origin.kind is NodeKind.PARAM:
        return "exported-input"
    if origin.kind is NodeKind.CELL:
        return "external-resource"
    return None
