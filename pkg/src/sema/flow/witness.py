"""Shortest witness paths between flow-graph nodes."""

from __future__ import annotations

from collections import deque

from ..errors import NoPath
from .graph import FlowEdge, FlowGraph, FlowNode


def path_key(path: tuple[FlowEdge, ...]) -> tuple:
    return (len(path), [e.sort_key for e in path])


def extract_witness(g: FlowGraph, source: FlowNode, sink: FlowNode) -> tuple[FlowEdge, ...]:
    """Shortest edge path from ``source`` to ``sink``.

    Among equally short paths the one whose first differing edge has the
    earlier source position wins, then the lexicographically smaller node.
    """
    if source == sink:
        loops = [e for e in g.out_edges(source) if e.dst == source]
        if loops:
            return (min(loops, key=lambda e: e.sort_key),)
        raise NoPath(f"no self-loop on {source}")
    dist = {sink: 0}
    queue = deque([sink])
    while queue and source not in dist:
        v = queue.popleft()
        for e in g.in_edges(v):
            if e.src not in dist:
                dist[e.src] = dist[v] + 1
                queue.append(e.src)
    if source not in dist:
        raise NoPath(f"{sink} is not reachable from {source}")
    path = []
    u = source
    while u != sink:
        step = min((e for e in g.out_edges(u) if dist.get(e.dst) == dist[u] - 1),
                   key=lambda e: e.sort_key)
        path.append(step)
        u = step.dst
    return tuple(path)
