import random
import sys

import pytest

from sema import load_storyboard
from sema.fixtures import path, source
from sema.flow.graph import EdgeReason, FlowEdge, FlowGraph, FlowNode


@pytest.fixture
def messenger():
    return load_storyboard(source("messenger"), str(path("messenger")))


@pytest.fixture
def messenger_private():
    return load_storyboard(source("messenger_private"), str(path("messenger_private")))


@pytest.fixture
def messenger_fixed():
    return load_storyboard(source("messenger_fixed"), str(path("messenger_fixed")))


def app(body: str, resources: str = "", requirements: str = "") -> str:
    """Wrap screen declarations into a complete storyboard."""
    res = f"resources {{ {resources} }}" if resources else ""
    req = f"security-requirements {{ {requirements} }}" if requirements else ""
    return f"application A {{ {res} {req} {body} }}"


def random_flow_graph(rng: random.Random, n_nodes: int = 12, n_edges: int = 24) -> FlowGraph:
    """Arbitrary graph: World only has EnvWrite out-edges, some nodes carry seeds."""
    g = FlowGraph()
    world = g.add_node(FlowNode.world())
    nodes = [g.add_node(FlowNode.cell("R", f"k{i}")) for i in range(n_nodes)]
    reasons = [r for r in EdgeReason if r not in (EdgeReason.ENV_WRITE, EdgeReason.NAVIGATE)]
    for _ in range(n_edges):
        a, b = rng.choice(nodes), rng.choice(nodes)
        g.add_edge(FlowEdge(a, b, rng.choice(reasons)))
    for n in rng.sample(nodes, rng.randint(0, 3)):
        g.add_edge(FlowEdge(world, n, EdgeReason.ENV_WRITE))
    for n in rng.sample(nodes, rng.randint(0, 3)):
        g.seed(n, {rng.choice("abc")})
    return g


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
