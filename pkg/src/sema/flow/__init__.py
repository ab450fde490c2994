"""Dataflow graph, taint fixpoint, property checks and fix suggestions."""

from .fixes import FixSuggestion, Rehome, apply_rewrite, suggest_fix
from .graph import (
    TOP, EdgeReason, FlowEdge, FlowGraph, FlowNode, NodeKind, build_flow_graph, expr_sources,
)
from .properties import (
    ALL_PROPERTIES, SEVERITY, SOURCE_KIND, Finding, Property, check_properties, exposed_screens,
)
from .taint import TaintState, origin_kind, propagate_taint
from .witness import extract_witness


def analyze(sb, selected=ALL_PROPERTIES):
    """Graph, fixpoint and findings in one call."""
    return check_properties(sb, propagate_taint(build_flow_graph(sb)), selected)


__all__ = [
    "FixSuggestion", "Rehome", "apply_rewrite", "suggest_fix", "TOP", "EdgeReason", "FlowEdge",
    "FlowGraph", "FlowNode", "NodeKind", "build_flow_graph", "expr_sources", "ALL_PROPERTIES",
    "SEVERITY", "SOURCE_KIND", "Finding", "Property", "check_properties", "exposed_screens",
    "TaintState", "origin_kind", "propagate_taint", "extract_witness", "analyze",
]
