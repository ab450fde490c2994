"""Fix suggestions: rehoming assets from external storage to private storage."""

from __future__ import annotations

import difflib
from dataclasses import dataclass, replace
from typing import Optional

from ..dsl import syntax as ast
from ..dsl.parser import parse_source
from ..dsl.printer import pretty_print
from ..model.resolve import resolve
from ..model.types import Storyboard, Trust
from .graph import FlowNode, NodeKind, build_flow_graph
from .properties import Finding, Property, check_properties
from .taint import TaintState, propagate_taint

PRIVATE_STORE = "INT_STORE"

# used when no rewrite is available or rehoming would not remove the finding
_TEXT_ONLY = {
    Property.P2: "validate data read from untrusted storage before the sensitive operation",
    Property.R1: "move the private asset out of shared or external storage into a private resource",
}


@dataclass(frozen=True)
class Rehome:
    """Move every call on ``(resource, asset)`` pairs to the private resource ``target``."""

    moves: tuple[tuple[str, str], ...]
    target: str


@dataclass(frozen=True)
class FixSuggestion:
    description: str
    rewrite: Optional[Rehome] = None
    patch: str = ""


def _external_cells(sb: Storyboard, nodes) -> list[tuple[str, str]]:
    out = []
    for n in nodes:
        if n.kind is not NodeKind.CELL or not isinstance(n.parts[1], str):
            continue
        if sb.resource(n.parts[0]).trust is Trust.EXTERNAL and n.parts not in out:
            out.append(n.parts)
    return out


def _target_name(raw: ast.RawStoryboard) -> str:
    existing = {r.name: r.trust for r in raw.resources}
    name, i = PRIVATE_STORE, 1
    while existing.get(name, "private") != "private":
        i += 1
        name = f"{PRIVATE_STORE}_{i}"
    return name


def _closes(sb: Storyboard, f: Finding, fixed_text: str) -> bool:
    """Re-analysis oracle: the finding disappears and no new P2/R1 finding appears."""
    fixed = resolve(parse_source(fixed_text, sb.file))
    after = {(g.property, g.sink) for g in
             check_properties(fixed, propagate_taint(build_flow_graph(fixed)), with_fixes=False)}
    if (f.property, f.sink) in after:
        return False
    before = {(g.property, g.sink) for g in
              check_properties(sb, propagate_taint(build_flow_graph(sb)), with_fixes=False)}
    return not any(p in (Property.P2, Property.R1) for p, _ in after - before)


def suggest_fix(sb: Storyboard, f: Finding, t: Optional[TaintState] = None) -> Optional[FixSuggestion]:
    if f.property in (Property.P2, Property.R1):
        cells = _external_cells(sb, [e.dst for e in f.witness])
        if f.property is Property.P2 and t is not None:
            # every literal external origin feeding the same sink, so the fix closes all of them
            sink_nodes = [n for n in t.graph.nodes if n.kind is NodeKind.CAP_IN
                          and f"{n.parts[0]}.{n.parts[1]}" == f.sink]
            origins = sorted({o for n in sink_nodes for o in t.origins(n)}, key=lambda o: o.sort_key)
            cells += [c for c in _external_cells(sb, origins) if c not in cells]
        if cells and sb.raw is not None:
            target = _target_name(sb.raw)
            rewrite = Rehome(tuple(cells), target)
            assets = ", ".join(f'"{a}"' for _, a in cells)
            desc = (f"store {assets} in private resource {target} instead of "
                    f"{', '.join(sorted({r for r, _ in cells}))}, so only the app can access it")
            before = pretty_print(sb.raw)
            after = pretty_print(apply_rewrite(sb.raw, rewrite))
            if not _closes(sb, f, after):
                return FixSuggestion(_TEXT_ONLY[f.property])
            patch = "".join(difflib.unified_diff(before.splitlines(True), after.splitlines(True),
                                                 f"a/{sb.file}", f"b/{sb.file}"))
            return FixSuggestion(desc, rewrite, patch)
        return FixSuggestion(_TEXT_ONLY[f.property])
    if f.property is Property.P1:
        return FixSuggestion("validate or do not forward exported input")
    if f.property is Property.P3:
        return FixSuggestion("do not write sensitive data to external resources or return it "
                             "from exported screens")
    if f.property is Property.P4:
        return FixSuggestion(f"do not export the entry screen, or check the caller before {f.sink}")
    return None


def _rewrite_expr(e: ast.RawExpr, moves: set, target: str, used: list) -> ast.RawExpr:
    if not isinstance(e, ast.RefExpr) or e.args is None:
        return e
    args = tuple(_rewrite_expr(a, moves, target, used) for a in e.args)
    name = e.name
    if e.member is not None and args and isinstance(args[0], ast.StrLit) \
            and (e.name, args[0].value) in moves:
        if (e.name, e.member) not in used:
            used.append((e.name, e.member))
        name = target
    return replace(e, name=name, args=args)


def _rewrite_guard(g: ast.RawGuard, moves: set, target: str, used: list) -> ast.RawGuard:
    if isinstance(g, ast.CondAtom):
        return replace(g, expr=_rewrite_expr(g.expr, moves, target, used))
    if isinstance(g, ast.NotGuard):
        return replace(g, operand=_rewrite_guard(g.operand, moves, target, used))
    if isinstance(g, (ast.AndGuard, ast.OrGuard)):
        return replace(g, left=_rewrite_guard(g.left, moves, target, used),
                       right=_rewrite_guard(g.right, moves, target, used))
    return g


def apply_rewrite(raw: ast.RawStoryboard, rewrite: Rehome) -> ast.RawStoryboard:
    """Return a new syntax tree with the moved calls pointing at the private resource."""
    moves = set(rewrite.moves)
    target = rewrite.target
    used: list[tuple[str, str]] = []

    def expr(e):
        return None if e is None else _rewrite_expr(e, moves, target, used)

    screens = []
    for s in raw.screens:
        widgets = tuple(replace(w, init=expr(w.init)) for w in s.widgets)
        transitions = tuple(
            replace(t,
                    guard=None if t.guard is None else _rewrite_guard(t.guard, moves, target, used),
                    propagations=tuple(replace(p, expr=expr(p.expr)) for p in t.propagations))
            for t in s.transitions)
        screens.append(replace(s, widgets=widgets, transitions=transitions))

    by_name = {r.name: r for r in raw.resources}
    needed: list[ast.RawCapability] = []
    for res in raw.resources:
        for cap in res.capabilities:
            if (res.name, cap.name) in used and all(c.name != cap.name for c in needed):
                needed.append(cap)
    resources = list(raw.resources)
    if target in by_name:
        existing = by_name[target]
        extra = tuple(c for c in needed if all(c.name != x.name for x in existing.capabilities))
        resources[resources.index(existing)] = replace(existing, capabilities=existing.capabilities + extra)
    elif needed:
        sources = {r for r, _ in rewrite.moves}
        last = max(i for i, r in enumerate(resources) if r.name in sources)
        resources.insert(last + 1, ast.RawResource(target, "private", tuple(needed)))
    return replace(raw, resources=tuple(resources), screens=tuple(screens))
