"""Navigation reachability and well-formedness warnings."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..span import SourceSpan
from .types import And, Guard, Not, Or, Storyboard


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: [{self.code}] {self.message}"


def reachable_screens(sb: Storyboard) -> set[str]:
    """Screens reachable from the launcher or from any exported screen."""
    succ: dict[str, list[str]] = {s.name: [t.target for t in s.transitions] for s in sb.screens}
    roots = [sb.entry] + [s.name for s in sb.screens if s.exported]
    seen = set(roots)
    queue = deque(roots)
    while queue:
        for nxt in succ.get(queue.popleft(), ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def _conjuncts(g: Guard) -> list[Guard]:
    if isinstance(g, And):
        return _conjuncts(g.left) + _conjuncts(g.right)
    return [g]


def is_contradictory(g: Guard) -> bool:
    """True when some conjunction contains both X and ``not X`` (structural match)."""
    if isinstance(g, And):
        parts = _conjuncts(g)
        negated = [p.operand for p in parts if isinstance(p, Not)]
        if any(n == p for n in negated for p in parts):
            return True
        return any(is_contradictory(p) for p in parts if not isinstance(p, And))
    if isinstance(g, Or):
        return is_contradictory(g.left) or is_contradictory(g.right)
    if isinstance(g, Not):
        return is_contradictory(g.operand)
    return False


def check_wellformed(sb: Storyboard) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    reach = reachable_screens(sb)
    for s in sb.screens:
        if s.name not in reach:
            out.append(Diagnostic("warning", "Unreachable",
                                  f"screen {s.name!r} is not reachable from {sb.entry!r}", s.span))
        if s.exported and not s.params:
            out.append(Diagnostic("warning", "ExportedWithoutParams",
                                  f"exported screen {s.name!r} declares no parameters", s.span))
        for t in s.transitions:
            if t.guard is not None and is_contradictory(t.guard):
                out.append(Diagnostic("warning", "UnsatisfiableGuard",
                                      f"guard of {t.source} -> {t.target} contains X and not X",
                                      t.guard.span))
    return out
