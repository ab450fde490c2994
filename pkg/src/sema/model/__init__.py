"""Resolved storyboard model: types, resolution, checks and JSON interchange."""

from .checks import Diagnostic, check_wellformed, is_contradictory, reachable_screens
from .resolve import resolve
from .serialize import dumps, storyboard_hash, to_json
from .types import (
    And, Call, Capability, Cond, Expr, Guard, Literal, Not, Or, ParamRef, Press,
    Propagation, ResourceView, Screen, SecurityRequirement, Storyboard, Transition,
    Trust, Widget, WidgetKind, WidgetRef, guard_atoms, iter_calls,
)

__all__ = [
    "Diagnostic", "check_wellformed", "is_contradictory", "reachable_screens", "resolve",
    "dumps", "storyboard_hash", "to_json", "And", "Call", "Capability", "Cond", "Expr",
    "Guard", "Literal", "Not", "Or", "ParamRef", "Press", "Propagation", "ResourceView",
    "Screen", "SecurityRequirement", "Storyboard", "Transition", "Trust", "Widget",
    "WidgetKind", "WidgetRef", "guard_atoms", "iter_calls",
]
