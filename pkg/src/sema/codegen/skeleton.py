"""Structural code emitter for the neutral ``.sk`` skeleton format.

Guards are compiled to straight-line code with short-circuit jumps, so the
generated navigation behaves exactly like the storyboard. Everything else
(widget contents, propagated values) becomes a BUSINESS-LOGIC hook whose
default body is the storyboard expression.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from ..errors import GenRefused
from ..flow.graph import literal_keys
from ..flow.properties import Finding
from ..model import types as mt
from ..model.serialize import storyboard_hash
from ..model.text import expr_text, guard_text
from ..model.types import Storyboard, Trust

FORMAT = "sema-skeleton/1"
IND = "  "


@dataclass(frozen=True)
class CodeUnit:
    path: str
    contents: str


def guard_function_name(t: mt.Transition) -> str:
    return f"g{t.index}_{t.source}_to_{t.target}"


class _GuardCompiler:
    def __init__(self) -> None:
        self.lines: list[str] = []
        self.temps = 0
        self.labels = 0

    def temp(self) -> str:
        name = f"v{self.temps}"
        self.temps += 1
        return name

    def label(self) -> str:
        name = f"L{self.labels}"
        self.labels += 1
        return name

    def emit(self, text: str) -> None:
        self.lines.append(IND * 2 + text)

    def expr(self, e: mt.Expr) -> str:
        if isinstance(e, mt.Literal):
            v = self.temp()
            self.emit(f"{v} = const {expr_text(e)}")
        elif isinstance(e, mt.WidgetRef):
            v = self.temp()
            self.emit(f"{v} = widget {e.name}")
        elif isinstance(e, mt.ParamRef):
            v = self.temp()
            self.emit(f"{v} = param {e.name}")
        else:
            args = [self.expr(a) for a in e.args]
            v = self.temp()
            self.emit(f"{v} = call {e.resource}.{e.capability}({', '.join(args)})")
        return v

    def guard(self, g: mt.Guard, result: str) -> None:
        if isinstance(g, mt.Press):
            self.emit(f"{result} = pressed {g.button}")
        elif isinstance(g, mt.Cond):
            v = self.expr(g.expr)
            self.emit(f"{result} = truthy {v}")
        elif isinstance(g, mt.Not):
            self.guard(g.operand, result)
            self.emit(f"{result} = not {result}")
        else:
            end = self.label()
            self.guard(g.left, result)
            jump = "jump-if-false" if isinstance(g, mt.And) else "jump-if-true"
            self.emit(f"{jump} {result} {end}")
            self.guard(g.right, result)
            self.lines.append(f"{IND}{end}:")


def _guard_function(t: mt.Transition) -> list[str]:
    name = guard_function_name(t)
    out = [f"{IND}guard {name} {t.source} -> {t.target}"]
    if t.guard is None:
        out.append(f"{IND * 2}source <always>")
        out.append(f"{IND * 2}return true")
    else:
        out.append(f"{IND * 2}source {guard_text(t.guard)}")
        comp = _GuardCompiler()
        comp.guard(t.guard, "r")
        out += comp.lines
        out.append(f"{IND * 2}return r")
    out.append(f"{IND}end")
    return out


def _header(sb: Storyboard, unit: str) -> list[str]:
    return [FORMAT, f"storyboard {storyboard_hash(sb)}", f"unit {unit}", ""]


def _screen_unit(sb: Storyboard, s: mt.Screen) -> CodeUnit:
    lines = _header(sb, f"screen {s.name}")
    flags = [f for f, on in (("launcher", s.launcher), ("exported", s.exported)) if on]
    lines.append("flags " + (" ".join(flags) if flags else "none"))
    for p, ty in s.params:
        lines.append(f"param {p}: {ty}")
    lines += ["", "WIDGETS"]
    hooks: list[tuple[str, str, Optional[mt.Expr]]] = []
    for w in s.widgets:
        lines.append(f"{IND}widget {w.kind.value} {w.name}")
        if w.kind is not mt.WidgetKind.BUTTON:
            hook = f"init_{w.name}"
            lines.append(f"{IND * 2}content-from {hook}")
            hooks.append((hook, f"widget {w.name}", w.init))
    lines += ["", "GUARDS"]
    for t in s.transitions:
        lines += _guard_function(t)
    lines += ["", "DISPATCH", f"{IND}on press(button)"]
    for t in s.transitions:
        binds = []
        for p in t.propagations:
            hook = f"prop_{t.index}_{p.param}"
            binds.append(f"{p.param} = {hook}")
            hooks.append((hook, f"{t.target}.{p.param}", p.expr))
        bind = (" bind " + ", ".join(binds)) if binds else ""
        lines.append(f"{IND * 2}if {guard_function_name(t)} goto {t.target}{bind}")
    lines.append(f"{IND * 2}else stay")
    lines.append(f"{IND}end")
    lines += ["", "BUSINESS-LOGIC"]
    for hook, target, default in hooks:
        lines.append(f"{IND}hook {hook} -> {target}")
        lines.append(f"{IND * 2}default {expr_text(default) if default is not None else '<empty>'}")
    lines.append(f"{IND}hook on_enter_{s.name}")
    lines.append(f"{IND * 2}default <empty>")
    return CodeUnit(f"screens/{s.name}.sk", "\n".join(lines) + "\n")


def _resources_unit(sb: Storyboard) -> CodeUnit:
    lines = _header(sb, "resources")
    lines.append("RESOURCES")
    keys = literal_keys(sb)
    for r in sb.resources:
        lines.append(f"{IND}resource {r.name} {r.trust.value}")
        if r.trust is Trust.PRIVATE:
            owned = " ".join(expr_text(mt.Literal(k)) for k in keys[r.name]) or "<none>"
            lines.append(f"{IND * 2}owned {owned}")
        for c in r.capabilities:
            sig = ", ".join(f"{p}: {t}" for p, t in c.params)
            ret = f" -> {c.returns}" if c.returns else ""
            annots = "".join(f" {a}" for a, on in (("sensitive", c.sensitive), ("privileged", c.privileged)) if on)
            lines.append(f"{IND * 2}capability {c.name}({sig}){ret}{annots}")
            if r.trust is Trust.PRIVATE and c.params:
                check = f"require-owned {c.params[0][0]}"
            elif r.trust is Trust.PRIVATE:
                check = "app-only"
            elif r.trust is Trust.SHARED:
                check = "platform-mediated"
            else:
                check = "untrusted-source"
            lines.append(f"{IND * 3}wrapper {check}")
        lines.append(f"{IND}end")
    return CodeUnit("resources.sk", "\n".join(lines) + "\n")


def generate_structural_code(sb: Storyboard, findings: Optional[Iterable[Finding]] = None,
                             allow_findings: bool = False) -> list[CodeUnit]:
    """One unit per screen plus ``resources.sk``.

    Refuses (``GenRefused``) while error-severity findings exist, unless
    ``allow_findings`` is set. ``findings`` defaults to a fresh analysis.
    """
    if not allow_findings:
        if findings is None:
            from ..flow import analyze
            findings = analyze(sb)
        errors = [f for f in findings if f.is_error]
        if errors:
            raise GenRefused(f"{len(errors)} error-severity finding(s); first: "
                             f"{errors[0].property.value} at {errors[0].sink}",
                             errors[0].witness[-1].site)
    return [_screen_unit(sb, s) for s in sb.screens] + [_resources_unit(sb)]


_GUARD_HEAD = re.compile(r"^  guard (\S+) ")
_CALL = re.compile(r"= call ([A-Za-z_]\w*\.[A-Za-z_]\w*)\(")


def guard_sources(units: Iterable[CodeUnit]) -> list[str]:
    """The ``source`` text of every generated guard function."""
    out = []
    for u in units:
        for line in u.contents.splitlines():
            if line.startswith(IND * 2 + "source ") and line.strip() != "source <always>":
                out.append(line.strip()[len("source "):])
    return out


def guard_call_sequences(unit: CodeUnit) -> dict[str, list[str]]:
    """Capability calls of each guard function in emitted order."""
    out: dict[str, list[str]] = {}
    current = None
    for line in unit.contents.splitlines():
        m = _GUARD_HEAD.match(line)
        if m:
            current = m.group(1)
            out[current] = []
        elif line == f"{IND}end":
            current = None
        elif current is not None:
            c = _CALL.search(line)
            if c:
                out[current].append(c.group(1))
    return out
