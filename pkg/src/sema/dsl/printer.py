"""Canonical pretty-printer for the storyboard syntax tree."""

from __future__ import annotations

from . import syntax as ast
from .lexer import escape

INDENT = "  "

_PREC = {ast.OrGuard: 1, ast.AndGuard: 2, ast.NotGuard: 3, ast.PressAtom: 4, ast.CondAtom: 4}


def format_expr(expr: ast.RawExpr) -> str:
    if isinstance(expr, ast.StrLit):
        return escape(expr.value)
    if isinstance(expr, ast.IntLit):
        return str(expr.value)
    text = expr.name
    if expr.member is not None:
        text += "." + expr.member
    if expr.args is not None:
        text += "(" + ", ".join(format_expr(a) for a in expr.args) + ")"
    return text


def format_guard(guard: ast.RawGuard, min_prec: int = 0) -> str:
    prec = _PREC[type(guard)]
    if isinstance(guard, ast.PressAtom):
        text = f"{guard.button} was pressed"
    elif isinstance(guard, ast.CondAtom):
        text = f"condition {format_expr(guard.expr)}"
    elif isinstance(guard, ast.NotGuard):
        text = "not " + format_guard(guard.operand, 3)
    else:
        op = "or" if isinstance(guard, ast.OrGuard) else "and"
        text = f"{format_guard(guard.left, prec)} {op} {format_guard(guard.right, prec + 1)}"
    return f"({text})" if prec < min_prec else text


def _params(params: tuple[ast.RawParam, ...]) -> str:
    return ", ".join(f"{p.name}: {p.type_name}" for p in params)


def _capability(cap: ast.RawCapability) -> str:
    text = f"{cap.name}({_params(cap.params)})"
    if cap.returns is not None:
        text += f" -> {cap.returns}"
    for a in cap.annotations:
        text += " " + a
    return text


def _screen(scr: ast.RawScreen, out: list[str]) -> None:
    head = "screen " + scr.name
    for flag in scr.flags:
        head += " " + flag
    if scr.params is not None:
        head += f" ({_params(scr.params)})"
    if not scr.widgets and not scr.transitions:
        out.append(f"{INDENT}{head} {{ }}")
        return
    out.append(f"{INDENT}{head} {{")
    for w in scr.widgets:
        line = f"{w.kind} {w.name}"
        if w.init is not None:
            line += " init " + format_expr(w.init)
        out.append(INDENT * 2 + line)
    for t in scr.transitions:
        line = f"go from {t.source} to {t.target}"
        if t.guard is not None:
            line += " when " + format_guard(t.guard)
        out.append(INDENT * 2 + line)
        for p in t.propagations:
            out.append(INDENT * 3 + f"propagate {format_expr(p.expr)} as {p.param}")
    out.append(INDENT + "}")


def pretty_print(raw: ast.RawStoryboard) -> str:
    """Render ``raw`` in canonical layout. Output always ends with a newline."""
    out = [f"application {raw.app_name} {{"]
    if raw.resources:
        out.append(INDENT + "resources {")
        for res in raw.resources:
            out.append(f"{INDENT * 2}{res.name} : {res.trust} {{")
            for cap in res.capabilities:
                out.append(INDENT * 3 + _capability(cap))
            out.append(INDENT * 2 + "}")
        out.append(INDENT + "}")
    if raw.requirements:
        out.append(INDENT + "security-requirements {")
        for req in raw.requirements:
            out.append(f"{INDENT * 2}{escape(req.asset)} is private")
        out.append(INDENT + "}")
    for scr in raw.screens:
        _screen(scr, out)
    out.append("}")
    return "\n".join(out) + "\n"
