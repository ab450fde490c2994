"""Source-text rendering of resolved expressions and guards."""

from __future__ import annotations

from ..dsl.lexer import escape
from .types import And, Call, Cond, Expr, Guard, Literal, Not, Or, ParamRef, Press, WidgetRef

_PREC = {Or: 1, And: 2, Not: 3, Press: 4, Cond: 4}


def expr_text(e: Expr) -> str:
    if isinstance(e, Literal):
        return escape(e.value) if isinstance(e.value, str) else str(e.value)
    if isinstance(e, (WidgetRef, ParamRef)):
        return e.name
    assert isinstance(e, Call)
    text = f"{e.resource}.{e.capability}"
    if e.parens or e.args:
        text += "(" + ", ".join(expr_text(a) for a in e.args) + ")"
    return text


def guard_text(g: Guard, min_prec: int = 0) -> str:
    prec = _PREC[type(g)]
    if isinstance(g, Press):
        text = f"{g.button} was pressed"
    elif isinstance(g, Cond):
        text = f"condition {expr_text(g.expr)}"
    elif isinstance(g, Not):
        text = "not " + guard_text(g.operand, 3)
    else:
        op = "or" if isinstance(g, Or) else "and"
        text = f"{guard_text(g.left, prec)} {op} {guard_text(g.right, prec + 1)}"
    return f"({text})" if prec < min_prec else text
