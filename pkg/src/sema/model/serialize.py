"""Canonical JSON form of a resolved storyboard (``sema-model/1``)."""

from __future__ import annotations

import hashlib
import json
from typing import Any, Optional

from .types import (
    And, Call, Cond, Expr, Guard, Literal, Not, Or, ParamRef, Press, Storyboard, WidgetRef,
)

SCHEMA = "sema-model/1"


def expr_json(e: Expr) -> dict[str, Any]:
    if isinstance(e, Literal):
        return {"literal": e.value}
    if isinstance(e, WidgetRef):
        return {"widget": e.name}
    if isinstance(e, ParamRef):
        return {"param": e.name}
    assert isinstance(e, Call)
    return {"call": {"resource": e.resource, "capability": e.capability,
                     "args": [expr_json(a) for a in e.args]}}


def guard_json(g: Optional[Guard]) -> Optional[dict[str, Any]]:
    if g is None:
        return None
    if isinstance(g, Press):
        return {"press": g.button}
    if isinstance(g, Cond):
        return {"cond": expr_json(g.expr)}
    if isinstance(g, Not):
        return {"not": guard_json(g.operand)}
    key = "and" if isinstance(g, And) else "or"
    assert isinstance(g, (And, Or))
    return {key: [guard_json(g.left), guard_json(g.right)]}


def _params(params) -> list[dict[str, str]]:
    return [{"name": n, "type": t} for n, t in params]


def to_json(sb: Storyboard) -> dict[str, Any]:
    return {
        "schema": SCHEMA,
        "app": sb.app_name,
        "entry": sb.entry,
        "resources": [
            {"name": r.name, "trust": r.trust.value, "capabilities": [
                {"name": c.name, "params": _params(c.params), "returns": c.returns,
                 "sensitive": c.sensitive, "privileged": c.privileged}
                for c in r.capabilities]}
            for r in sb.resources],
        "requirements": [{"asset": q.asset, "kind": "is-private"} for q in sb.requirements],
        "screens": [
            {"name": s.name, "launcher": s.launcher, "exported": s.exported,
             "params": _params(s.params),
             "widgets": [{"kind": w.kind.value, "name": w.name,
                          "init": expr_json(w.init) if w.init is not None else None}
                         for w in s.widgets],
             "transitions": [{"source": t.source, "target": t.target, "guard": guard_json(t.guard),
                              "propagations": [{"expr": expr_json(p.expr), "param": p.param}
                                               for p in t.propagations]}
                             for t in s.transitions]}
            for s in sb.screens],
    }


def dumps(sb: Storyboard) -> str:
    return json.dumps(to_json(sb), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def storyboard_hash(sb: Storyboard) -> str:
    canon = json.dumps(to_json(sb), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
