"""Human and JSON rendering of analysis results."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .flow.graph import FlowEdge
from .flow.properties import Finding, Property
from .model.checks import Diagnostic
from .span import SourceSpan

FINDINGS_SCHEMA = "sema-findings/1"

_COLORS = {"high": "\x1b[31m", "medium": "\x1b[33m", "error": "\x1b[31m", "warning": "\x1b[33m"}
_RESET = "\x1b[0m"


@dataclass(frozen=True)
class Problem:
    """A lex, parse or resolve error that stopped analysis of a file."""

    kind: str
    message: str
    span: Optional[SourceSpan] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}error: [{self.kind}] {self.message}"


@dataclass
class FileReport:
    file: str
    storyboard: Optional[str] = None  # model hash, absent when the file did not resolve
    findings: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    problems: list = field(default_factory=list)


def _paint(text: str, key: str, color: bool) -> str:
    return f"{_COLORS[key]}{text}{_RESET}" if color and key in _COLORS else text


def _site(e: FlowEdge) -> str:
    return str(e.site) if e.site is not None else "-"


def witness_lines(f: Finding) -> list[str]:
    """Arrow chain of the witness, one edge per line with its source site."""
    lines = [str(f.witness[0].src)]
    for e in f.witness:
        lines.append(f"  -> {e.dst}  [{e.reason.value} @ {_site(e)}]")
    return lines


def _human(r: FileReport, color: bool) -> list[str]:
    out = []
    for p in r.problems:
        out.append(_paint(str(p), "error", color))
    for d in r.diagnostics:
        out.append(_paint(str(d), d.severity, color))
    if r.problems:
        return out
    if not r.findings:
        out.append(f"{r.file}: no findings")
        return out
    high = sum(1 for f in r.findings if f.is_error)
    n = len(r.findings)
    out.append(f"{r.file}: {n} finding{'s' if n != 1 else ''} ({high} high)")
    for prop in Property:
        group = [f for f in r.findings if f.property is prop]
        if not group:
            continue
        out.append(f"  {prop.value}")
        for f in group:
            sev = _paint(f.severity, f.severity, color)
            out.append(f"    {sev} {f.sink}: {f.message}")
            out += ["      " + line for line in witness_lines(f)]
            if f.fix is not None:
                out.append(f"      fix: {f.fix.description}")
    return out


def _span_json(s: Optional[SourceSpan]):
    if s is None:
        return None
    return {"file": s.file, "start_line": s.start_line, "start_col": s.start_col,
            "end_line": s.end_line, "end_col": s.end_col}


def _edge_json(e: FlowEdge) -> dict:
    s = e.site
    return {"from": str(e.src), "to": str(e.dst), "reason": e.reason.value,
            "file": s.file if s else None, "line": s.start_line if s else None,
            "col": s.start_col if s else None}


def finding_json(f: Finding) -> dict:
    return {
        "property": f.property.value, "severity": f.severity, "source_kind": f.source_kind,
        "sink": f.sink, "message": f.message,
        "witness": [_edge_json(e) for e in f.witness],
        "fix": None if f.fix is None else {"description": f.fix.description,
                                           "rewrite-patch": f.fix.patch},
    }


def _diag_json(d: Diagnostic) -> dict:
    return {"severity": d.severity, "code": d.code, "message": d.message, "span": _span_json(d.span)}


def report_document(reports: list[FileReport]) -> dict:
    return {"schema": FINDINGS_SCHEMA, "files": [{
        "file": r.file, "storyboard": r.storyboard,
        "findings": [finding_json(f) for f in r.findings],
        "diagnostics": [_diag_json(d) for d in r.diagnostics],
        "errors": [{"kind": p.kind, "message": p.message, "span": _span_json(p.span)}
                   for p in r.problems],
    } for r in reports]}


def render_report(reports: list[FileReport], fmt: str = "human", color: bool = False) -> str:
    if fmt == "json":
        return json.dumps(report_document(reports), indent=2, sort_keys=True) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    lines: list[str] = []
    for r in reports:
        lines += _human(r, color)
    return "\n".join(lines) + "\n"
