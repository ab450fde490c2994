"""Command line front end: ``sema <command> FILE...``.

Exit codes: 0 clean, 1 findings (or refused generation), 2 input errors,
3 internal fault.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .codegen import chartests
from .codegen.skeleton import generate_structural_code
from .dsl import parse_source, pretty_print
from .errors import GenRefused, LexError, ParseErrors, ResolveErrors
from .flow import ALL_PROPERTIES, Property, analyze, apply_rewrite, build_flow_graph, check_properties, propagate_taint
from .interp.explore import MAX_DEPTH, enumerate_traces, observed_flows, trace_jsonl
from .model import check_wellformed, resolve, storyboard_hash
from .model.types import Storyboard
from .report import FileReport, Problem, render_report

EXIT_OK, EXIT_FINDINGS, EXIT_ERRORS, EXIT_FAULT = 0, 1, 2, 3


@dataclass
class Outcome:
    code: int
    report: Optional[FileReport] = None
    text: str = ""
    messages: list = field(default_factory=list)  # lines for stderr


def load(path: str) -> tuple[Optional[Storyboard], FileReport]:
    """Parse and resolve one file; problems are recorded in the report."""
    rep = FileReport(path)
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        rep.problems.append(Problem("IOError", str(e)))
        return None, rep
    try:
        sb = resolve(parse_source(data, path))
    except LexError as e:
        rep.problems.append(Problem("LexError", e.message, e.span))
        return None, rep
    except ParseErrors as es:
        rep.problems += [Problem("ParseError", e.message, e.span) for e in es.errors]
        return None, rep
    except ResolveErrors as es:
        rep.problems += [Problem(e.kind, e.message, e.span) for e in es.errors]
        return None, rep
    rep.storyboard = storyboard_hash(sb)
    rep.diagnostics = check_wellformed(sb)
    return sb, rep


def _properties(text: Optional[str]) -> frozenset:
    if not text:
        return ALL_PROPERTIES
    return frozenset(Property.parse(p.strip()) for p in text.split(",") if p.strip())


def cmd_check(path: str, args) -> Outcome:
    sb, rep = load(path)
    return Outcome(EXIT_ERRORS if sb is None else EXIT_OK, rep)


def cmd_analyze(path: str, args) -> Outcome:
    sb, rep = load(path)
    if sb is None:
        return Outcome(EXIT_ERRORS, rep)
    rep.findings = analyze(sb, args.properties)
    return Outcome(EXIT_FINDINGS if rep.findings else EXIT_OK, rep)


def _out_dir(args, path: str) -> Path:
    return Path(args.out) / Path(path).stem


def cmd_gen_code(path: str, args) -> Outcome:
    sb, rep = load(path)
    if sb is None:
        return Outcome(EXIT_ERRORS, rep)
    try:
        units = generate_structural_code(sb, allow_findings=args.allow_findings)
    except GenRefused as e:
        rep.findings = [f for f in analyze(sb) if f.is_error]
        return Outcome(EXIT_FINDINGS, rep, messages=[f"{path}: generation refused: {e}"])
    root = _out_dir(args, path)
    for u in units:
        target = root / u.path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(u.contents, encoding="utf-8")
    return Outcome(EXIT_OK, rep, text=f"{path}: wrote {len(units)} units to {root}\n")


def cmd_gen_tests(path: str, args) -> Outcome:
    sb, rep = load(path)
    if sb is None:
        return Outcome(EXIT_ERRORS, rep)
    errors = [f for f in analyze(sb) if f.is_error]
    if errors and not args.allow_findings:
        rep.findings = errors
        return Outcome(EXIT_FINDINGS, rep, messages=[
            f"{path}: generation refused: {len(errors)} error-severity finding(s)"])
    specs = chartests.generate_characterization_tests(sb)
    root = _out_dir(args, path)
    root.mkdir(parents=True, exist_ok=True)
    (root / "tests.json").write_text(chartests.dumps(sb, specs), encoding="utf-8")
    skipped = sum(1 for s in specs if s.status == chartests.SKIPPED)
    return Outcome(EXIT_OK, rep,
                   text=f"{path}: wrote {len(specs)} tests ({skipped} skipped) to {root / 'tests.json'}\n")


def cmd_simulate(path: str, args) -> Outcome:
    sb, rep = load(path)
    if sb is None:
        return Outcome(EXIT_ERRORS, rep)
    traces = enumerate_traces(sb, args.depth)
    flows = sorted(observed_flows(traces))
    if args.format == "json":
        text = trace_jsonl(traces)
    else:
        text = f"{path}: {len(traces)} traces up to depth {args.depth}, {len(flows)} observed flows\n"
        text += "".join(f"  {p} from {k} at {s}\n" for p, k, s in flows)
    if args.out:
        out = _out_dir(args, path)
        out.mkdir(parents=True, exist_ok=True)
        (out / "traces.jsonl").write_text(trace_jsonl(traces), encoding="utf-8")
    return Outcome(EXIT_FINDINGS if flows else EXIT_OK, None, text=text)


def fix_storyboard(sb: Storyboard):
    """Apply the first applicable rewrite. Returns (raw, findings after re-analysis)."""
    findings = check_properties(sb, propagate_taint(build_flow_graph(sb)))
    rewrites = [f.fix.rewrite for f in findings if f.fix is not None and f.fix.rewrite is not None]
    if not rewrites:
        return sb.raw, findings
    raw = apply_rewrite(sb.raw, rewrites[0])
    fixed = resolve(parse_source(pretty_print(raw), sb.file))
    return raw, analyze(fixed)


def cmd_fix(path: str, args) -> Outcome:
    sb, rep = load(path)
    if sb is None:
        return Outcome(EXIT_ERRORS, rep)
    raw, remaining = fix_storyboard(sb)
    before, after = pretty_print(sb.raw), pretty_print(raw)
    if before == after:
        rep.findings = remaining
        return Outcome(EXIT_FINDINGS if remaining else EXIT_OK, rep,
                       messages=[f"{path}: no automatic fix available"] if remaining else [])
    target = Path(path).with_name(Path(path).stem + ".fixed.sb")
    target.write_text(after, encoding="utf-8")
    patch = "".join(difflib.unified_diff(before.splitlines(True), after.splitlines(True),
                                         path, str(target)))
    rep.findings = remaining
    return Outcome(EXIT_FINDINGS if remaining else EXIT_OK, None,
                   text=patch + f"{path}: wrote {target}, {len(remaining)} finding(s) remain\n")


COMMANDS: dict[str, tuple[Callable, str]] = {
    "check": (cmd_check, "parse, resolve and report well-formedness warnings"),
    "analyze": (cmd_analyze, "run the security property checks"),
    "gen-code": (cmd_gen_code, "emit structural code skeletons under --out"),
    "gen-tests": (cmd_gen_tests, "emit characterization tests under --out"),
    "simulate": (cmd_simulate, "explore event traces and report observed flows"),
    "fix": (cmd_fix, "apply the first suggested rewrite and write <stem>.fixed.sb"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sema", description="Storyboard security analysis.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("files", nargs="+", metavar="FILE")
        p.add_argument("--format", choices=("human", "json"), default="human")
        if name in ("gen-code", "gen-tests", "simulate"):
            p.add_argument("--out", required=name != "simulate", metavar="DIR")
        if name == "analyze":
            p.add_argument("--properties", type=_properties, default=ALL_PROPERTIES,
                           help="comma separated, e.g. P1,P2")
        if name in ("gen-code", "gen-tests"):
            p.add_argument("--allow-findings", action="store_true",
                           help="generate even when high-severity findings exist")
        if name == "simulate":
            p.add_argument("--depth", type=int, default=4, choices=range(0, MAX_DEPTH + 1),
                           metavar=f"0..{MAX_DEPTH}")
    return ap


def _color_enabled() -> bool:
    return os.environ.get("SEMA_COLOR", "1") != "0" and sys.stdout.isatty()


def run(argv: Optional[list] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    fn = COMMANDS[args.command][0]

    def guarded(path: str) -> Outcome:
        try:
            return fn(path, args)
        except Exception:
            return Outcome(EXIT_FAULT, messages=[f"{path}: internal error", traceback.format_exc()])

    with ThreadPoolExecutor(max_workers=min(8, len(args.files))) as pool:
        outcomes = list(pool.map(guarded, args.files))

    reports = [o.report for o in outcomes if o.report is not None]
    if args.format == "json" and args.command != "simulate":
        sys.stdout.write(render_report(reports, "json"))
    else:
        color = _color_enabled()
        for o in outcomes:
            if o.report is not None and (args.command in ("check", "analyze") or o.report.problems
                                         or o.report.findings):
                sys.stdout.write(render_report([o.report], "human", color))
            sys.stdout.write(o.text)
    for o in outcomes:
        for m in o.messages:
            print(m, file=sys.stderr)
    return max(o.code for o in outcomes)


def main(argv: Optional[list] = None) -> None:
    try:
        code = run(argv)
    except SystemExit:
        raise
    except Exception:
        traceback.print_exc()
        code = EXIT_FAULT
    sys.exit(code)


if __name__ == "__main__":
    main()
