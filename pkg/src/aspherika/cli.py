"""Command-line front end: check, search, graph and suite."""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from typing import Optional

from .errors import AspherikaError, HypothesisViolated, WordSyntaxError
from .presentation import PatternKind, RelativePresentation, from_equation
from .stargraph import StarGraph, build_star_graph, resolve_class, to_dot
from .suite import paper_weights, parse_manifest, prepare, run_case_full
from .weights import ASPHERICAL, FAILED, INDETERMINATE, AsphericityReport, check_asphericity, search
from .words import (ConstraintStore, letter, parse_constraints, parse_word, validate_equation,
                    word_str)

EXIT = {ASPHERICAL: 0, INDETERMINATE: 2, FAILED: 3}
USAGE = 1
TEXT_CYCLES = 12


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _parse(path: str, fn, *args):
    """Run a file parser, prefixing syntax errors with the file name."""
    try:
        return fn(_read(path), *args)
    except WordSyntaxError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _strip_comments(text: str) -> list[tuple[int, str]]:
    return [(n, raw.split("#", 1)[0]) for n, raw in enumerate(text.splitlines(), 1)]


def read_equation(text: str) -> str:
    """Equation file: word tokens over any number of lines, optionally ending in ``= 1``."""
    parts = []
    for lineno, line in _strip_comments(text):
        line = re.sub(r"=\s*1\s*$", "", line)
        parse_word(line, lineno)  # reports line and column
        if line.strip():
            parts.append(line.strip())
    return " ".join(parts)


def read_presentation(text: str, store: ConstraintStore) -> RelativePresentation:
    """One relator per line, words over t, x and coefficients."""
    rels = [parse_word(line, n) for n, line in _strip_comments(text) if line.strip()]
    if not rels:
        raise UsageError("presentation file has no relators")
    return RelativePresentation.from_words(rels, store)


_WEIGHT_LINE = re.compile(r"(?:class\s+(?P<spec>.+?)|default)\s*=\s*(?P<q>-?\d+(?:/\d+)?)\s*")
_ENDPOINTS = re.compile(r"(?P<src>\S+)\s*->\s*(?P<dst>\S+)(?:\s*:\s*(?P<label>.*))?")


def read_weights(text: str, g: StarGraph) -> dict:
    """Lines ``class <label> = p/q``, ``class <src> -> <dst> [: <label>] = p/q``, ``default = p/q``."""
    weights, default = {}, None
    for lineno, line in _strip_comments(text):
        if not line.strip():
            continue
        m = _WEIGHT_LINE.fullmatch(line.strip())
        if m is None:
            raise WordSyntaxError(f"cannot read weight line {line.strip()!r}", lineno, 1)
        value = Fraction(m.group("q"))
        spec = m.group("spec")
        if spec is None:
            default = value
            continue
        e = _ENDPOINTS.fullmatch(spec)
        if e:
            label = e.group("label")
            cls = resolve_class(g, label=None if label is None else _label(label, lineno),
                                source=letter(e.group("src")), target=letter(e.group("dst")))
        else:
            cls = resolve_class(g, label=_label(spec, lineno))
        if cls in weights and weights[cls] != value:
            raise UsageError(f"line {lineno}: class {cls} already has weight {weights[cls]}")
        weights[cls] = value
    if default is not None:
        for cls in range(g.class_count):
            weights.setdefault(cls, default)
    return weights


def _label(text: str, lineno: int) -> tuple:
    w = parse_word(text, lineno)
    return tuple(a for a in w if not a.is_identity)


def format_report(report: AsphericityReport, g: Optional[StarGraph] = None) -> str:
    lines = [f"verdict: {report.verdict}"]
    for i, v in enumerate(report.condition1):
        lines.append(f"relator {i + 1}: sum of (1 - weight) = {v}")
    for cls in report.violations:
        lines.append(f"negative weight on class {cls}")
    if report.weights:
        lines.append("weights:")
        for cls, v in sorted(report.weights.items()):
            where = f"  {g.class_edge(cls)}" if g is not None else ""
            lines.append(f"  class {cls} = {v}{where}")
    lines.append(f"cycles of weight < 2 up to length {report.bound}: {len(report.cycles)}")
    for f in report.cycles[:TEXT_CYCLES]:
        kind = "family" if f.is_family else "cycle"
        lines.append(f"  {kind} {list(f.edge_path)} weight {f.weight} label {word_str(f.label)}: {f.status}")
    if len(report.cycles) > TEXT_CYCLES:
        lines.append(f"  ... {len(report.cycles) - TEXT_CYCLES} more (see --json)")
    for r in report.required_conditions:
        lines.append(f"requires {word_str(r)} != 1")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    if report.verdict == ASPHERICAL:
        lines.append("every cycle of weight below 2 has a non-trivial label: the weights are aspherical")
    return "\n".join(lines) + "\n"


def _bound(args) -> Optional[int]:
    if args.bound is not None and args.bound < 1:
        raise UsageError("--bound must be >= 1")
    return args.bound


def _load(args):
    """(presentation, graph, store, pattern match or None) for check/search/graph."""
    store = _parse(args.constraints, parse_constraints) if args.constraints else ConstraintStore()
    if args.presentation:
        if args.pattern or args.paper_weights:
            raise UsageError("--pattern and --paper-weights need --equation")
        p = _parse(args.presentation, read_presentation, store)
        return p, build_star_graph(p), store, None
    if not args.equation:
        raise UsageError("one of --equation or --presentation is required")
    text = _parse(args.equation, read_equation)
    if args.pattern:
        _, match, _, p = prepare(text, store, PatternKind[args.pattern])
        return p, build_star_graph(p), store, match
    if args.paper_weights:
        raise UsageError("--paper-weights needs --pattern")
    p = from_equation(validate_equation(text, store))
    return p, build_star_graph(p), store, None


def _weights(args, p, g, match) -> Optional[dict]:
    if args.weights and args.paper_weights:
        raise UsageError("--weights and --paper-weights are exclusive")
    if args.weights:
        return _parse(args.weights, read_weights, g)
    if args.paper_weights:
        return paper_weights(match, p, g)
    return None


def _emit_report(args, report, g, extra=None):
    if args.json:
        d = report.to_dict()
        if extra:
            d.update(extra)
        print(json.dumps(d, indent=2))
    else:
        if extra and "search" in extra:
            s = extra["search"]
            print(f"search: {s['status']} after {s['iterations']} iterations, {s['cuts']} cuts")
        sys.stdout.write(format_report(report, g))
    if args.dot:
        _write_dot(args.dot, g, report.weights)


def _write_dot(path, g, weights):
    text = to_dot(g, weights or None)
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_check(args) -> int:
    bound = _bound(args)
    p, g, store, match = _load(args)
    w = _weights(args, p, g, match)
    if w is None:
        return _run_search(args, p, g, store, bound)
    report = check_asphericity(p, g, w, store, bound)
    _emit_report(args, report, g)
    return EXIT[report.verdict]


def _run_search(args, p, g, store, bound) -> int:
    outcome = search(p, g, store, bound)
    info = {"search": {"status": outcome.status, "iterations": outcome.iterations,
                       "cuts": outcome.cuts}}
    if outcome.status == "found":
        _emit_report(args, outcome.report, g, info)
        return EXIT[outcome.report.verdict]
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        print(f"search: {outcome.status} after {outcome.iterations} iterations, {outcome.cuts} cuts")
        print("no weight function in [0, 1] passes the test" if outcome.status == "infeasible"
              else "iteration limit reached before a verdict")
    return EXIT[FAILED] if outcome.status == "infeasible" else EXIT[INDETERMINATE]


def cmd_search(args) -> int:
    if args.weights or args.paper_weights:
        raise UsageError("search computes its own weights")
    bound = _bound(args)
    p, g, store, _ = _load(args)
    return _run_search(args, p, g, store, bound)


def cmd_graph(args) -> int:
    p, g, _, match = _load(args)
    w = _weights(args, p, g, match)
    _write_dot(args.dot or "-", g, w)
    return 0


def cmd_suite(args) -> int:
    bound = _bound(args)
    if not args.manifest:
        raise UsageError("suite needs --manifest")
    specs = _parse(args.manifest, parse_manifest)
    code, rows = 0, []
    for f in specs:
        try:
            res = run_case_full(f, bound, "search" if args.search else "paper")
            verdict = res.report.verdict
            row = {"case": str(f), "verdict": verdict, "seconds": round(res.seconds, 4),
                   "condition1": [str(v) for v in res.report.condition1]}
            line = f"{f}: {verdict} ({res.seconds:.3f}s)"
        except AspherikaError as exc:
            verdict = FAILED
            row = {"case": str(f), "verdict": verdict, "stage": exc.stage, "error": str(exc)}
            line = f"{f}: {verdict} at {exc.stage}: {exc}"
        code = max(code, EXIT[verdict])
        rows.append(row)
        if not args.json:
            print(line)
    passed = sum(r["verdict"] == ASPHERICAL for r in rows)
    if args.json:
        print(json.dumps({"cases": rows, "passed": passed, "total": len(rows)}, indent=2))
    else:
        print(f"{passed}/{len(rows)} ASPHERICAL")
    return code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aspherika", description="Weight-test certificates for equations over groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, fn in (("check", cmd_check), ("search", cmd_search), ("graph", cmd_graph),
                     ("suite", cmd_suite)):
        sp = sub.add_parser(name)
        sp.set_defaults(fn=fn)
        if name != "suite":
            sp.add_argument("--equation", help="equation file")
            sp.add_argument("--presentation", help="relators over t and x, one per line")
            sp.add_argument("--constraints", help="coefficient facts: a = b, a = 1, a != 1")
            sp.add_argument("--pattern", choices=[k.name for k in PatternKind])
            sp.add_argument("--weights", help="weights file")
            sp.add_argument("--paper-weights", action="store_true",
                            help="use the 0/1 weights attached to the pattern")
            sp.add_argument("--dot", help="write the star graph in DOT format ('-' for stdout)")
        else:
            sp.add_argument("--manifest", help="suite cases, one per line")
            sp.add_argument("--search", action="store_true", help="search weights instead of the fixed ones")
        if name != "graph":
            sp.add_argument("--bound", type=int, help="longest cycle to enumerate "
                            "(default: $ASPHERIKA_BOUND or twice the number of weight classes)")
            sp.add_argument("--json", action="store_true", help="machine-readable report")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except HypothesisViolated as exc:
        print(f"hypothesis violated at occurrence k={exc.occurrence}: {exc}", file=sys.stderr)
    except AspherikaError as exc:
        stage = f" [{exc.stage}]" if exc.stage else ""
        print(f"error{stage}: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return USAGE


if __name__ == "__main__":
    sys.exit(main())
