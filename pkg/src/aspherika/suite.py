"""Equation families with repeated windows, their 0/1 weight functions and case runners.

Coefficients are named ``a1 .. an``; coefficient ``a_j`` precedes the j-th
power of t.  A window of kind P1 occupying window index k covers the t-letters
k-3, k-2, k-1; for P2 and P3 it covers k-2, k-1, k.  Consecutive windows are
three t-letters apart, so exactly one coefficient separates them.
"""
from __future__ import annotations

import re
import time
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import AspherikaError, FamilyShapeError, WordSyntaxError
from .presentation import (PatternKind, PatternMatch, RelativePresentation, T, T_INV, X, X_INV,
                           detect_pattern, from_equation, roundtrip_check, substitute)
from .stargraph import StarGraph, build_star_graph, resolve_class
from .weights import AsphericityReport, check_asphericity, search
from .words import ConstraintStore, Equation, parse_constraints, validate_equation

STAGES = ("generate", "validate", "detect", "substitute", "roundtrip", "graph", "weights", "check")


@dataclass(frozen=True)
class FamilySpec:
    kind: PatternKind
    n: int
    occurrences: tuple
    naming: str = "shared"  # or "distinct": fresh names plus explicit equalities
    prefix: str = "a"

    def __post_init__(self):
        ks = tuple(self.occurrences)
        object.__setattr__(self, "occurrences", ks)
        if self.naming not in ("shared", "distinct"):
            raise FamilyShapeError(f"unknown naming {self.naming!r}")
        if not ks:
            raise FamilyShapeError("at least one occurrence is required")
        if any(b - a != 3 for a, b in zip(ks, ks[1:])):
            raise FamilyShapeError(f"occurrences {ks} must be spaced exactly 3 apart")
        lo, hi = legal_range(self.kind, self.n, len(ks))
        if not lo <= ks[0] <= hi:
            raise FamilyShapeError(
                f"{self.kind} with n={self.n}, m={len(ks)} needs k_1 in [{lo}, {hi}], got {ks[0]}")

    @property
    def m(self) -> int:
        return len(self.occurrences)

    def __str__(self):
        text = f"{self.kind} n={self.n} k={','.join(map(str, self.occurrences))}"
        return text if self.naming == "shared" else f"{text} naming={self.naming}"


def legal_range(kind: PatternKind, n: int, m: int) -> tuple[int, int]:
    """Inclusive range of k_1 leaving room for the prefix and suffix each family displays."""
    span = 3 * (m - 1)
    if kind is PatternKind.P1:
        return 4, n - span          # a_{k1-3} exists; a_{km} is followed by t
    if kind is PatternKind.P2:
        return 3, n - span - 1      # a_{k1-2} exists; a_{km+1} t follows
    return 3, n - span - 2          # a_{km+1} t^-1 a_{km+2} t follows


def grid(ns=range(8, 17), ms=range(1, 5), kinds=tuple(PatternKind)) -> Iterator[FamilySpec]:
    for kind in kinds:
        for n in ns:
            for m in ms:
                lo, hi = legal_range(kind, n, m)
                for k1 in range(lo, hi + 1):
                    yield FamilySpec(kind, n, tuple(k1 + 3 * i for i in range(m)))


def parse_manifest(text: str) -> list[FamilySpec]:
    """Lines such as ``P2 n=13 k=4,7,10``; ``#`` starts a comment."""
    specs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"(P[123])\s+n=(\d+)\s+k=(\d+(?:,\d+)*)(?:\s+naming=(shared|distinct))?", line)
        if m is None:
            raise WordSyntaxError(f"cannot read suite case {line!r}", lineno, 1)
        ks = tuple(int(k) for k in m.group(3).split(","))
        specs.append(FamilySpec(PatternKind[m.group(1)], int(m.group(2)), ks, m.group(4) or "shared"))
    return specs


def _window_positions(f: FamilySpec) -> list[int]:
    """1-based positions of the first t-letter of each window."""
    return [k - f.kind.offset for k in f.occurrences]


def generate_text(f: FamilySpec) -> tuple[str, list[str]]:
    """Equation text and the equality directives expressing the hypotheses."""
    name = [None] + [f"{f.prefix}{j}" for j in range(1, f.n + 1)]
    exps = [None] + [1] * f.n
    starts = _window_positions(f)
    for s in starts:
        exps[s:s + 3] = f.kind.value
    if f.kind is PatternKind.P3:
        exps[starts[-1] + 3] = -1
    shared_a, shared_b = name[starts[0] + 1], name[starts[0] + 2]
    equalities = []
    for s in starts[1:]:
        if f.naming == "shared":
            name[s + 1], name[s + 2] = shared_a, shared_b
        else:
            equalities += [f"{name[s + 1]} = {shared_a}", f"{name[s + 2]} = {shared_b}"]
    tokens = []
    for j in range(1, f.n + 1):
        tokens += [name[j], "t" if exps[j] == 1 else "t^-1"]
    return " ".join(tokens), equalities


def generate(f: FamilySpec) -> tuple[Equation, ConstraintStore]:
    text, equalities = generate_text(f)
    store = parse_constraints("\n".join(equalities))
    return validate_equation(text, store), store


def _coefficient(e: Equation, j: int) -> tuple:
    """The coefficient a_j (1-based, cyclic) as a normalised word."""
    block = e.coefficients[(j - 1) % e.n]
    return tuple(e.constraints.normalize(a) for a in block if e.constraints.normalize(a))


def fixed_zero_classes(match: PatternMatch, g: StarGraph) -> list[int]:
    """Classes the 0/1 weight function for the matching pattern sets to zero."""
    e, ks = match.equation, match.occurrences
    k1, km = ks[0], ks[-1]
    kind = match.kind
    if kind is PatternKind.P1:
        labels, corner = [k1 - 1, k1 - 2, k1 - 3, km], None
    elif kind is PatternKind.P2:
        labels, corner = [k1 - 1, k1 - 2, km + 1], (X, T_INV)
    else:
        if not match.tail:
            raise FamilyShapeError("the P3 weight function needs the trailing t^-1")
        labels, corner = [k1, k1 - 2, km + 2], (T, X_INV)
    zeros = [resolve_class(g, label=_coefficient(e, j)) for j in labels]
    if corner is not None:
        zeros.append(resolve_class(g, label=(), source=corner[0], target=corner[1]))
    if len(set(zeros)) != len(zeros):
        raise FamilyShapeError("two named weights resolve to the same class")
    return zeros


def paper_weights(f, p: RelativePresentation, g: StarGraph) -> dict:
    """0 on the classes named for the pattern, 1 elsewhere.

    ``f`` is a FamilySpec or a PatternMatch.
    """
    if isinstance(f, FamilySpec):
        eq, _ = generate(f)
        match = detect_pattern(eq, f.kind)
    else:
        match = f
    zeros = set(fixed_zero_classes(match, g))
    return {cls: (0 if cls in zeros else 1) for cls in range(g.class_count)}


@dataclass
class CaseResult:
    spec: Optional[FamilySpec]
    equation: Equation
    match: PatternMatch
    original: RelativePresentation
    presentation: RelativePresentation
    graph: StarGraph
    weights: dict
    report: AsphericityReport
    roundtrip: bool
    seconds: float


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except AspherikaError as exc:
        exc.stage = name
        raise


def prepare(equation_text: str, store: ConstraintStore, kind: PatternKind):
    """validate -> detect -> substitute -> roundtrip; returns (equation, match, original, rewritten)."""
    eq = _stage("validate", validate_equation, equation_text, store)
    match = _stage("detect", detect_pattern, eq, kind)
    original = from_equation(eq)
    pres = _stage("substitute", substitute, original, match)
    if not _stage("roundtrip", roundtrip_check, original, pres):
        err = AspherikaError("substitution does not expand back to the original relator")
        err.stage = "roundtrip"
        raise err
    return eq, match, original, pres


def run_pipeline(equation_text: str, store: ConstraintStore, kind: PatternKind,
                 bound: Optional[int] = None, weights="paper", spec=None) -> CaseResult:
    """validate -> detect -> substitute -> roundtrip -> graph -> weights -> check.

    ``weights`` is ``"paper"``, ``"search"`` or an explicit class -> weight mapping.
    """
    start = time.perf_counter()
    eq, match, original, pres = prepare(equation_text, store, kind)
    ok = True
    graph = _stage("graph", build_star_graph, pres)
    if weights == "paper":
        w = _stage("weights", paper_weights, match, pres, graph)
    elif weights == "search":
        outcome = _stage("weights", search, pres, graph, store, bound)
        w = outcome.weights or {}
    else:
        w = dict(weights)
    if not w and weights == "search":
        report = AsphericityReport("FAILED", [], [], bound=bound or 0)
    else:
        report = _stage("check", check_asphericity, pres, graph, w, store, bound)
    return CaseResult(spec, eq, match, original, pres, graph, w, report, ok,
                      time.perf_counter() - start)


def run_case(f: FamilySpec, bound: Optional[int] = None, weights="paper") -> AsphericityReport:
    return run_case_full(f, bound, weights).report


def run_case_full(f: FamilySpec, bound: Optional[int] = None, weights="paper") -> CaseResult:
    text, equalities = _stage("generate", generate_text, f)
    store = _stage("generate", parse_constraints, "\n".join(equalities))
    return run_pipeline(text, store, f.kind, bound, weights, spec=f)


def worked_instance(kind: PatternKind, prefix="g") -> FamilySpec:
    """The worked instances: P1 n=8 i=4, P2 n=13 i=4 (m=3), P3 n=10 i=3."""
    if kind is PatternKind.P1:
        return FamilySpec(kind, 8, (4, 7), prefix=prefix)
    if kind is PatternKind.P2:
        return FamilySpec(kind, 13, (4, 7, 10), prefix=prefix)
    return FamilySpec(kind, 10, (3, 6), prefix=prefix)

