"""Weight test: the three asphericity conditions, short-cycle enumeration and weight search.

Cycles are closed paths in the star graph that never use an edge immediately
followed by its pair (including across the wrap).  Weights are Fractions.
"""
from __future__ import annotations

import json
import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

import networkx as nx

from . import lp
from .errors import MissingWeightError, SearchExhausted
from .presentation import RelativePresentation
from .stargraph import StarGraph
from .words import (ConstraintStore, FreelyTrivial, Indeterminate, NonAdmissibleTorsionFree,
                    cyclic_reduce, free_reduce, invert, label_status, primitive_root,
                    split_conjugate, word_str)

log = logging.getLogger(__name__)

TWO = Fraction(2)
ASPHERICAL, FAILED, INDETERMINATE = "ASPHERICAL", "FAILED", "INDETERMINATE"


def default_bound(g: StarGraph) -> int:
    env = os.environ.get("ASPHERIKA_BOUND")
    if env:
        return int(env)
    return max(1, 2 * g.class_count)


def uniform_weights(g: StarGraph, value) -> dict:
    return {cls: Fraction(value) for cls in range(g.class_count)}


def _weight_of(g: StarGraph, w: Mapping[int, Fraction]) -> list[Fraction]:
    missing = [cls for cls in range(g.class_count) if cls not in w]
    if missing:
        raise MissingWeightError(f"no weight for classes {missing}")
    return [Fraction(w[e.weight_class]) for e in g.edges]


# -- conditions 1 and 3 ---------------------------------------------------------

def check_condition1(p: RelativePresentation, g: StarGraph, w: Mapping[int, Fraction]) -> list[Fraction]:
    """Per relator, the sum of ``1 - weight`` over its corners; each must be >= 2."""
    _weight_of(g, w)
    return [sum((1 - Fraction(w[cls]) for cls in g.classes_of_relator(r)), Fraction(0))
            for r in range(len(p.relators))]


def check_condition3(w: Mapping[int, Fraction]) -> list[int]:
    return sorted(cls for cls, v in w.items() if v < 0)


@dataclass(frozen=True)
class ZeroSubgraph:
    edges: tuple
    components: tuple


def zero_subgraph(g: StarGraph, w: Mapping[int, Fraction]) -> ZeroSubgraph:
    wt = _weight_of(g, w)
    edges = tuple(e.id for e in g.edges if wt[e.id] == 0)
    dg = nx.MultiDiGraph()
    dg.add_nodes_from(g.vertices)
    for eid in edges:
        e = g.edges[eid]
        dg.add_edge(e.source, e.target, key=eid)
    comps = sorted((frozenset(cc) for cc in nx.strongly_connected_components(dg)),
                   key=lambda cc: sorted(cc))
    return ZeroSubgraph(edges, tuple(comps))


# -- cycles -------------------------------------------------------------------

@dataclass(frozen=True)
class CycleFinding:
    edge_path: tuple
    weight: Fraction
    label: tuple
    status: object
    pumped: Optional[tuple] = None  # (insertion position, zero-cycle id) for families
    note: str = ""
    parts: Optional[tuple] = None  # (head, cycle, tail): member k is head + cycle * k + tail

    @property
    def is_family(self) -> bool:
        return self.pumped is not None

    def member(self, k: int) -> tuple:
        if self.parts is None:
            raise ValueError("not a pumped family")
        head, cyc, tail = self.parts
        return head + cyc * k + tail


def path_label(g: StarGraph, path) -> tuple:
    out = []
    for eid in path:
        out.extend(g.edges[eid].label)
    return tuple(out)


def is_reduced_path(path) -> bool:
    return all(b != a ^ 1 for a, b in zip(path, path[1:]))


def is_cyclically_reduced_path(path) -> bool:
    return bool(path) and is_reduced_path(path) and path[0] != path[-1] ^ 1


def canonical_rotation(path) -> tuple:
    path = tuple(path)
    return min(path[i:] + path[:i] for i in range(len(path)))


def _scaled(wt) -> tuple[list[int], int]:
    """Integer weights and the matching threshold for 'weight < 2'."""
    den = 1
    for v in wt:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return [int(v * den) for v in wt], 2 * den


class _Truncated(Exception):
    pass


def _closed_walks(g: StarGraph, wt, bound: int, allowed=None, simple=False, cap=None):
    """Cyclically reduced closed walks of weight < 2, one per rotation class.

    Walks are grown from their smallest edge id, so only edges with a larger or
    equal id are explored.  ``simple`` forbids repeated vertices.  A prefix is
    abandoned once no path back to its start fits in the remaining budget.
    """
    iw, limit = _scaled(wt)
    out_edges = {}
    for e in g.edges:
        if allowed is None or e.id in allowed:
            out_edges.setdefault(e.source, []).append(e)
    inf = float("inf")
    dist = {u: {v: (0 if u == v else inf) for v in g.vertices} for u in g.vertices}
    for es in out_edges.values():
        for e in es:
            dist[e.source][e.target] = min(dist[e.source][e.target], iw[e.id])
    for k in g.vertices:
        for i in g.vertices:
            for j in g.vertices:
                if dist[i][k] + dist[k][j] < dist[i][j]:
                    dist[i][j] = dist[i][k] + dist[k][j]
    found = []
    path = []
    visits = [0]

    def grow(last, total, start_id, start_vertex, seen):
        visits[0] += 1
        if cap is not None and visits[0] > cap:
            raise _Truncated(found)
        if last.target == start_vertex and path[0] != last.id ^ 1:
            t = tuple(path)
            if t.count(start_id) == 1 or t == canonical_rotation(t):
                found.append(t)
        if (simple and last.target == start_vertex) or len(path) >= bound:
            return
        for f in out_edges.get(last.target, ()):
            if f.id < start_id or f.id == last.id ^ 1:
                continue
            nt = total + iw[f.id]
            if nt + dist[f.target][start_vertex] >= limit:
                continue
            fresh = f.target not in seen
            if simple and not fresh and f.target != start_vertex:
                continue
            path.append(f.id)
            if fresh:
                seen.add(f.target)
            grow(f, nt, start_id, start_vertex, seen)
            if fresh:
                seen.discard(f.target)
            path.pop()

    for e in g.edges:
        if allowed is not None and e.id not in allowed:
            continue
        if iw[e.id] + dist[e.target][e.source] >= limit:
            continue
        path.append(e.id)
        grow(e, iw[e.id], e.id, e.source, {e.source, e.target})
        path.pop()
    return found


def power_family_status(base, tail, c: ConstraintStore):
    """Status shared by all labels ``base^k tail`` (k >= 1) in a torsion-free group."""
    p, core = split_conjugate(base, c)
    if not core:
        return label_status(tail, c)
    rest = free_reduce(invert(p) + tuple(tail) + p, c)
    root, a = primitive_root(core)
    b = _power_of(rest, root)
    if b is None:
        # freely non-trivial for every k, but nothing forces it in G
        return Indeterminate(cyclic_reduce(core + rest, c))
    if b < 0 and (-b) % a == 0:
        return FreelyTrivial()
    st = label_status(root, c)
    if isinstance(st, NonAdmissibleTorsionFree):
        return NonAdmissibleTorsionFree(st.base, st.power * abs(a + b))
    return Indeterminate(st.required if isinstance(st, Indeterminate) else root)


def _power_of(w, root) -> Optional[int]:
    if not w:
        return 0
    n, m = len(w), len(root)
    if n % m:
        return None
    j = n // m
    if tuple(w) == tuple(root) * j:
        return j
    if tuple(w) == invert(root) * j:
        return -j
    return None


def _max_relator_corners(g: StarGraph) -> int:
    counts = Counter(e.relator for e in g.edges if not e.inverse)
    return max(counts.values(), default=0)


def zero_cycles(g: StarGraph, w: Mapping[int, Fraction]) -> list[tuple]:
    """Simple cyclically reduced cycles made of weight-0 edges, canonically ordered."""
    wt = _weight_of(g, w)
    zero = {e.id for e in g.edges if wt[e.id] == 0}
    cycles = _closed_walks(g, wt, len(g.vertices), allowed=zero, simple=True)
    return sorted(set(canonical_rotation(cy) for cy in cycles))


def _simple_paths(g: StarGraph, zero: set, src, dst):
    """Simple zero-weight paths from src to dst (the empty path when src == dst)."""
    out_edges = {}
    for eid in sorted(zero):
        e = g.edges[eid]
        out_edges.setdefault(e.source, []).append(e)
    paths = []

    def walk(v, path, seen):
        if v == dst:
            paths.append(tuple(path))
            return
        for e in out_edges.get(v, ()):
            if e.target in seen:
                continue
            path.append(e.id)
            seen.add(e.target)
            walk(e.target, path, seen)
            seen.discard(e.target)
            path.pop()

    walk(src, [], {src})
    return paths


def _returns(g: StarGraph, zero: set, cycles: list[tuple]) -> dict:
    """For each vertex v: zero-weight closed walks ``p C^k p^-1`` based at v."""
    result = {v: [] for v in g.vertices}
    for cid, cyc in enumerate(cycles):
        for i in range(len(cyc)):
            rot = cyc[i:] + cyc[:i]
            u = g.edges[rot[0]].source
            for v in g.vertices:
                for p in _simple_paths(g, zero, v, u):
                    back = tuple(e ^ 1 for e in reversed(p))
                    once = p + rot + back
                    if is_reduced_path(once) and is_reduced_path(p + rot + rot + back):
                        result[v].append((cid, p, rot, back))
    return result


SATURATED_BOUND = 6
MAX_WALK_VISITS = 500_000


def zero_cycle_rank(g: StarGraph, w: Mapping[int, Fraction]) -> int:
    """Largest cycle rank (edges - vertices + 1) over components of the zero-weight classes."""
    wt = _weight_of(g, w)
    ug = nx.MultiGraph()
    for cls in range(g.class_count):
        if wt[2 * cls] == 0:
            e = g.class_edge(cls)
            ug.add_edge(e.source, e.target, key=cls)
    return max((ug.subgraph(cc).number_of_edges() - len(cc) + 1
                for cc in nx.connected_components(ug)), default=0)


def _commutator_witness(g: StarGraph, zero: set, cycles: list[tuple]):
    """A reduced closed walk ``C1 p C2 p^-1 C1^-1 p C2^-1 p^-1`` from two independent zero cycles."""
    def inv(path):
        return tuple(e ^ 1 for e in reversed(path))

    classes = [canonical_rotation(cy) for cy in cycles]
    for i, c1 in enumerate(cycles):
        for c2 in cycles[i + 1:]:
            if canonical_rotation(inv(c2)) == classes[i]:
                continue
            for r1 in rotations_of(c1):
                v = g.edges[r1[0]].source
                for r2 in rotations_of(c2):
                    u = g.edges[r2[0]].source
                    for p in _simple_paths(g, zero, v, u):
                        walk = r1 + p + r2 + inv(p) + inv(r1) + p + inv(r2) + inv(p)
                        if is_cyclically_reduced_path(walk):
                            return walk
    return None


def rotations_of(path):
    return [path[i:] + path[:i] for i in range(len(path))]


def enumerate_short_cycles(g: StarGraph, w: Mapping[int, Fraction], c: ConstraintStore,
                           bound: int, families: bool = True) -> list[CycleFinding]:
    """All reduced closed paths of weight < 2 and length <= bound, plus pumped families.

    Concrete findings come first (pumped is None), ordered by length then edge
    path; then pure powers of zero-weight cycles; then skeletons with a
    zero-weight cycle inserted at one vertex, with the power left symbolic.
    """
    return _enumerate(g, w, c, bound, families)[0]


def _enumerate(g, w, c, bound, families=True):
    if bound < 1:
        raise ValueError("bound must be >= 1")
    warnings = []
    longest = _max_relator_corners(g)
    if bound < longest:
        msg = f"enumeration bound {bound} is below the longest relator ({longest} corners)"
        log.warning(msg)
        warnings.append(msg)
    wt = _weight_of(g, w)
    zero = {e.id for e in g.edges if wt[e.id] == 0}
    cycles = zero_cycles(g, w)
    saturated = zero_cycle_rank(g, w) >= 2
    concrete_bound = bound
    if saturated:
        concrete_bound = min(bound, SATURATED_BOUND)
        warnings.append("zero-weight subgraph has cycle rank >= 2; concrete enumeration "
                        f"limited to length {concrete_bound}")
    try:
        raw = _closed_walks(g, wt, concrete_bound, cap=MAX_WALK_VISITS)
    except _Truncated as exc:
        raw = exc.args[0]
        warnings.append(f"enumeration stopped after {MAX_WALK_VISITS} search steps")
    walks = sorted(set(raw), key=lambda t: (len(t), t))
    findings = []
    for path in walks:
        label = path_label(g, path)
        findings.append(CycleFinding(path, sum((wt[e] for e in path), Fraction(0)), label,
                                     label_status(label, c)))
    if not families:
        return findings, warnings

    for cid, cyc in enumerate(cycles):
        label = path_label(g, cyc)
        findings.append(CycleFinding(cyc, Fraction(0), label, power_family_status(label, (), c),
                                     pumped=(0, cid), note="zero-weight cycle pumped k >= 1 times",
                                     parts=((), cyc, ())))
    if saturated:
        walk = _commutator_witness(g, zero, cycles)
        if walk is not None:
            label = path_label(g, walk)
            findings.append(CycleFinding(walk, Fraction(0), label, label_status(label, c),
                                         note="commutator of two zero-weight cycles"))
        return findings, warnings
    if not cycles:
        return findings, warnings

    returns = _returns(g, zero, cycles)
    seen = set()
    for f in list(findings):
        # weight-0 skeletons are powers of the pure families when the rank is <= 1
        if f.is_family or f.weight == 0 or primitive_root(f.edge_path)[1] != 1:
            continue
        path = f.edge_path
        for i in range(len(path)):
            skel = path[i:] + path[:i]
            v = g.edges[skel[0]].source
            for cid, p, rot, back in returns[v]:
                once = skel + p + rot + back
                twice = skel + p + rot + rot + back
                if not (is_cyclically_reduced_path(once) and is_cyclically_reduced_path(twice)):
                    continue
                key = (canonical_rotation(once), canonical_rotation(twice))
                if key in seen:
                    continue
                seen.add(key)
                base = path_label(g, p) + path_label(g, rot) + invert(path_label(g, p))
                status = power_family_status(base, path_label(g, skel), c)
                findings.append(CycleFinding(once, f.weight, path_label(g, once), status,
                                             pumped=(i, cid),
                                             note="skeleton with zero-weight cycle inserted k >= 1 times",
                                             parts=(skel + p, rot, back)))
    return findings, warnings


# -- verdict ------------------------------------------------------------------

@dataclass
class AsphericityReport:
    verdict: str
    condition1: list
    violations: list
    cycles: list = field(default_factory=list)
    required_conditions: list = field(default_factory=list)
    bound: int = 0
    weights: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def condition1_ok(self) -> bool:
        return all(v >= 2 for v in self.condition1)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "condition1": [_q(v) for v in self.condition1],
            "violations": self.violations,
            "cycles": [{
                "edges": list(f.edge_path),
                "weight": _q(f.weight),
                "label": word_str(f.label),
                "status": str(f.status),
                "pumped": f.is_family,
            } for f in self.cycles],
            "requiredConditions": [word_str(r) for r in self.required_conditions],
            "enumerationBound": self.bound,
            "reducedCycleConvention": True,
            "weights": {str(k): _q(v) for k, v in sorted(self.weights.items())},
            "warnings": self.warnings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _q(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def _required_key(wd):
    wd, inv = tuple(wd), invert(wd)
    return min(min(wd[i:] + wd[:i], inv[i:] + inv[:i]) for i in range(len(wd)))


def check_asphericity(p: RelativePresentation, g: StarGraph, w: Mapping[int, Fraction],
                      c: ConstraintStore, bound: Optional[int] = None) -> AsphericityReport:
    bound = bound if bound is not None else default_bound(g)
    w = {k: Fraction(v) for k, v in w.items()}
    cond1 = check_condition1(p, g, w)
    violations = check_condition3(w)
    report = AsphericityReport(FAILED, cond1, violations, bound=bound, weights=w)
    if violations:
        return report
    report.cycles, notes = _enumerate(g, w, c, bound)
    report.warnings.extend(notes)
    truncated = any("stopped" in n for n in notes)
    required = {}
    for f in report.cycles:
        if isinstance(f.status, Indeterminate):
            required.setdefault(_required_key(f.status.required), f.status.required)
    report.required_conditions = [required[k] for k in sorted(required)]
    if not report.condition1_ok or any(isinstance(f.status, FreelyTrivial) for f in report.cycles):
        report.verdict = FAILED
    elif required or truncated:
        report.verdict = INDETERMINATE
    else:
        report.verdict = ASPHERICAL
    return report


# -- search -------------------------------------------------------------------

@dataclass
class SearchOutcome:
    status: str  # "found", "infeasible" or "exhausted"
    weights: Optional[dict]
    iterations: int
    cuts: int
    report: Optional[AsphericityReport] = None


def search(p: RelativePresentation, g: StarGraph, c: ConstraintStore, bound: Optional[int] = None,
           max_iterations: int = 100) -> SearchOutcome:
    """Cutting-plane search over rational weights in [0, 1].

    Start from conditions 1 and 3, maximise the total weight, and add
    ``sum(weights along cycle) >= 2`` for every short cycle whose label is not
    provably non-trivial, until none is left.
    """
    bound = bound if bound is not None else default_bound(g)
    nvar = g.class_count
    base = []
    for r in range(len(p.relators)):
        row = [0] * nvar
        classes = g.classes_of_relator(r)
        for cls in classes:
            row[cls] += 1
        base.append((row, lp.LE, len(classes) - 2))
    for cls in range(nvar):
        row = [0] * nvar
        row[cls] = 1
        base.append((row, lp.LE, 1))
    cuts: dict[tuple, None] = {}
    for it in range(1, max_iterations + 1):
        sol = lp.maximize([1] * nvar, base + [(list(cut), lp.GE, 2) for cut in cuts])
        if sol is None:
            return SearchOutcome("infeasible", None, it, len(cuts))
        w = dict(enumerate(sol))
        report = check_asphericity(p, g, w, c, bound)
        if report.verdict == ASPHERICAL:
            return SearchOutcome("found", w, it, len(cuts), report)
        bad = [f for f in report.cycles if not isinstance(f.status, NonAdmissibleTorsionFree)]
        added = 0
        for f in sorted(bad, key=lambda f: (f.weight, len(f.edge_path))):
            row = [0] * nvar
            for eid in f.edge_path:
                row[eid >> 1] += 1
            key = tuple(row)
            if key not in cuts:
                cuts[key] = None
                added += 1
            if added >= 50:
                break
        if not added:
            # only truncation stands in the way: no cut can help
            return SearchOutcome("infeasible" if bad else "exhausted", None, it, len(cuts), report)
    return SearchOutcome("exhausted", None, max_iterations, len(cuts))


def search_weights(p: RelativePresentation, g: StarGraph, c: ConstraintStore,
                   bound: Optional[int] = None, max_iterations: int = 100) -> Optional[dict]:
    outcome = search(p, g, c, bound, max_iterations)
    if outcome.status == "exhausted":
        raise SearchExhausted(max_iterations)
    return outcome.weights
