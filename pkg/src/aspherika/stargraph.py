"""Star graph of a relative presentation.

Every gap of a relator (the coefficient block ``g`` between two cyclically
consecutive generator letters ``y g z``) yields the edge ``y^-1 -> z`` with
label ``g``; the same gap read in the inverse relator yields the paired edge
``z -> y^-1`` with label ``g^-1``.  Edge ``2i`` and ``2i + 1`` form weight
class ``i``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import ClassResolutionError
from .presentation import RelativePresentation
from .words import Letter, invert, word_str


@dataclass(frozen=True)
class StarEdge:
    id: int
    source: Letter
    target: Letter
    label: tuple
    relator: int
    position: int
    inverse: bool

    @property
    def pair(self) -> int:
        return self.id ^ 1

    @property
    def weight_class(self) -> int:
        return self.id >> 1

    def __str__(self):
        return f"{self.source} -> {self.target} [{word_str(self.label)}]"


@dataclass(frozen=True)
class StarGraph:
    vertices: tuple
    edges: tuple

    @property
    def class_count(self) -> int:
        return len(self.edges) // 2

    def weight_classes(self) -> list[tuple[int, int]]:
        return [(2 * i, 2 * i + 1) for i in range(self.class_count)]

    def class_edge(self, cls: int) -> StarEdge:
        """The forward edge representing a class."""
        return self.edges[2 * cls]

    def self_paired(self, cls: int) -> bool:
        a, b = self.edges[2 * cls], self.edges[2 * cls + 1]
        return (a.source, a.target, a.label) == (b.source, b.target, b.label)

    def out_edges(self) -> dict:
        out = defaultdict(list)
        for e in self.edges:
            out[e.source].append(e)
        return out

    def classes_of_relator(self, r: int) -> list[int]:
        return [e.weight_class for e in self.edges if e.relator == r and not e.inverse]


def vertex_name(v: Letter) -> str:
    return v.name if v.exp == 1 else f"{v.name}_inv"


def build_star_graph(p: RelativePresentation) -> StarGraph:
    edges = []
    for ri, r in enumerate(p.relators):
        if not r:
            raise ValueError("empty relator")
        gens = [i for i, a in enumerate(r) if a.is_generator]
        if not gens:
            raise ValueError(f"relator {word_str(r)} has no generator letter")
        for j, pos in enumerate(gens):
            prev = gens[j - 1]
            if prev < pos:
                label = r[prev + 1:pos]
            else:
                label = r[prev + 1:] + r[:pos]
            y, z = r[prev], r[pos]
            eid = len(edges)
            edges.append(StarEdge(eid, y.inverse(), z, tuple(label), ri, pos, False))
            edges.append(StarEdge(eid + 1, z, y.inverse(), invert(label), ri, pos, True))
    vertices = tuple(Letter(g, e) for g in p.generators for e in (1, -1))
    return StarGraph(vertices, tuple(edges))


def resolve_class(g: StarGraph, label=None, source: Optional[Letter] = None,
                  target: Optional[Letter] = None) -> int:
    """Find the unique class matching a label and/or endpoints (either direction)."""
    hits = set()
    for e in g.edges:
        if label is not None and tuple(e.label) != tuple(label):
            continue
        if source is not None and e.source != source:
            continue
        if target is not None and e.target != target:
            continue
        hits.add(e.weight_class)
    what = " ".join(filter(None, [
        f"{source} -> {target}" if source is not None else "",
        f"label {word_str(label)}" if label is not None else ""]))
    if len(hits) != 1:
        raise ClassResolutionError(f"{what} matches {len(hits)} weight classes")
    return hits.pop()


def _fmt(q) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def to_dot(g: StarGraph, weights: Optional[Mapping[int, object]] = None) -> str:
    lines = ["digraph star {"]
    for v in g.vertices:
        lines.append(f'  {vertex_name(v)} [label="{v}"];')
    for cls in range(g.class_count):
        e = g.class_edge(cls)
        text = word_str(e.label)
        if weights is not None and cls in weights:
            text += f" / w={_fmt(weights[cls])}"
        extra = ", style=dashed, comment=\"self-paired\"" if g.self_paired(cls) else ""
        lines.append(f'  {vertex_name(e.source)} -> {vertex_name(e.target)} [label="{text}"{extra}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
