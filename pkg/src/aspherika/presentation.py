"""Relative presentations, the three window patterns and the x-substitution."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (ConsistencyError, HypothesisViolated, NoMatch, RoundtripShapeError,
                     ShapeViolated)
from .words import (ConstraintStore, Equation, Letter, cyclic_reduce, free_reduce, invert,
                    is_cyclically_reduced, is_rotation, word_str)

T, T_INV, X, X_INV = Letter("t", 1), Letter("t", -1), Letter("x", 1), Letter("x", -1)


@dataclass(frozen=True)
class RelativePresentation:
    generators: tuple
    relators: tuple
    constraints: ConstraintStore = field(compare=False, repr=False, default_factory=ConstraintStore)

    def __post_init__(self):
        for r in self.relators:
            if not r:
                raise ValueError("relators must be nonempty")
            for a in r:
                if a.is_generator and a.name not in self.generators:
                    raise ValueError(f"generator {a.name} is not declared")
            if not is_cyclically_reduced(r, self.constraints):
                raise ValueError(f"relator {word_str(r)} is not cyclically reduced")

    @classmethod
    def from_words(cls, relators: Sequence[Sequence[Letter]], constraints=None):
        c = constraints if constraints is not None else ConstraintStore()
        rels = tuple(cyclic_reduce(r, c) for r in relators)
        gens = tuple(g for g in ("t", "x") if any(a.name == g for r in rels for a in r))
        return cls(gens, rels, c)

    def __str__(self):
        return f"<{', '.join(self.generators)} | {' ; '.join(word_str(r) for r in self.relators)}>"


def from_equation(e: Equation) -> RelativePresentation:
    return RelativePresentation(("t",), (cyclic_reduce(e.word(), e.constraints),), e.constraints)


class PatternKind(enum.Enum):
    """Exponents of the three t-letters of a window ``t^e1 a t^e2 b t^e3``."""

    P1 = (1, -1, 1)
    P2 = (-1, 1, 1)
    P3 = (1, 1, -1)

    @property
    def offset(self) -> int:
        # window index k of a window whose first t-letter is at 1-based position s
        return 3 if self is PatternKind.P1 else 2

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class PatternMatch:
    kind: PatternKind
    occurrences: tuple  # window indices k_1 < ... < k_m
    shared_a: str
    shared_b: str
    tail: bool
    equation: Equation = field(compare=False, repr=False)

    @property
    def m(self) -> int:
        return len(self.occurrences)

    def window_starts(self) -> list[int]:
        """0-based position of the first t-letter of each window."""
        return [k - self.kind.offset - 1 for k in self.occurrences]


def _single_name(block, c: ConstraintStore) -> Optional[str]:
    w = free_reduce(block, c)
    if len(w) == 1 and w[0].exp == 1:
        return w[0].name
    return None


def detect_pattern(e: Equation, kind: PatternKind) -> PatternMatch:
    """Leftmost window, greedily extended by windows spaced three t-letters apart."""
    c = e.constraints
    n, exps = e.n, e.exponents
    pat = kind.value

    def fits(s):
        return s + 3 <= n and tuple(exps[s:s + 3]) == pat

    starts = [s for s in range(n) if fits(s)]
    if not starts:
        raise NoMatch(f"no {kind} window in {e}")
    first = starts[0]
    chain = [first]
    while fits(chain[-1] + 3):
        chain.append(chain[-1] + 3)

    def pair(s):
        return _single_name(e.coefficients[s + 1], c), _single_name(e.coefficients[s + 2], c)

    shared = pair(first)
    if None in shared:
        raise ShapeViolated(f"window at k={first + kind.offset + 1} needs single-symbol coefficients")
    for s in chain[1:]:
        got = pair(s)
        if got != shared:
            k = s + kind.offset + 1
            raise HypothesisViolated(
                f"occurrence k={k} has coefficients ({', '.join(str(g) for g in got)}), "
                f"expected ({shared[0]}, {shared[1]})", k)

    covered = {s + j for s in chain for j in range(3)}
    end = chain[-1] + 3
    tail = kind is PatternKind.P3 and end < n and exps[end] == -1
    if tail:
        covered.add(end)
    for i in range(n):
        if i not in covered and exps[i] != 1:
            raise ShapeViolated(f"t^-1 at position {i + 1} lies outside the {kind} windows")
    ks = tuple(s + kind.offset + 1 for s in chain)
    return PatternMatch(kind, ks, shared[0], shared[1], tail, e)


def _window_word(e: Equation, s: int) -> tuple:
    out = []
    for j in range(3):
        if j:
            out.extend(e.coefficients[s + j])
        out.append(Letter("t", e.exponents[s + j]))
    return tuple(out)


def substitute(p: RelativePresentation, m: PatternMatch) -> RelativePresentation:
    """Replace every window by x and add the relator ``window x^-1``."""
    e, c = m.equation, p.constraints
    if len(p.relators) != 1 or p.generators != ("t",):
        raise ConsistencyError("substitution expects a single-relator presentation on t")
    if not is_rotation(from_equation(e).relators[0], p.relators[0]):
        raise ConsistencyError("pattern match does not belong to this presentation")
    starts = set(m.window_starts())
    rel1 = []
    i = 0
    while i < e.n:
        rel1.extend(e.coefficients[i])
        if i in starts:
            rel1.append(X)
            i += 3
        else:
            rel1.append(Letter("t", e.exponents[i]))
            i += 1
    rel2 = _window_word(e, min(starts)) + (X_INV,)
    return RelativePresentation(("t", "x"), (cyclic_reduce(rel1, c), cyclic_reduce(rel2, c)), c)


def roundtrip_check(original: RelativePresentation, rewritten: RelativePresentation) -> bool:
    """Expand x in the rewritten relator and compare with the original relator."""
    if len(rewritten.relators) != 2:
        raise RoundtripShapeError("expected exactly two relators")
    rel1, rel2 = rewritten.relators
    xs = [i for i, a in enumerate(rel2) if a.name == "x"]
    if len(xs) != 1:
        raise RoundtripShapeError(f"defining relator has {len(xs)} x-letters, expected 1")
    i = xs[0]
    rot = rel2[i + 1:] + rel2[:i]
    # rot * x^e = 1 cyclically, so x = rot^-1 if e = 1 else rot
    definition = rot if rel2[i].exp == -1 else invert(rot)
    expanded = []
    for a in rel1:
        if a.name == "x":
            expanded.extend(definition if a.exp == 1 else invert(definition))
        else:
            expanded.append(a)
    c = rewritten.constraints
    got = cyclic_reduce(expanded, c)
    want = cyclic_reduce(original.relators[0], c)
    return is_rotation(want, got) or is_rotation(want, cyclic_reduce(invert(got), c))
