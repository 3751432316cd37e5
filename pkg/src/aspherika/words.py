"""Words in G * F(t, x) with generic coefficients.

Coefficients are free symbols; the only relations between them are the ones
recorded in a :class:`ConstraintStore` (equalities, ``a = 1`` and ``a != 1``).
A word is a tuple of :class:`Letter`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import ConstraintConflict, EquationShapeError, WordSyntaxError

GENERATORS = ("t", "x")
IDENTITY = "1"
RESERVED = frozenset(GENERATORS) | {IDENTITY}

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_TOKEN = re.compile(r"([A-Za-z][A-Za-z0-9_]*|1)(\^(-?1))?\Z")


@dataclass(frozen=True, order=True)
class Letter:
    name: str
    exp: int = 1

    @property
    def is_generator(self) -> bool:
        return self.name in GENERATORS

    @property
    def is_identity(self) -> bool:
        return self.name == IDENTITY

    @property
    def is_coefficient(self) -> bool:
        return not (self.is_generator or self.is_identity)

    def inverse(self) -> "Letter":
        if self.is_identity:
            return self
        return Letter(self.name, -self.exp)

    def __str__(self) -> str:
        return self.name if self.exp == 1 else f"{self.name}^-1"


Word = tuple  # tuple[Letter, ...]


def letter(token: str) -> Letter:
    return parse_word(token)[0]


def parse_word(text: str, line: int = 1) -> Word:
    """Parse whitespace separated tokens into a word, exactly as written."""
    letters = []
    for m in re.finditer(r"\S+", text):
        tok = m.group(0)
        col = m.start() + 1
        tm = _TOKEN.match(tok)
        if tm is None:
            raise WordSyntaxError(f"malformed token {tok!r}", line, col)
        name, exp = tm.group(1), -1 if tm.group(3) == "-1" else 1
        if name == IDENTITY and exp == -1:
            raise WordSyntaxError("the identity literal takes no exponent", line, col)
        letters.append(Letter(name, exp))
    return tuple(letters)


def word_str(w: Sequence[Letter]) -> str:
    return " ".join(str(a) for a in w) if w else "1"


def invert(w: Sequence[Letter]) -> Word:
    return tuple(a.inverse() for a in reversed(w))


def natural_key(name: str):
    m = re.match(r"(.*?)(\d*)\Z", name)
    head, digits = m.group(1), m.group(2)
    return (head, int(digits) if digits else -1, name)


class ConstraintStore:
    """Union-find over coefficient names plus triviality facts.

    Each class is represented by its naturally-smallest member, so ``a2 = a5``
    normalises ``a5`` to ``a2``.
    """

    def __init__(self):
        self._parent: dict[str, str] = {}
        self._members: dict[str, set[str]] = {}
        self._rep: dict[str, str] = {}
        self._trivial: set[str] = set()  # roots
        self._nontrivial: set[str] = set()  # roots
        self._nontrivial_words: list[Word] = []

    def copy(self) -> "ConstraintStore":
        other = ConstraintStore()
        other._parent = dict(self._parent)
        other._members = {k: set(v) for k, v in self._members.items()}
        other._rep = dict(self._rep)
        other._trivial = set(self._trivial)
        other._nontrivial = set(self._nontrivial)
        other._nontrivial_words = list(self._nontrivial_words)
        return other

    def _check_name(self, name):
        if name in RESERVED or not _NAME.match(name):
            raise ConstraintConflict(f"{name!r} is not a coefficient name")

    def _root(self, name: str) -> str:
        if name not in self._parent:
            self._parent[name] = name
            self._members[name] = {name}
            self._rep[name] = name
            return name
        while self._parent[name] != name:
            self._parent[name] = self._parent[self._parent[name]]
            name = self._parent[name]
        return name

    def find(self, name: str) -> str:
        """Canonical representative of ``name``'s class."""
        if name not in self._parent:
            return name
        return self._rep[self._root(name)]

    def declare_equal(self, a: str, b: str) -> None:
        self._check_name(a)
        self._check_name(b)
        ra, rb = self._root(a), self._root(b)
        if ra == rb:
            return
        triv = ra in self._trivial or rb in self._trivial
        nontriv = ra in self._nontrivial or rb in self._nontrivial
        if triv and nontriv:
            raise ConstraintConflict(f"{a} = {b} merges a trivial and a non-trivial class")
        if len(self._members[ra]) < len(self._members[rb]):
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._members[ra] |= self._members.pop(rb)
        self._rep[ra] = min(self._rep[ra], self._rep.pop(rb), key=natural_key)
        for facts in (self._trivial, self._nontrivial):
            if rb in facts:
                facts.discard(rb)
                facts.add(ra)
        self._check_words()

    def declare_trivial(self, a: str) -> None:
        self._check_name(a)
        r = self._root(a)
        if r in self._nontrivial:
            raise ConstraintConflict(f"{a} is already known to be non-trivial")
        self._trivial.add(r)
        self._check_words()

    def declare_nontrivial(self, a: str) -> None:
        self._check_name(a)
        r = self._root(a)
        if r in self._trivial:
            raise ConstraintConflict(f"{a} is declared trivial")
        self._nontrivial.add(r)

    def declare_nontrivial_word(self, w: Sequence[Letter]) -> None:
        w = free_reduce(w, self)
        if not w:
            raise ConstraintConflict("a trivial word cannot be declared non-trivial")
        if len(w) == 1:
            self.declare_nontrivial(w[0].name)
        elif tuple(w) not in self._nontrivial_words:
            self._nontrivial_words.append(tuple(w))

    def _check_words(self):
        for w in self._nontrivial_words:
            if not free_reduce(w, self):
                raise ConstraintConflict(f"{word_str(w)} was declared non-trivial")

    def is_trivial(self, name: str) -> bool:
        return name in self._parent and self._root(name) in self._trivial

    def is_nontrivial(self, name: str) -> bool:
        return name in self._parent and self._root(name) in self._nontrivial

    def same(self, a: str, b: str) -> bool:
        return self.find(a) == self.find(b)

    def nontrivial_words(self) -> list[Word]:
        return [cyclic_reduce(w, self) for w in self._nontrivial_words]

    def normalize(self, a: Letter) -> Optional[Letter]:
        """Representative letter, or None when the letter is trivial."""
        if a.is_identity:
            return None
        if a.is_generator:
            return a
        if self.is_trivial(a.name):
            return None
        return Letter(self.find(a.name), a.exp)

    def classes(self) -> list[list[str]]:
        roots = {self._root(n) for n in self._parent}
        return sorted(sorted(self._members[r], key=natural_key) for r in roots)

    def directives(self) -> list[str]:
        out = []
        for cls in self.classes():
            rep = cls[0]
            out.extend(f"{rep} = {other}" for other in cls[1:])
            if self.is_trivial(rep):
                out.append(f"{rep} = 1")
            if self.is_nontrivial(rep):
                out.append(f"{rep} != 1")
        return out


def parse_constraints(text: str, store: Optional[ConstraintStore] = None) -> ConstraintStore:
    """Read ``a = b``, ``a = 1`` and ``a != 1`` directives, one per line."""
    store = store if store is not None else ConstraintStore()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"(\S+)\s*(!=|=)\s*(\S+)", line)
        if m is None:
            raise WordSyntaxError(f"cannot read constraint {line!r}", lineno, 1)
        lhs, op, rhs = m.groups()
        for side in (lhs, rhs):
            if side != IDENTITY and (side in GENERATORS or not _NAME.match(side)):
                raise WordSyntaxError(f"{side!r} is not a coefficient name", lineno, 1)
        if lhs == IDENTITY:
            lhs, rhs = rhs, lhs
        if op == "!=":
            if rhs != IDENTITY:
                raise WordSyntaxError("only 'a != 1' is supported", lineno, 1)
            store.declare_nontrivial(lhs)
        elif rhs == IDENTITY:
            store.declare_trivial(lhs)
        else:
            store.declare_equal(lhs, rhs)
    return store


def free_reduce(w: Sequence[Letter], c: Optional[ConstraintStore] = None) -> Word:
    out: list[Letter] = []
    for a in w:
        a = c.normalize(a) if c is not None else (None if a.is_identity else a)
        if a is None:
            continue
        if out and out[-1] == a.inverse():
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def split_conjugate(w: Sequence[Letter], c: Optional[ConstraintStore] = None):
    """Return ``(p, core)`` with ``free_reduce(w) = p core p^-1`` and core cyclically reduced."""
    w = free_reduce(w, c)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == w[j - 1].inverse():
        i += 1
        j -= 1
    return w[:i], w[i:j]


def cyclic_reduce(w: Sequence[Letter], c: Optional[ConstraintStore] = None) -> Word:
    return split_conjugate(w, c)[1]


def is_reduced(w: Sequence[Letter], c: Optional[ConstraintStore] = None) -> bool:
    return free_reduce(w, c) == tuple(c.normalize(a) if c else a for a in w)


def is_cyclically_reduced(w: Sequence[Letter], c: Optional[ConstraintStore] = None) -> bool:
    if not is_reduced(w, c):
        return False
    return len(w) < 2 or free_reduce((w[-1], w[0]), c) != ()


def rotations(w: Sequence) -> list:
    w = tuple(w)
    return [w[i:] + w[:i] for i in range(len(w))] or [w]


def is_rotation(a: Sequence, b: Sequence) -> bool:
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    return any(doubled[i:i + len(b)] == b for i in range(len(a)))


def primitive_root(w: Sequence) -> tuple[tuple, int]:
    """``(r, k)`` with ``w == r * k`` and k maximal."""
    w = tuple(w)
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w[:d] * (n // d) == w:
            return w[:d], n // d
    return w, 1


@dataclass(frozen=True)
class Equation:
    """``g_1 t^e_1 ... g_n t^e_n``; ``coefficients[i]`` precedes ``t^exponents[i]``."""

    coefficients: tuple
    exponents: tuple
    constraints: ConstraintStore = field(compare=False, repr=False, default_factory=ConstraintStore)

    @property
    def n(self) -> int:
        return len(self.exponents)

    def word(self) -> Word:
        out = []
        for block, e in zip(self.coefficients, self.exponents):
            out.extend(block)
            out.append(Letter("t", e))
        return tuple(out)

    def pinches(self) -> list[int]:
        """0-based indices of coefficients sitting between opposite powers of t."""
        n = self.n
        return [(i + 1) % n for i in range(n) if self.exponents[i] + self.exponents[(i + 1) % n] == 0]

    def __str__(self) -> str:
        return word_str(self.word())


def validate_equation(w: Union[str, Sequence[Letter]], c: ConstraintStore) -> Equation:
    """Split ``w`` into coefficient blocks and powers of t and record pinch facts in ``c``.

    A trailing coefficient block is moved to the front (the equation is a cyclic word).
    """
    if isinstance(w, str):
        w = parse_word(w)
    blocks, exps = [], []
    current: list[Letter] = []
    for a in w:
        if a.name == "x":
            raise EquationShapeError("equations are words in t only; found x")
        if a.name == "t":
            blocks.append(tuple(current))
            exps.append(a.exp)
            current = []
        else:
            if a.is_coefficient:
                c._check_name(a.name)
            current.append(a)
    if not exps:
        raise EquationShapeError("an equation needs at least one power of t")
    if current:
        blocks[0] = tuple(current) + blocks[0]
    eq = Equation(tuple(blocks), tuple(exps), c)
    for i in eq.pinches():
        reduced = free_reduce(blocks[i], c)
        if not reduced:
            raise EquationShapeError(
                f"degenerate equation: coefficient {i + 1} ({word_str(blocks[i])}) sits between "
                "opposite powers of t but is trivial (non-degeneracy requires g_i != 1 there)")
        try:
            c.declare_nontrivial_word(reduced)
        except ConstraintConflict as exc:
            raise EquationShapeError(f"non-degeneracy violated at coefficient {i + 1}: {exc}") from exc
    return eq


def exponent_sum(e: Union[Equation, Sequence[Letter]]) -> int:
    if isinstance(e, Equation):
        return sum(e.exponents)
    return sum(a.exp for a in e if a.name == "t")


def is_singular(e: Equation) -> bool:
    return exponent_sum(e) == 0


# -- label classification -----------------------------------------------------

@dataclass(frozen=True)
class FreelyTrivial:
    def __str__(self):
        return "FreelyTrivial"


@dataclass(frozen=True)
class NonAdmissibleTorsionFree:
    base: Word
    power: int

    def __str__(self):
        return f"NonAdmissibleTorsionFree({word_str(self.base)}, {self.power})"


@dataclass(frozen=True)
class Indeterminate:
    required: Word

    def __str__(self):
        return f"Indeterminate({word_str(self.required)})"


LabelStatus = Union[FreelyTrivial, NonAdmissibleTorsionFree, Indeterminate]


def _forced_root(root: Word, c: ConstraintStore) -> bool:
    if len(root) == 1:
        return c.is_nontrivial(root[0].name)
    for f in c.nontrivial_words():
        froot, _ = primitive_root(f)
        if is_rotation(froot, root) or is_rotation(invert(froot), root):
            return True
    return False


def label_status(w: Sequence[Letter], c: ConstraintStore) -> LabelStatus:
    """Decide whether a cycle label can be trivial in a torsion-free G.

    A label conjugate to a positive power of a forced non-trivial element cannot
    be trivial: G has no torsion.
    """
    if any(a.is_generator for a in w):
        raise ValueError("cycle labels contain coefficients only")
    core = cyclic_reduce(w, c)
    if not core:
        return FreelyTrivial()
    root, k = primitive_root(core)
    if _forced_root(root, c):
        return NonAdmissibleTorsionFree(root, k)
    return Indeterminate(core)


def iter_coefficient_names(words: Iterable[Sequence[Letter]]) -> list[str]:
    seen = {}
    for w in words:
        for a in w:
            if a.is_coefficient:
                seen.setdefault(a.name, None)
    return list(seen)
