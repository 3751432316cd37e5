import pytest
from hypothesis import given, strategies as st

from aspherika.errors import ConstraintConflict, EquationShapeError, WordSyntaxError
from aspherika.words import (ConstraintStore, FreelyTrivial, Indeterminate, Letter,
                             NonAdmissibleTorsionFree, cyclic_reduce, exponent_sum, free_reduce,
                             invert, is_cyclically_reduced, is_reduced, is_rotation, is_singular,
                             label_status, parse_constraints, parse_word, primitive_root,
                             validate_equation, word_str)

W = parse_word
P1_EQ = "g1 t g2 t^-1 g3 t g4 t g5 t^-1 g6 t g7 t g8 t"


# -- parsing -------------------------------------------------------------------

def test_parse_word_transcribes_tokens():
    assert W("g1 t g2 t^-1") == (Letter("g1", 1), Letter("t", 1), Letter("g2", 1), Letter("t", -1))
    assert W("a^-1 t t") == (Letter("a", -1), Letter("t", 1), Letter("t", 1))
    assert W("1 t") == (Letter("1", 1), Letter("t", 1))
    assert W("") == ()


@pytest.mark.parametrize("text,column", [("a t^2", 3), ("a b^x", 3), ("1^-1", 1), ("t -a", 3)])
def test_parse_word_reports_column(text, column):
    with pytest.raises(WordSyntaxError) as err:
        W(text)
    assert err.value.column == column


def test_word_str_roundtrip():
    for text in ["g1 t g2 t^-1", "x^-1 a t", "1"]:
        assert word_str(W(text)) == text
    assert word_str(()) == "1"


# -- constraints ----------------------------------------------------------------

def test_store_uses_smallest_name_as_representative():
    c = ConstraintStore()
    c.declare_equal("a10", "a5")
    c.declare_equal("a5", "a2")
    assert c.find("a10") == "a2"
    assert c.classes() == [["a2", "a5", "a10"]]


def test_store_facts_follow_merges():
    c = ConstraintStore()
    c.declare_nontrivial("b")
    c.declare_equal("a", "b")
    assert c.is_nontrivial("a")
    c.declare_trivial("z")
    with pytest.raises(ConstraintConflict):
        c.declare_equal("z", "a")
    with pytest.raises(ConstraintConflict):
        c.declare_nontrivial("z")


def test_store_rejects_reserved_names():
    c = ConstraintStore()
    for bad in ("t", "x", "1"):
        with pytest.raises(ConstraintConflict):
            c.declare_nontrivial(bad)


def test_parse_constraints_directives():
    c = parse_constraints("a = b  # shared\nc = 1\n\nd != 1\n1 = e\n")
    assert c.same("a", "b")
    assert c.is_trivial("c") and c.is_trivial("e")
    assert c.is_nontrivial("d")
    assert c.directives() == ["a = b", "c = 1", "d != 1", "e = 1"]


def test_parse_constraints_reports_line():
    with pytest.raises(WordSyntaxError) as err:
        parse_constraints("a = b\na b c\n")
    assert err.value.line == 2
    with pytest.raises(WordSyntaxError):
        parse_constraints("a != b")


def test_nontrivial_word_conflict():
    c = ConstraintStore()
    c.declare_nontrivial_word(W("a b^-1"))
    with pytest.raises(ConstraintConflict):
        c.declare_equal("a", "b")


# -- reduction ------------------------------------------------------------------

def test_free_reduce_examples():
    assert free_reduce(W("a t t^-1 b")) == W("a b")
    assert free_reduce(W("t a a^-1 t^-1")) == ()
    c = parse_constraints("a = b")
    assert free_reduce(W("t a b^-1 t^-1"), c) == ()
    assert free_reduce(W("1 a 1")) == W("a")
    assert free_reduce(W("a q b"), parse_constraints("q = 1")) == W("a b")


def test_cyclic_reduce_examples():
    assert cyclic_reduce(W("t^-1 a t")) == W("a")
    assert cyclic_reduce(W("a t")) == W("a t")
    # t a t a^-1 t^-1 is conjugate to t: the wrap pair cancels, then a . a^-1
    assert cyclic_reduce(W("t a t a^-1 t^-1")) == W("t")


def test_invert_examples():
    assert invert(W("g1 t")) == W("t^-1 g1^-1")
    assert invert(()) == ()
    assert invert(W("t a t^-1 b t")) == W("t^-1 b^-1 t a^-1 t^-1")


def test_primitive_root():
    assert primitive_root(W("a b a b a b")) == (W("a b"), 3)
    assert primitive_root(W("a b a")) == (W("a b a"), 1)


# Sanov matrices generate a free subgroup of SL(2, Z); a -> A, b -> B A B^-1 and
# t -> B^2 A B^-2 is a free basis of a rank-3 subgroup, so the matrix of a word
# is the identity exactly when the word is trivial in the free group.
A = ((1, 2), (0, 1))
A_INV = ((1, -2), (0, 1))
B = ((1, 0), (2, 1))
B_INV = ((1, 0), (-2, 1))


def _mul(m, n):
    return tuple(tuple(sum(m[i][k] * n[k][j] for k in range(2)) for j in range(2)) for i in range(2))


def _prod(*ms):
    out = ((1, 0), (0, 1))
    for m in ms:
        out = _mul(out, m)
    return out


IMAGES = {
    "a": (_prod(A), _prod(A_INV)),
    "b": (_prod(B, A, B_INV), _prod(B, A_INV, B_INV)),
    "t": (_prod(B, B, A, B_INV, B_INV), _prod(B, B, A_INV, B_INV, B_INV)),
}


def matrix(w):
    return _prod(*[IMAGES[a.name][0 if a.exp == 1 else 1] for a in w])


letters = st.sampled_from([Letter(n, e) for n in "abt" for e in (1, -1)])
words = st.lists(letters, max_size=14).map(tuple)


@given(words)
def test_free_reduce_matches_matrix_oracle(w):
    r = free_reduce(w)
    assert is_reduced(r)
    assert matrix(r) == matrix(w)
    assert (r == ()) == (matrix(w) == ((1, 0), (0, 1)))


@given(words)
def test_cyclic_reduce_is_conjugate_and_reduced(w):
    r = cyclic_reduce(w)
    assert is_cyclically_reduced(r)
    m, n = matrix(r), matrix(w)
    assert m[0][0] + m[1][1] == n[0][0] + n[1][1]
    assert cyclic_reduce(r) == r


@given(words)
def test_invert_is_involution_and_inverse(w):
    assert invert(invert(w)) == w
    assert free_reduce(w + invert(w)) == ()


@given(words, words)
def test_free_reduce_respects_concatenation(u, v):
    assert free_reduce(free_reduce(u) + free_reduce(v)) == free_reduce(u + v)


# -- equations ------------------------------------------------------------------

def test_validate_equation_records_pinches():
    c = ConstraintStore()
    e = validate_equation(P1_EQ, c)
    assert e.n == 8
    assert [i + 1 for i in e.pinches()] == [2, 3, 5, 6]
    assert {n for n in ["g1", "g2", "g3", "g4", "g5", "g6", "g7", "g8"] if c.is_nontrivial(n)} == \
        {"g2", "g3", "g5", "g6"}


def test_validate_equation_simple_cases():
    e = validate_equation("g1 t", ConstraintStore())
    assert e.n == 1 and e.pinches() == []
    # a trailing block moves to the front
    e = validate_equation("t a t b", ConstraintStore())
    assert e.coefficients == ((Letter("b", 1),), (Letter("a", 1),))


def test_validate_equation_rejects_degenerate():
    with pytest.raises(EquationShapeError, match="non-degeneracy"):
        validate_equation("g1 t 1 t^-1 g3 t", ConstraintStore())
    with pytest.raises(EquationShapeError, match="non-degeneracy"):
        validate_equation("g1 t g2 t^-1 g3 t", parse_constraints("g2 = 1"))
    with pytest.raises(EquationShapeError):
        validate_equation("a x", ConstraintStore())
    with pytest.raises(EquationShapeError):
        validate_equation("a b", ConstraintStore())


def test_exponent_sum():
    assert exponent_sum(validate_equation(P1_EQ, ConstraintStore())) == 4
    assert exponent_sum(validate_equation("a t b t c t d t e t", ConstraintStore())) == 5
    e = validate_equation("a t b t^-1", ConstraintStore())
    assert exponent_sum(e) == 0 and is_singular(e)


# -- labels ---------------------------------------------------------------------

def test_label_status_examples():
    c = parse_constraints("g2 != 1")
    assert label_status(W("g2 g2^-1"), c) == FreelyTrivial()
    assert label_status(W("g2 g2 g2"), c) == NonAdmissibleTorsionFree(W("g2"), 3)
    assert label_status(W("g1 g4"), ConstraintStore()) == Indeterminate(W("g1 g4"))


def test_label_status_up_to_conjugation_and_inverse():
    c = parse_constraints("a != 1")
    assert label_status(W("b a^-1 a^-1 b^-1"), c) == NonAdmissibleTorsionFree(W("a^-1"), 2)
    c.declare_nontrivial_word(W("a b"))
    assert label_status(W("b a b a"), c) == NonAdmissibleTorsionFree(W("b a"), 2)
    assert label_status(W("b^-1 a^-1"), c) == NonAdmissibleTorsionFree(W("b^-1 a^-1"), 1)


def test_label_status_rejects_generators():
    with pytest.raises(ValueError):
        label_status(W("a t"), ConstraintStore())


@given(words.filter(lambda w: all(a.name != "t" for a in w)), st.integers(0, 13))
def test_label_status_rotation_invariant(w, i):
    c = parse_constraints("a != 1")
    if w:
        i %= len(w)
    s1, s2 = label_status(w, c), label_status(w[i:] + w[:i], c)
    assert type(s1) is type(s2)
    if isinstance(s1, NonAdmissibleTorsionFree):
        assert s1.power == s2.power and is_rotation(s1.base, s2.base)
    if isinstance(s1, Indeterminate):
        assert is_rotation(s1.required, s2.required)
