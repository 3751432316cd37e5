import pytest
from hypothesis import given, strategies as st

from aspherika.errors import ClassResolutionError
from aspherika.presentation import T, T_INV, X, X_INV, PatternKind, RelativePresentation
from aspherika.stargraph import StarEdge, StarGraph, build_star_graph, resolve_class, to_dot
from aspherika.suite import worked_instance, run_case_full
from aspherika.words import Letter, invert, parse_word, word_str

W = parse_word


def p1_graph():
    return run_case_full(worked_instance(PatternKind.P1)).graph


def class_set(g):
    out = set()
    for cls in range(g.class_count):
        e = g.class_edge(cls)
        out.add((str(e.source), str(e.target), word_str(e.label)))
    return out


def test_p1_graph_structure():
    g = p1_graph()
    assert set(g.vertices) == {T, T_INV, X, X_INV}
    assert len(g.edges) == 16
    assert g.class_count == 8
    assert class_set(g) == {
        ("t^-1", "x", "g1"), ("x^-1", "x", "g4"), ("x^-1", "t", "g7"), ("t^-1", "t", "g8"),
        ("x", "t", "1"), ("t^-1", "x^-1", "1"), ("t^-1", "t^-1", "g2"), ("t", "t", "g3"),
    }


def test_single_letter_relator():
    g = build_star_graph(RelativePresentation(("t",), (W("g1 t"),)))
    assert len(g.vertices) == 2 and len(g.edges) == 2
    e, f = g.edges
    assert (e.source, e.target, e.label) == (T_INV, T, W("g1"))
    assert (f.source, f.target, f.label) == (T, T_INV, W("g1^-1"))


def test_adjacent_generators_give_identity_label():
    g = build_star_graph(RelativePresentation(("t", "x"), (W("a t x^-1"),)))
    labels = {(str(e.source), str(e.target)): word_str(e.label) for e in g.edges}
    assert labels[("t^-1", "x^-1")] == "1"


def test_resolve_class():
    g = p1_graph()
    assert g.class_edge(resolve_class(g, label=W("g7"))).source == X_INV
    # the inverse direction resolves to the same class
    assert resolve_class(g, label=W("g7^-1")) == resolve_class(g, label=W("g7"))
    with pytest.raises(ClassResolutionError):
        resolve_class(g, label=())
    assert resolve_class(g, label=(), source=X, target=T) != resolve_class(g, label=(), source=T_INV,
                                                                          target=X_INV)
    with pytest.raises(ClassResolutionError):
        resolve_class(g, label=W("g5"))


def test_dot_output():
    g = p1_graph()
    dot = to_dot(g)
    assert dot.startswith("digraph star {")
    assert dot.count("[label=") == 4 + 8
    assert "w=" not in dot
    weighted = to_dot(g, {0: 0, 1: 1})
    assert weighted.count("w=") == 2
    assert to_dot(g) == dot


def test_dot_marks_self_paired_edges():
    e = StarEdge(0, T, T_INV, (), 0, 0, False)
    f = StarEdge(1, T, T_INV, (), 0, 0, True)
    g = StarGraph((T, T_INV), (e, f))
    assert g.self_paired(0)
    dot = to_dot(g)
    assert dot.count("->") == 1 and "dashed" in dot


coefficients = st.sampled_from([Letter(n, e) for n in "abc" for e in (1, -1)])
generators = st.sampled_from([T, T_INV, X, X_INV])


@st.composite
def relators(draw):
    gens = draw(st.lists(generators, min_size=1, max_size=6))
    out = []
    for gen in gens:
        out.append(draw(coefficients))
        out.append(gen)
    return tuple(out)


@given(st.lists(relators(), min_size=1, max_size=3))
def test_star_graph_invariants(rels):
    p = RelativePresentation(("t", "x"), tuple(rels))
    g = build_star_graph(p)
    assert len(g.edges) == 2 * sum(a.is_generator for r in rels for a in r)
    for e in g.edges:
        f = g.edges[e.pair]
        assert f.pair == e.id and f.weight_class == e.weight_class
        assert (f.source, f.target) == (e.target, e.source)
        assert f.label == invert(e.label)
    # each corner leaves the inverse of one generator letter and enters the next
    for r, rel in enumerate(rels):
        forward = [g.class_edge(c) for c in g.classes_of_relator(r)]
        assert sorted(e.target for e in forward) == sorted(a for a in rel if a.is_generator)
