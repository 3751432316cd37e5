from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from aspherika.lp import maximize


def test_small_programs():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
    assert maximize([3, 5], [([1, 0], "<=", 4), ([0, 2], "<=", 12), ([3, 2], "<=", 18)]) == [2, 6]
    assert maximize([1, 1], [([1, 1], "<=", 1), ([1, 1], ">=", 2)]) is None
    sol = maximize([1, 1], [([1, 0], "==", 1), ([1, 2], "<=", 2)])
    assert sol == [1, Fraction(1, 2)]
    with pytest.raises(ValueError):
        maximize([1, 0], [([0, 1], "<=", 1)])


def test_negative_rhs_is_normalised():
    assert maximize([-1], [([-1], "<=", -3)]) == [3]


def test_solution_is_exact():
    sol = maximize([1, 1, 1], [([3, 0, 0], "<=", 1), ([0, 7, 0], "<=", 2), ([1, 1, 1], "<=", 5)])
    assert sol[:2] == [Fraction(1, 3), Fraction(2, 7)]
    assert all(isinstance(v, Fraction) for v in sol)


small = st.integers(-4, 4)


@st.composite
def programs(draw):
    n = draw(st.integers(1, 4))
    rows = draw(st.integers(1, 5))
    obj = draw(st.lists(small, min_size=n, max_size=n))
    cons = []
    for _ in range(rows):
        coeffs = draw(st.lists(small, min_size=n, max_size=n))
        cons.append((coeffs, draw(st.sampled_from(["<=", ">=", "=="])), draw(st.integers(-6, 6))))
    # a box keeps every program bounded
    for j in range(n):
        cons.append(([1 if i == j else 0 for i in range(n)], "<=", 5))
    return obj, cons


@settings(max_examples=150, deadline=None)
@given(programs())
def test_matches_scipy(program):
    obj, cons = program
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, sense, rhs in cons:
        if sense == "<=":
            a_ub.append(coeffs); b_ub.append(rhs)
        elif sense == ">=":
            a_ub.append([-v for v in coeffs]); b_ub.append(-rhs)
        else:
            a_eq.append(coeffs); b_eq.append(rhs)
    ref = linprog(-np.array(obj, dtype=float), A_ub=a_ub or None, b_ub=b_ub or None,
                  A_eq=a_eq or None, b_eq=b_eq or None, bounds=[(0, None)] * len(obj),
                  method="highs")
    sol = maximize(obj, cons)
    if ref.status == 2:
        assert sol is None
        return
    assert ref.status == 0
    assert sol is not None
    for coeffs, sense, rhs in cons:
        lhs = sum(Fraction(c) * v for c, v in zip(coeffs, sol))
        assert {"<=": lhs <= rhs, ">=": lhs >= rhs, "==": lhs == rhs}[sense]
    assert all(v >= 0 for v in sol)
    value = sum(Fraction(c) * v for c, v in zip(obj, sol))
    assert float(value) == pytest.approx(-ref.fun, abs=1e-7)
