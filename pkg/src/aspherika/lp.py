"""Two-phase primal simplex over ``Fraction`` with Bland's rule.

Small and exact; sized for weight-search problems with a few dozen variables.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

LE, GE, EQ = "<=", ">=", "=="


def _pivot(rows, obj_rows, r, col):
    prow = rows[r]
    piv = prow[col]
    if piv != 1:
        inv = 1 / piv
        for j in range(len(prow)):
            if prow[j]:
                prow[j] *= inv
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(rows):
        if i != r:
            f = row[col]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    for row in obj_rows:
        f = row[col]
        if f:
            for j in nz:
                row[j] -= f * prow[j]


def _run(rows, basis, obj, allowed, also=()):
    """Maximise; ``obj`` is the objective row in ``z - c.x = 0`` form."""
    while True:
        col = next((j for j in allowed if obj[j] < 0), None)
        if col is None:
            return True
        best, r = None, None
        for i, row in enumerate(rows):
            a = row[col]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                    best, r = ratio, i
        if r is None:
            return False  # unbounded
        _pivot(rows, [obj, *also], r, col)
        basis[r] = col


def maximize(objective: Sequence, constraints: Sequence[tuple]) -> Optional[list[Fraction]]:
    """Maximise ``objective . x`` subject to ``constraints`` and ``x >= 0``.

    Each constraint is ``(coefficients, sense, rhs)`` with sense one of
    ``"<="``, ``">="``, ``"=="``.  Returns None when infeasible; raises
    ValueError when unbounded.
    """
    nvar = len(objective)
    norm = []
    for coeffs, sense, rhs in constraints:
        coeffs = [Fraction(v) for v in coeffs]
        rhs = Fraction(rhs)
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        norm.append((coeffs, sense, rhs))
    nslack = sum(1 for _, s, _ in norm if s != EQ)
    nart = sum(1 for _, s, _ in norm if s != LE)
    width = nvar + nslack + nart + 1
    rows, basis = [], []
    si, ai = nvar, nvar + nslack
    artificial = []
    for coeffs, sense, rhs in norm:
        row = [Fraction(0)] * width
        row[:nvar] = coeffs
        row[-1] = rhs
        if sense == LE:
            row[si] = Fraction(1)
            basis.append(si)
            si += 1
        else:
            if sense == GE:
                row[si] = Fraction(-1)
                si += 1
            row[ai] = Fraction(1)
            basis.append(ai)
            artificial.append(ai)
            ai += 1
        rows.append(row)

    z = [Fraction(0)] * width
    for j in range(nvar):
        z[j] = -Fraction(objective[j])

    if artificial:
        # phase 1: maximise -sum(artificials)
        w = [Fraction(0)] * width
        for a in artificial:
            w[a] = Fraction(1)
        for i, b in enumerate(basis):
            if b in artificial:
                for j in range(width):
                    w[j] -= rows[i][j]
        _run(rows, basis, w, range(width - 1), also=(z,))
        if w[-1] != 0:
            return None
        # drive remaining artificials out of the basis
        art = set(artificial)
        for i, b in enumerate(basis):
            if b in art:
                col = next((j for j in range(nvar + nslack) if rows[i][j] != 0), None)
                if col is not None:
                    _pivot(rows, [z], i, col)
                    basis[i] = col
        allowed = range(nvar + nslack)
    else:
        allowed = range(width - 1)
    if not _run(rows, basis, z, allowed):
        raise ValueError("linear program is unbounded")
    x = [Fraction(0)] * nvar
    for i, b in enumerate(basis):
        if b < nvar:
            x[b] = rows[i][-1]
    return x
