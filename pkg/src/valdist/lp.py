"""A small dense simplex solver over the rationals.

Two-phase tableau method with Bland's rule, so it terminates without cycling
and every reported solution is an exact vertex.  Intended for the weight
problems in :mod:`valdist.position` (tens of variables, a few hundred rows).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded"
    x: list[Fraction] | None
    objective: Fraction | None


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    piv = T[r][c]
    row = [v / piv for v in T[r]]
    T[r] = row
    nz = [j for j, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i != r and other[c]:
            f = other[c]
            for j in nz:
                other[j] -= f * row[j]
    basis[r] = c


def _simplex(T, basis, obj_row: int, allowed: int) -> str:
    """Minimize with the reduced costs stored in ``T[obj_row]`` (entering
    columns limited to ``j < allowed``)."""
    m = obj_row
    while True:
        cost = T[obj_row]
        enter = next((j for j in range(allowed) if cost[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        leave = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(T, basis, leave, enter)


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    """Optimize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""
    n = len(c)
    rows = []  # (coeffs over x, slack sign or 0, rhs)
    for a, b in zip(A_ub, b_ub):
        rows.append(([Fraction(v) for v in a], 1, Fraction(b)))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a], 0, Fraction(b)))
    m = len(rows)
    n_slack = sum(1 for _, s, _ in rows if s)
    # columns: x (n) | slacks | artificials | rhs
    T: list[list[Fraction]] = []
    basis: list[int] = []
    needs_art = []
    slack_col = n
    slack_of_row = []
    for coeffs, s, b in rows:
        row = coeffs + [Fraction(0)] * n_slack
        sc = None
        if s:
            sc = slack_col
            row[sc] = Fraction(1)
            slack_col += 1
        if b < 0:
            row = [-v for v in row]
            b = -b
        T.append(row + [b])
        slack_of_row.append(sc)
        needs_art.append(sc is None or T[-1][sc] < 0)
    n_art = sum(needs_art)
    width = n + n_slack + n_art
    art = n + n_slack
    for i in range(m):
        rhs = T[i].pop()
        T[i].extend([Fraction(0)] * n_art)
        if needs_art[i]:
            T[i][art] = Fraction(1)
            basis.append(art)
            art += 1
        else:
            basis.append(slack_of_row[i])
        T[i].append(rhs)

    # phase 1: minimize the sum of artificials
    obj = [Fraction(0)] * (width + 1)
    for j in range(n + n_slack, width):
        obj[j] = Fraction(1)
    for i in range(m):
        if basis[i] >= n + n_slack:
            obj = [o - v for o, v in zip(obj, T[i])]
    T.append(obj)
    _simplex(T, basis, m, width)
    if T[m][-1] != 0:
        return LPResult("infeasible", None, None)
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n + n_slack:
            j = next((j for j in range(n + n_slack) if T[i][j]), None)
            if j is not None:
                _pivot(T, basis, i, j)
    T.pop()

    # phase 2
    sign = -1 if maximize else 1
    obj = [Fraction(sign) * Fraction(v) for v in c] + [Fraction(0)] * (width - n + 1)
    for i in range(m):
        b = basis[i]
        if obj[b]:
            f = obj[b]
            obj = [o - f * v for o, v in zip(obj, T[i])]
    T.append(obj)
    status = _simplex(T, basis, m, n + n_slack)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    value = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
    return LPResult("optimal", x, value)
