import itertools
from fractions import Fraction

from hypothesis import given, strategies as st

from valdist.lp import linprog_exact

coef = st.integers(-4, 4).map(Fraction)


def test_textbook_maximum():
    # max 3x + 2y, x + y <= 4, x + 3y <= 6
    res = linprog_exact([3, 2], [[1, 1], [1, 3]], [4, 6], maximize=True)
    assert res.status == "optimal"
    assert res.objective == 12 and res.x == [4, 0]


def test_infeasible_and_unbounded():
    assert linprog_exact([1], A_eq=[[1]], b_eq=[-1]).status == "infeasible"
    assert linprog_exact([1, 0], [[-1, 1]], [1], maximize=True).status == "unbounded"


def _vertex_oracle(c, A, b):
    """Best objective over vertices of {x >= 0, A x <= b} in two variables."""
    rows = [list(a) + [bb] for a, bb in zip(A, b)] + [[Fraction(-1), Fraction(0), Fraction(0)],
                                                     [Fraction(0), Fraction(-1), Fraction(0)]]
    best = None
    for r1, r2 in itertools.combinations(rows, 2):
        det = r1[0] * r2[1] - r1[1] * r2[0]
        if det == 0:
            continue
        x = (r1[2] * r2[1] - r1[1] * r2[2]) / det
        y = (r1[0] * r2[2] - r1[2] * r2[0]) / det
        if all(r[0] * x + r[1] * y <= r[2] for r in rows):
            v = c[0] * x + c[1] * y
            best = v if best is None or v > best else best
    return best


@given(st.lists(st.tuples(st.integers(0, 4).map(Fraction), st.integers(0, 4).map(Fraction),
                          st.integers(1, 8).map(Fraction)), min_size=2, max_size=4),
       st.tuples(coef, coef))
def test_bounded_lp_matches_vertex_enumeration(cons, c):
    # nonnegative rows with a box make the region a bounded polytope
    A = [[a, b] for a, b, _ in cons] + [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    b = [r for *_, r in cons] + [Fraction(5), Fraction(5)]
    res = linprog_exact(list(c), A, b, maximize=True)
    assert res.status == "optimal"
    assert res.objective == _vertex_oracle(c, A, b)
    assert all(sum(ai * xi for ai, xi in zip(a, res.x)) <= bi for a, bi in zip(A, b))
