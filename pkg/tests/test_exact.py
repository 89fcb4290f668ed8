from fractions import Fraction

import sympy as sp
from hypothesis import given, strategies as st

from valdist.exact import (GaussQ, coprime_basis, determinant, gq, nullspace, order_at_factor, parse_gaussq, rank,
                           squarefree_decomposition, ueval, ugcd, udivmod, umul, utrim)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussQ, small, small)


def to_sympy(x: GaussQ):
    return sp.Rational(x.re.numerator, x.re.denominator) + sp.I * sp.Rational(x.im.numerator, x.im.denominator)


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a


@given(gauss)
def test_conjugate_and_abs2(a):
    assert a * a.conjugate() == GaussQ(a.abs2())


def test_parse_and_coerce():
    assert parse_gaussq("1/2 - 3i") == GaussQ(Fraction(1, 2), -3)
    assert gq(2) == GaussQ(2)
    assert complex(GaussQ(1, -1)) == 1 - 1j


@given(st.lists(st.lists(gauss, min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_matches_sympy(rows):
    assert rank(rows) == sp.Matrix([[to_sympy(x) for x in r] for r in rows]).rank()


@given(st.lists(st.lists(gauss, min_size=3, max_size=3), min_size=3, max_size=3))
def test_determinant_matches_sympy(rows):
    d = determinant(rows)
    assert to_sympy(d) == sp.expand(sp.Matrix([[to_sympy(x) for x in r] for r in rows]).det())


@given(st.lists(st.lists(gauss, min_size=4, max_size=4), min_size=1, max_size=3))
def test_nullspace_annihilates(rows):
    for v in nullspace(rows, 4):
        assert all(sum((a * b for a, b in zip(r, v)), GaussQ(0)) == 0 for r in rows)
    assert len(nullspace(rows, 4)) == 4 - rank(rows)


poly = st.lists(gauss, min_size=1, max_size=4).map(utrim).filter(lambda p: len(p) >= 2)


@given(poly, poly)
def test_gcd_divides(p, q):
    g = ugcd(p, q)
    assert not utrim(udivmod(p, g)[1])
    assert not utrim(udivmod(q, g)[1])


@given(poly, st.integers(1, 3))
def test_squarefree_decomposition_reconstructs(p, e):
    f = p
    for _ in range(e - 1):
        f = umul(f, p)
    parts = squarefree_decomposition(f)
    prod = [GaussQ(1)]
    for a, i in parts:
        for _ in range(i):
            prod = umul(prod, a)
    lead = f[-1] / prod[-1]
    assert [c * lead for c in prod] == utrim(f)
    assert order_at_factor(f, parts[-1][0]) >= e


def test_coprime_basis_of_shared_factors():
    # (z-1)^2 (z-2) and (z-1)(z-3)
    p = umul(umul([gq(-1), gq(1)], [gq(-1), gq(1)]), [gq(-2), gq(1)])
    q = umul([gq(-1), gq(1)], [gq(-3), gq(1)])
    basis = coprime_basis([p, q])
    roots = sorted(-b[0].re for b in basis)
    assert roots == [1, 2, 3]
    assert ueval(p, gq(2)) == 0


@given(a=st.fractions(max_denominator=50), b=st.fractions(max_denominator=50))
def test_gaussq_str_roundtrip(a, b):
    g = GaussQ(a, b)
    assert parse_gaussq(str(g)) == g
