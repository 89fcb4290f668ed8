import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from valdist import gauss
from valdist.curves import CurveRep, Region, parse_exppoly
from valdist.exact import GaussQ
from valdist.poly import HomogeneousPolynomial
from valdist.scenario import resolve_variety
from valdist.scenario import run_scenario, shipped

CAT = gauss.catalogue()
z = sp.Symbol("z")


@pytest.mark.parametrize("name", sorted(CAT))
def test_catalogue_minimal(name):
    S = CAT[name]
    assert S.quadric().is_zero() and S.is_minimal()


def test_not_minimal_rejected():
    S = gauss.MinimalSurface("bad", ["1", "z", "0"])
    assert not S.is_minimal()
    with pytest.raises(gauss.NotMinimal):
        gauss.gauss_map(S)


def test_enneper_symbolic():
    expected = [(1 - z**2) / 2, sp.I * (1 + z**2) / 2, z]
    for comp, e in zip(CAT["enneper"].derivatives, expected):
        assert sp.simplify(sp.sympify(str(comp).replace("^", "**"), locals={"z": z, "I": sp.I}) - e) == 0
    assert sp.expand(sum(e**2 for e in expected)) == 0


def test_enneper_density_at_origin():
    S = CAT["enneper"]
    assert float(gauss.induced_metric_density(S, 0)) == pytest.approx(1.0, abs=1e-15)
    assert gauss.induced_metric_density_exact(S, GaussQ(0)) == 1
    pt = GaussQ(Fraction(1, 3), Fraction(-2, 5))
    assert float(gauss.induced_metric_density_exact(S, pt)) == pytest.approx(
        float(gauss.induced_metric_density(S, complex(1 / 3, -2 / 5))), rel=1e-14)


@pytest.mark.parametrize("c", [2, GaussQ(0, 1), GaussQ(Fraction(1, 2), 3)])
def test_density_reparametrization(c):
    S = CAT["enneper"]
    T = S.reparametrized(c)
    cc = complex(c) if isinstance(c, GaussQ) else complex(c)
    xi = np.array([0.3 + 0.2j, -1.1 + 0.4j, 2.0j])
    np.testing.assert_allclose(gauss.induced_metric_density(T, xi),
                               abs(cc) ** 2 * gauss.induced_metric_density(S, cc * xi), rtol=1e-12)
    assert T.is_minimal()


def test_helicoid_branch_free_but_catenoid_chart():
    with pytest.raises(ValueError):
        gauss.MinimalSurface("x", ["z", "1", "0"], chart="cylinder")


def test_total_curvature_plane_exact_zero():
    tc = gauss.total_curvature(CAT["plane"])
    assert tc.verdict == "CONVERGED" and tc.value == 0.0 and tc.degree_snapped == 0


@pytest.mark.parametrize("name", ["enneper", "catenoid"])
def test_total_curvature_oracle(name, oracle):
    tc = gauss.total_curvature(CAT[name])
    assert tc.verdict == "CONVERGED"
    assert tc.value == pytest.approx(oracle["total_curvature"][name], abs=1e-6)


def test_total_curvature_helicoid_infinite():
    assert gauss.total_curvature(CAT["helicoid"]).verdict == "INFINITE"


def test_bound_small_case():
    rep = gauss.bound_evaluator(1, 1, 1, 1, 3)
    assert rep.B1 == 3 and rep.forms_agree and not rep.q_exceeds


@pytest.mark.parametrize("n", range(1, 8))
def test_classical_bound(n, oracle):
    assert gauss.bound_evaluator(n, n, 1, n, 1).B1 == oracle["classical_bound"][str(n)]


def test_bound_forms_agree_random():
    rng = random.Random(7)
    for _ in range(1000):
        k = rng.randint(1, 6)
        N = rng.randint(k, 12)
        d = rng.randint(1, 5)
        M = rng.randint(k, 30)
        rep = gauss.bound_evaluator(N, k, d, M, rng.randint(1, 100))
        assert rep.forms_agree and rep.B1 <= rep.B2


def test_bound_rejects_bad_input():
    with pytest.raises(ValueError):
        gauss.bound_evaluator(1, 2, 1, 2, 3)


def _curve(*comps):
    return CurveRep([parse_exppoly(c) for c in comps], Region.disk(math.inf))


def test_ramification_zero_free():
    w = gauss.ramification_defect_witness(_curve("1", "exp(z)"), HomogeneousPolynomial.parse("x1", 1), 1, math.inf)
    assert w.bound == 1


def test_ramification_double_zero():
    w = gauss.ramification_defect_witness(_curve("1", "z**2"), HomogeneousPolynomial.parse("x1", 1), 1, 2)
    assert w.bound == Fraction(1, 2) and w.certificate == "exact" and w.m_observed == 2


def test_ramification_enneper_clamped(oracle):
    G = gauss.gauss_map(CAT["enneper"])
    x0 = HomogeneousPolynomial.parse("x0", 2)
    assert set(oracle["enneper_x0_orders"].values()) == {1}
    assert gauss.ramification_defect_witness(G, x0, 2, 1).bound == 0
    bad = gauss.ramification_defect_witness(G, x0, 2, 2)
    assert bad.bound is None and abs(abs(bad.offending_zero) - 1) < 1e-12


@given(M=st.integers(1, 10), m1=st.integers(1, 40), m2=st.integers(1, 40))
def test_ramification_monotone(M, m1, m2):
    lo, hi = sorted((m1, m2))
    F = _curve("1", f"z**{hi}")
    x1 = HomogeneousPolynomial.parse("x1", 1)
    b_lo = gauss.ramification_defect_witness(F, x1, M, lo).bound
    b_hi = gauss.ramification_defect_witness(F, x1, M, hi).bound
    assert b_lo <= b_hi <= 1


def _cfg(name):
    obj = shipped()[name]
    V = resolve_variety(obj["variety"])
    return gauss.gauss_config([HomogeneousPolynomial.parse(h, V.n) for h in obj["hypersurfaces"]], obj["N"], V)


def test_ftc_catenoid():
    rep = gauss.finite_total_curvature_criterion(CAT["catenoid"], _cfg("gauss_catenoid_conic"))
    assert rep.stabilized and rep.bound.q_exceeds and rep.curvature.verdict == "CONVERGED"
    assert rep.verdict == "PASS"


def test_ftc_enneper_consistent():
    rep = gauss.finite_total_curvature_criterion(CAT["enneper"], _cfg("gauss_enneper"))
    assert rep.verdict == "PASS" and rep.stabilized


def test_ftc_helicoid_counts_grow():
    rep = gauss.finite_total_curvature_criterion(CAT["helicoid"], _cfg("gauss_helicoid"), sizes=[5.0, 10.0, 20.0])
    assert not rep.stabilized and rep.verdict == "PASS"


@pytest.mark.parametrize("name", ["gauss_plane", "gauss_enneper", "gauss_catenoid_conic", "gauss_helicoid"])
def test_gauss_scenarios(name):
    assert run_scenario(shipped()[name]).exit_code == 0


def test_surface_json_roundtrip():
    for S in CAT.values():
        T = gauss.MinimalSurface.from_json(S.to_json())
        assert [str(d) for d in T.derivatives] == [str(d) for d in S.derivatives]


def test_ramification_sees_origin_numeric():
    F = _curve("1", "exp(z) - 1")
    w = gauss.ramification_defect_witness(F, HomogeneousPolynomial.parse("x1", 1), 1, 2, radius=20.0)
    assert w.bound is None and w.certificate == "numeric" and abs(w.offending_zero) < 1e-9
    w = gauss.ramification_defect_witness(F, HomogeneousPolynomial.parse("x1", 1), 1, 2, outside=1.0, radius=10.0)
    assert w.bound is None and abs(abs(w.offending_zero) - 2 * math.pi) < 1e-9
