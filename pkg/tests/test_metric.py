import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from valdist import metric
from valdist.curves import CurveRep, Region, parse_exppoly
from valdist.metric import (ContactConstants, ExcludedPoint, HypothesisViolation, MainLemmaParams, RestrictedMode,
                            SampleSet)
from valdist.poly import HomogeneousPolynomial
from valdist.position import PositionConfig
from valdist.scenario import _Ctx, resolve_variety, shipped


def _ctx(name):
    return _Ctx(shipped()[name], 0, None, None)


def _p1(components, hyper=("x0", "x1", "x0 + x1"), region=None):
    V = resolve_variety("P1")
    cfg = PositionConfig.lift(V, [HomogeneousPolynomial.parse(h, 1) for h in hyper], 1)
    F = CurveRep([parse_exppoly(c) for c in components], region or Region.disk(3))
    return F, cfg


@pytest.fixture(scope="module")
def zero_free():
    return _ctx("metric_zero_free")


@pytest.fixture(scope="module")
def conic():
    return _ctx("smt_conic_tangents")


@pytest.mark.parametrize("M", range(0, 13))
def test_contact_constants_identities(M):
    cc = ContactConstants(M)
    assert cc.identities_hold()
    assert cc.sigma[:4] == [0, 1, 3, 6][:M + 2] or M < 2


def test_contact_constants_small():
    cc = ContactConstants(3)
    assert cc.sigma == [0, 1, 3, 6, 10]
    assert cc.tau == [1, 4, 10]
    assert cc.tau_M == 10


def test_phi_oracle_value(oracle):
    F, cfg = _p1(["1", "exp(z)"])
    data = metric.contact_data(F, cfg)
    assert math.exp(float(data.log_phi(0, 1, 0))) == pytest.approx(oracle["phi_1_ez_x1_p0_at_0"], rel=1e-14)


def test_phi_positive_and_level_bounds(conic):
    data = conic.data()
    for j in range(data.q):
        for p in range(data.M):
            v = metric.phi_jp(data, p, j, 1 + 1j)
            assert math.isfinite(v) and v > 0
    with pytest.raises(ValueError):
        metric.phi_jp(data, data.M, 0, 1 + 1j)
    with pytest.raises(ValueError):
        metric.phi_jp(data, 0, 0, 1 + 1j, delta=1.0)


def test_phi_excluded_at_tangency(conic):
    # the first line touches the conic at z = 2
    with pytest.raises(ExcludedPoint):
        metric.phi_jp(conic.data(), 0, 0, 2.0)


def test_sum_to_product_conic(conic):
    s = SampleSet.random_disk(3, 200, 1e-3, seed=1)
    for p in range(conic.data().M):
        rep = metric.sum_to_product_check(conic.data(), s, p)
        assert rep.verdict == "PASS" and rep.constant > 0
        assert rep.samples + rep.excluded == 200


def test_divisor_conic_tangents_exact(conic, oracle):
    rep = metric.divisor_inequality_check(conic.curve, conic.need_cfg(), conic.omegas())
    assert rep.verdict == "PASS"
    got = {round(pt.roots[0].real): pt for pt in rep.points}
    for row in oracle["divisor_conic_tangents"]:
        pt = got[row["t"]]
        assert pt.order_W == row["ord_W"]
        assert max(pt.orders_Q) == row["ord_Q"]
        assert pt.value == Fraction(row["value"])


def test_divisor_vacuous_without_zeros():
    F, cfg = _p1(["1", "z"], hyper=("x0", "x0"))
    assert metric.divisor_inequality_check(F, cfg, [1, 1]).verdict == "VACUOUS"


def test_divisor_restricted_for_exponentials():
    F, cfg = _p1(["1", "exp(z)"])
    with pytest.raises(RestrictedMode):
        metric.divisor_inequality_check(F, cfg, [1, 1, 1])


def test_schwarz_trivial_and_equality():
    pts = SampleSet.disk_grid(2.0, 21, 1e-3).points
    assert metric.schwarz_bound_check(np.zeros(len(pts)), pts, 2.0).verdict == "PASS"
    rep = metric.schwarz_bound_check(metric.poincare_density(2.0, pts), pts, 2.0)
    assert rep.verdict == "PASS"
    assert rep.max_ratio == pytest.approx(1.0, abs=1e-12)
    assert metric.schwarz_bound_check(1.01 * metric.poincare_density(2.0, pts), pts, 2.0).verdict == "FAIL"
    with pytest.raises(ValueError):
        metric.schwarz_bound_check([0.0], [2.5], 2.0)


def test_poincare_identity_oracle(oracle):
    assert oracle["poincare_identity_residual"] == "0"


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0, 10.0])
def test_poincare_calibration(R):
    rep = metric.poincare_calibration(R)
    assert rep.max_relative_error <= 1e-6
    assert rep.curvature.verdict == "PASS"


def test_flat_control_rejected():
    assert metric.flat_control().verdict == "FAIL"


def test_laplacian_oracle(oracle):
    o = oracle["laplacian_log_1z"]
    pts = [complex(a, b) for a, b in o["points"]]
    L = metric.laplacian(lambda z: np.log(1 + np.abs(z) ** 2), pts, 1e-3)
    # roundoff of order eps/h^2 dominates at this step; the error estimate must cover it
    np.testing.assert_allclose(L.value, o["values"], rtol=1e-6)
    assert np.all(np.abs(L.value - o["values"]) <= L.error)


def test_derived_norm_equality_for_line(oracle):
    F, cfg = _p1(["1", "z"])
    data = metric.contact_data(F, cfg)
    s = SampleSet.disk_grid(3, 15, 1e-3)
    lhs, rhs = metric.derived_norm_sides(data, s)
    np.testing.assert_allclose(lhs.value, rhs, rtol=1e-6)
    assert np.all(np.abs(lhs.value - rhs) <= lhs.error)
    np.testing.assert_allclose(rhs, 4 / (1 + np.abs(s.points) ** 2) ** 2, rtol=1e-12)


@pytest.mark.parametrize("name", ["smt_conic_tangents", "metric_zero_free"])
def test_derived_norm_scenarios(name):
    ctx = _ctx(name)
    assert metric.derived_norm_inequality_check(ctx.data(), ctx.grid_samples()).verdict == "PASS"


def test_main_lemma_params_zero_free(zero_free):
    P = zero_free.params()
    assert P.gamma == Fraction(7, 10)
    assert P.exponent == Fraction(11, 10)
    assert P.threshold_factor == Fraction(31, 10)


def test_main_lemma_hypothesis_boundary():
    kw = dict(eta=["1/10"] * 3, omegas=[1, 1, 1], M=1)
    MainLemmaParams(epsilon=Fraction(7, 31) - Fraction(1, 10**9), **kw)
    with pytest.raises(HypothesisViolation):
        MainLemmaParams(epsilon=Fraction(7, 31), **kw)


@given(M=st.integers(1, 3), q=st.integers(3, 9), eta=st.fractions(Fraction(1, 100), Fraction(1, 2)),
       eps=st.fractions(Fraction(1, 1000), Fraction(1, 10)), d=st.integers(1, 3), w=st.fractions(Fraction(1, 2), 1))
def test_rho_star_closed_form(M, q, eta, eps, d, w):
    try:
        P = MainLemmaParams([eta] * q, [w] * q, eps, M, d)
    except HypothesisViolation:
        assume(False)
    assume(P.rho_applicable)
    assert 0 < P.rho < 1
    assert P.rho_star == P.rho_star_closed_form()


def test_main_lemma_negativity(zero_free):
    data, P = zero_free.data(), zero_free.params()
    u = lambda z: metric.lemma_log_eta(data, P, z)  # noqa: E731
    rep = metric.curvature_negativity_check(u, zero_free.grid_samples())
    assert rep.C > 0 and rep.fraction >= 0.99 and rep.verdict == "PASS"


def test_main_lemma_bound_and_schwarz(zero_free):
    data, P = zero_free.data(), zero_free.params()
    rep = metric.main_lemma_bound_check(data, P, zero_free.R)
    assert rep.verdict == "PASS" and rep.boundary_slope < 0
    assert metric.pseudo_metric_schwarz(data, P, zero_free.random_samples(), zero_free.R).verdict == "PASS"


def test_main_lemma_bound_detects_growth(zero_free, monkeypatch):
    data, P, R = zero_free.data(), zero_free.params(), zero_free.R
    # a quantity growing faster than the allowed power of the density
    fake = lambda d, p, z: (float(p.exponent) + 0.5) * np.log(metric.poincare_density(R, z))  # noqa: E731
    monkeypatch.setattr(metric, "main_lemma_log_eta", fake)
    rep = metric.main_lemma_bound_check(data, P, R)
    assert rep.verdict == "FAIL" and rep.boundary_slope == pytest.approx(0.5, abs=1e-6)
