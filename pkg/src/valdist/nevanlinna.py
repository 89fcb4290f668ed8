"""Nevanlinna functionals on punctured disks and the verifiers built on them.

Conventions: ``s`` is the base radius, ``r > s`` the running radius, and all
circle averages use :func:`valdist.quadrature.circle_mean`.  Truncated
counting functions cap each multiplicity at the truncation level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .curves import CurveRep, Divisor, ExpPoly, compose_with_polynomial, reduce_polynomial_curve
from .exact import nullspace, ZERO
from .poly import HomogeneousPolynomial, QuotientBasis
from .position import PositionConfig, check_subgeneral_position
from .quadrature import DEFAULT_TOL, circle_mean
from .wronskian import basis_composition, wronskian
from .zeros import zeros_on_annulus

DEFAULT_SLACK = 0.05


@dataclass
class RadiusGrid:
    s: float
    radii: list

    def __post_init__(self):
        r = [float(x) for x in self.radii]
        if not r:
            raise ValueError("empty radius grid")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("radii must be strictly increasing")
        if r[0] <= self.s:
            raise ValueError("all radii must exceed s")
        self.radii = r

    @classmethod
    def geometric(cls, s: float, r_min: float, r_max: float, count: int) -> "RadiusGrid":
        return cls(s, list(np.geomspace(r_min, r_max, count)))

    @property
    def r_max(self) -> float:
        return self.radii[-1]

    def decades(self) -> float:
        return math.log10(self.radii[-1] / self.radii[0])

    def tail(self) -> slice:
        """The final third of the samples."""
        m = len(self.radii)
        return slice(m - max(1, m // 3), m)

    def to_json(self) -> dict:
        return {"s": self.s, "radii": self.radii}


# ---------------------------------------------------------------------------
# the functionals
# ---------------------------------------------------------------------------

def counting_function(nu: Divisor, r: float, s: float, truncation=None) -> float:
    """``N^{[p]}(r, s, nu) = sum_{|z| <= r} min(p, nu(z)) log(r / max(|z|, s))``."""
    if r <= s:
        raise ValueError("need r > s")
    cap = math.inf if truncation is None else truncation
    total = 0.0
    for z, m in nu.support:
        a = abs(z)
        if a <= r:
            total += min(cap, m) * math.log(r / max(a, s))
    return total


def counting_series(nu: Divisor, grid: RadiusGrid, truncation=None) -> np.ndarray:
    return np.array([counting_function(nu, r, grid.s, truncation) for r in grid.radii])


@dataclass
class Measured:
    value: float
    error: float


def _circle_difference(func, r: float, s: float, tol: float) -> Measured:
    a = circle_mean(func, r, tol)
    b = circle_mean(func, s, tol)
    return Measured(a.value - b.value, a.error + b.error)


def characteristic(F: CurveRep, r: float, s: float, tol: float = DEFAULT_TOL) -> Measured:
    if r <= s:
        raise ValueError("need r > s")
    return _circle_difference(F.log_norm, r, s, tol)


def characteristic_series(F: CurveRep, grid: RadiusGrid, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    base = circle_mean(F.log_norm, grid.s, tol)
    vals, errs = [], []
    for r in grid.radii:
        q = circle_mean(F.log_norm, r, tol)
        vals.append(q.value - base.value)
        errs.append(q.error + base.error)
    return np.array(vals), np.array(errs)


def _log_plus_ratio(num: ExpPoly, den: ExpPoly):
    def func(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = num.log_abs(z) - den.log_abs(z)
        if np.any(np.isnan(v)) or np.any(v == np.inf):
            raise FloatingPointError("pole on the circle; perturb the radius")
        return np.maximum(v, 0.0)

    return func


def proximity(phi: tuple[ExpPoly, ExpPoly], r: float, s: float, tol: float = DEFAULT_TOL) -> Measured:
    num, den = phi
    if den.is_zero():
        raise ValueError("denominator vanishes identically")
    return _circle_difference(_log_plus_ratio(num, den), r, s, tol)


def _reduce_ratio(num: ExpPoly, den: ExpPoly) -> tuple[ExpPoly, ExpPoly, bool]:
    red = reduce_polynomial_curve([num, den])
    return red[0], red[1], red[0] != num


@dataclass
class ComparisonReport:
    radii: list
    function_T: list
    curve_T: list
    difference: list
    drift_top_decade: float
    bounded: bool
    reduced: bool

    def to_json(self) -> dict:
        return self.__dict__


def function_vs_curve_characteristic(num: ExpPoly, den: ExpPoly, grid: RadiusGrid, bound: float = 0.5,
                                     tol: float = DEFAULT_TOL) -> ComparisonReport:
    """Compare ``T(r,s,phi) = m(r,s,phi) + N(r,s,poles)`` with the curve
    characteristic of ``(den : num)``; ``drift`` is the spread of the
    difference over radii within the top decade."""
    num, den, reduced = _reduce_ratio(num, den)
    poles = zeros_on_annulus(den, grid.s, grid.r_max) if not den.is_constant() else Divisor([])
    curve = CurveRep([den, num])
    Tc, _ = characteristic_series(curve, grid, tol)
    Tf = []
    for r in grid.radii:
        Tf.append(proximity((num, den), r, grid.s, tol).value + counting_function(poles, r, grid.s))
    diff = np.array(Tf) - Tc
    top = [i for i, r in enumerate(grid.radii) if r >= grid.r_max / 10]
    drift = float(np.max(diff[top]) - np.min(diff[top]))
    return ComparisonReport(list(grid.radii), list(map(float, Tf)), list(map(float, Tc)), list(map(float, diff)),
                            drift, drift < bound, reduced)


@dataclass
class LogDerivativeReport:
    radii: list
    m_values: list
    T_values: list
    coefficients: list
    holdout_ok: bool
    holdout_excess: float

    def to_json(self) -> dict:
        return self.__dict__


def log_derivative_measurement(f: ExpPoly, k: int, grid: RadiusGrid, slack: float = 0.5,
                               tol: float = DEFAULT_TOL) -> LogDerivativeReport:
    """``m(r, s, f^(k)/f)`` on the grid and a fit ``c1 log+ T + c2 log r + c3``
    on the first two thirds, tested on the last third (which may contain an
    exceptional set the fit cannot see; ``slack`` absorbs that)."""
    if f.is_zero():
        raise ValueError("f vanishes identically")
    fk = f
    for _ in range(k):
        fk = fk.derivative()
    m_vals = np.array([proximity((fk, f), r, grid.s, tol).value for r in grid.radii])
    T, _ = characteristic_series(CurveRep([ExpPoly.const(1), f]), grid, tol)
    X = np.column_stack([np.log(np.maximum(T, 1.0)), np.log(grid.radii), np.ones(len(T))])
    cut = grid.tail().start
    coef, *_ = np.linalg.lstsq(X[:cut], m_vals[:cut], rcond=None)
    pred = X @ coef
    excess = float(np.max(m_vals[cut:] - pred[cut:]))
    return LogDerivativeReport(list(grid.radii), list(map(float, m_vals)), list(map(float, T)),
                               list(map(float, coef)), excess <= slack, excess)


# ---------------------------------------------------------------------------
# second main theorem and defects
# ---------------------------------------------------------------------------

class DegenerateCurveError(ValueError):
    """The curve lies in a hypersurface not containing V."""

    def __init__(self, message, relation=None):
        super().__init__(message)
        self.relation = relation


def degeneracy_relation(F: CurveRep, B: QuotientBasis):
    """A nonzero coordinate vector ``c`` with ``sum c_i v_i(F) == 0``, or None."""
    funcs = basis_composition(F, B)
    keys = sorted({(lam, j) for f in funcs for lam, p in f.terms.items() for j in range(len(p))},
                  key=lambda t: (t[0].sort_key(), t[1]))
    cols = [[(f.terms.get(lam, []) + [ZERO] * (j + 1))[j] for f in funcs] for lam, j in keys]
    ns = nullspace(cols, len(funcs)) if cols else [[ZERO] * len(funcs)]
    return ns[0] if ns else None


def require_nondegenerate(F: CurveRep, B: QuotientBasis) -> ExpPoly:
    W = wronskian(basis_composition(F, B))
    if W.is_zero():
        rel = degeneracy_relation(F, B)
        form = B.representative(rel) if rel is not None else None
        raise DegenerateCurveError(
            f"Wronskian of v_0(F),...,v_M(F) vanishes identically; the curve lies on {form}", form
        )
    return W


@dataclass
class SMTReport:
    radii: list
    T: list
    N: list  # per hypersurface, untruncated
    N_trunc: list  # per hypersurface, truncated at M
    lhs: list
    rhs: list
    margin: list
    margin_over_T: list
    coefficient: Fraction
    M: int
    slack: float
    tail_min: float
    verdict: str
    certificates: dict = field(default_factory=dict)

    def csv_rows(self):
        header = ["r", "T_f"] + [f"N_{i}" for i in range(len(self.N))] + \
                 [f"N_trunc_{i}" for i in range(len(self.N))] + ["LHS", "RHS", "margin", "margin_over_T"]
        rows = []
        for j, r in enumerate(self.radii):
            rows.append([r, self.T[j]] + [n[j] for n in self.N] + [n[j] for n in self.N_trunc] +
                        [self.lhs[j], self.rhs[j], self.margin[j], self.margin_over_T[j]])
        return header, rows

    def to_json(self) -> dict:
        obj = dict(self.__dict__)
        obj["coefficient"] = str(self.coefficient)
        return obj


def smt_coefficient(cfg: PositionConfig, M: int) -> Fraction:
    N, k, q = cfg.N, cfg.k, cfg.q
    return q - Fraction((2 * N - k + 1) * (M + 1), k + 1)


def hypersurface_divisors(F: CurveRep, Q: Sequence[HomogeneousPolynomial], s: float, t: float) -> list[Divisor]:
    out = []
    for P in Q:
        g = compose_with_polynomial(P, F)
        if g.is_zero():
            raise DegenerateCurveError(f"Q = {P} vanishes identically on the curve")
        out.append(zeros_on_annulus(g, s, t))
    return out


def smt_verify(F: CurveRep, cfg: PositionConfig, grid: RadiusGrid, slack: float = DEFAULT_SLACK,
               tol: float = DEFAULT_TOL, divisors: list | None = None) -> SMTReport:
    B = cfg.basis
    require_nondegenerate(F, B)
    pos = check_subgeneral_position(cfg)
    if not pos.ok:
        raise ValueError(f"hypersurfaces are not in {cfg.N}-subgeneral position: subset {pos.subset}")
    M = B.M
    coef = smt_coefficient(cfg, M)
    T, T_err = characteristic_series(F, grid, tol)
    divs = divisors if divisors is not None else hypersurface_divisors(F, cfg.original, grid.s, grid.r_max)
    N_full = [counting_series(nu, grid) for nu in divs]
    N_tr = [counting_series(nu, grid, M) for nu in divs]
    rhs = sum(n / P.degree for n, P in zip(N_tr, cfg.original))
    lhs = float(coef) * T
    margin = rhs - lhs
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(T > 0, margin / T, np.inf)
    tail_min = float(np.min(ratio[grid.tail()]))
    verdict = "PASS" if tail_min >= -slack else "FAIL"
    certs = {
        "position": pos.to_json(),
        "quadrature_error_max": float(np.max(T_err)),
        "zero_counts": [d.certificate.get("contour_count") for d in divs],
        "perturbations": [d.perturbations for d in divs],
    }
    return SMTReport(list(grid.radii), list(map(float, T)), [list(map(float, n)) for n in N_full],
                     [list(map(float, n)) for n in N_tr], list(map(float, lhs)), list(map(float, rhs)),
                     list(map(float, margin)), list(map(float, ratio)), coef, M, slack, tail_min, verdict, certs)


@dataclass
class EssentialReport:
    verdict: str  # EXTENDS, ESSENTIAL, INCONCLUSIVE
    head_slope: float
    tail_slope: float
    liminf_ratio: float

    def to_json(self) -> dict:
        return self.__dict__


def _slope(x, y):
    return float(np.polyfit(x, y, 1)[0]) if len(x) > 1 else 0.0


def essential_singularity_test(F: CurveRep, grid: RadiusGrid, T: np.ndarray | None = None,
                               tol: float = DEFAULT_TOL) -> EssentialReport:
    """Compare the growth rate ``dT/dlog r`` on the middle and last thirds of
    the grid: a bounded rate means ``T = O(log r)`` (extends), a rate that keeps
    growing means ``T / log r`` diverges (essential)."""
    if T is None:
        T, _ = characteristic_series(F, grid, tol)
    lr = np.log(grid.radii)
    m = len(lr)
    third = max(2, m // 3)
    head = slice(m - 2 * third, m - third)
    tail = slice(m - third, m)
    hs = _slope(lr[head], T[head])
    ts = _slope(lr[tail], T[tail])
    liminf = float(np.min(T[tail] / np.log(np.asarray(grid.radii)[tail] / grid.s)))
    floor = 1e-9
    if ts <= 1.25 * max(hs, floor):
        verdict = "EXTENDS"
    elif ts > 2 * max(hs, floor) and ts > 1.0:
        verdict = "ESSENTIAL"
    else:
        verdict = "INCONCLUSIVE"
    return EssentialReport(verdict, hs, ts, liminf)


class ExtendableCurve(ValueError):
    pass


@dataclass
class DefectResult:
    value: float
    ratio_tail_max: float
    clamped: bool
    ratios: list

    def to_json(self) -> dict:
        return self.__dict__


def truncated_defect(F: CurveRep, Q: HomogeneousPolynomial, truncation: int, grid: RadiusGrid,
                     T: np.ndarray | None = None, divisor: Divisor | None = None,
                     tol: float = DEFAULT_TOL) -> DefectResult:
    """``1 - limsup N^{[trunc]}_{Q(f)} / (deg Q * T_f)``, limsup read off the
    last third of the grid."""
    if T is None:
        T, _ = characteristic_series(F, grid, tol)
    if essential_singularity_test(F, grid, T).tail_slope < 1e-6:
        raise ExtendableCurve("T_f stays bounded on the grid: extendable curve, defect undefined")
    if divisor is None:
        divisor = hypersurface_divisors(F, [Q], grid.s, grid.r_max)[0]
    Nt = counting_series(divisor, grid, truncation)
    ratios = Nt / (Q.degree * T)
    sup = float(np.max(ratios[grid.tail()]))
    raw = 1.0 - sup
    val = min(1.0, max(0.0, raw))
    return DefectResult(val, sup, val != raw, list(map(float, ratios)))


@dataclass
class DefectSumReport:
    defects: list
    total: float
    bound: Fraction
    verdict: str
    note: str = ""

    def to_json(self) -> dict:
        obj = dict(self.__dict__)
        obj["bound"] = str(self.bound)
        obj["defects"] = [d.to_json() for d in self.defects]
        return obj


def defect_sum_bound(cfg: PositionConfig) -> Fraction:
    H = cfg.basis.M + 1
    return Fraction((2 * cfg.N - cfg.k + 1) * H, cfg.k + 1)


def defect_sum_check(F: CurveRep, cfg: PositionConfig, grid: RadiusGrid, tolerance: float = 0.02,
                     divisors: list | None = None, tol: float = DEFAULT_TOL) -> DefectSumReport:
    T, _ = characteristic_series(F, grid, tol)
    ess = essential_singularity_test(F, grid, T)
    bound = defect_sum_bound(cfg)
    if ess.verdict != "ESSENTIAL":
        return DefectSumReport([], 0.0, bound, "SKIPPED", f"growth test says {ess.verdict}")
    M = cfg.basis.M
    divs = divisors if divisors is not None else hypersurface_divisors(F, cfg.original, grid.s, grid.r_max)
    defects = [truncated_defect(F, P, M, grid, T, nu) for P, nu in zip(cfg.original, divs)]
    total = float(sum(d.value for d in defects))
    verdict = "PASS" if total <= float(bound) + tolerance else "FAIL"
    return DefectSumReport(defects, total, bound, verdict)
