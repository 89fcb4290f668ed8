"""Contact-function inequalities and negatively curved pseudo-metrics.

Everything here is evaluated in log space: the derived-curve norms of even a
modest exponential curve overflow a double long before the radii of interest.
Laplacians are five-point stencils at spacing ``h`` and ``h/2``; the difference
of the two is the discretization error estimate, and the Richardson
combination is the reported value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .curves import CurveRep, compose_with_polynomial
from .exact import coprime_basis, order_at_factor, utrim
from .nevanlinna import DegenerateCurveError
from .position import NochkaWeights, PositionConfig
from .wronskian import basis_composition, contact_log, derived_curves, unit_coordinates, wronskian

DEFAULT_DELTA = 4.0
PASS_FRACTION = 0.99
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ContactConstants:
    M: int

    @property
    def sigma(self) -> list[int]:
        return [p * (p + 1) // 2 for p in range(self.M + 2)]

    @property
    def tau(self) -> list[int]:
        """``tau[m - 1]`` is the sum of ``sigma_1..sigma_m``."""
        out, acc = [], 0
        for p in range(1, self.M + 1):
            acc += self.sigma[p]
            out.append(acc)
        return out

    @property
    def tau_M(self) -> int:
        return self.tau[-1] if self.M else 0

    def identities_hold(self) -> bool:
        s = self.sigma
        return (s[0] == 0
                and all(s[p + 1] - s[p] == p + 1 for p in range(self.M + 1))
                and self.tau_M == sum(s[1:self.M + 1])
                # closed form of the tetrahedral numbers
                and self.tau_M == self.M * (self.M + 1) * (self.M + 2) // 6)


# ---------------------------------------------------------------------------
# per-scenario contact data
# ---------------------------------------------------------------------------

@dataclass
class ContactData:
    """A curve, a configuration and the derived curves at every level."""
    F: CurveRep
    cfg: PositionConfig
    omegas: list[Fraction]

    def __post_init__(self):
        if len(self.omegas) != self.cfg.q:
            raise ValueError("one weight per hypersurface")

    @cached_property
    def derived(self) -> dict:
        D = derived_curves(self.F, self.cfg.basis)
        if D[self.M].is_identically_zero():
            raise DegenerateCurveError("top derived curve vanishes identically")
        return D

    @property
    def M(self) -> int:
        return self.cfg.basis.M

    @property
    def q(self) -> int:
        return self.cfg.q

    @cached_property
    def unit_coords(self) -> list[np.ndarray]:
        return [unit_coordinates(self.cfg.basis, Q) for Q in self.cfg.hypersurfaces]

    @cached_property
    def constants(self) -> ContactConstants:
        return ContactConstants(self.M)

    def log_norm(self, p: int, z) -> np.ndarray:
        """``log |F_p|``."""
        return self.derived[p].log_norm(z)

    def log_phi(self, p: int, j: int, z) -> np.ndarray:
        return contact_log(self.derived[p], self.unit_coords[j], z)

    def log_Q(self, j: int, z) -> np.ndarray:
        """``log |F_0(Q_j)|``: ``Q_j(F)`` with unit-length coordinates."""
        return self.log_phi(0, j, z) + self.log_norm(0, z)

    def log_curve_norm(self, z) -> np.ndarray:
        """``log ||F||`` of the original curve."""
        return self.F.log_norm(z)


def contact_data(F: CurveRep, cfg: PositionConfig, weights: NochkaWeights | Sequence | None = None) -> ContactData:
    if weights is None:
        omegas = [Fraction(1)] * cfg.q
    elif isinstance(weights, NochkaWeights):
        omegas = list(weights.omegas)
    else:
        omegas = [Fraction(w) for w in weights]
    return ContactData(F, cfg, omegas)


@dataclass
class SampleSet:
    points: np.ndarray
    h: float
    dropped: int = 0

    @classmethod
    def build(cls, points, h: float, zeros: Sequence[complex] = ()) -> "SampleSet":
        pts = np.asarray(points, dtype=complex).ravel()
        if len(zeros):
            zs = np.asarray(list(zeros), dtype=complex)
            dist = np.min(np.abs(pts[:, None] - zs[None, :]), axis=1)
            keep = dist > 10 * h
        else:
            keep = np.ones(pts.shape, dtype=bool)
        return cls(pts[keep], h, int(np.sum(~keep)))

    @classmethod
    def disk_grid(cls, R: float, count: int, h: float, zeros: Sequence[complex] = (), fill: float = 0.95) -> "SampleSet":
        """Square grid of ``count x count`` points clipped to ``|z| < fill*R``."""
        x = np.linspace(-fill * R, fill * R, count)
        g = (x[None, :] + 1j * x[:, None]).ravel()
        g = g[np.abs(g) < fill * R]
        return cls.build(g, h, zeros)

    @classmethod
    def random_disk(cls, R: float, count: int, h: float, seed: int = 0,
                    zeros: Sequence[complex] = (), fill: float = 0.95) -> "SampleSet":
        rng = np.random.default_rng(seed)
        rad = fill * R * np.sqrt(rng.random(count))
        ang = 2 * np.pi * rng.random(count)
        return cls.build(rad * np.exp(1j * ang), h, zeros)


# ---------------------------------------------------------------------------
# Phi and the sum-to-product inequality
# ---------------------------------------------------------------------------

class ExcludedPoint(ValueError):
    """The contact function vanishes at the requested point."""


def _log_Phi(log_phi_p, log_phi_next, delta: float):
    return log_phi_next - log_phi_p - 2 * np.log(np.log(delta) - log_phi_p)


def phi_jp(data: ContactData, p: int, j: int, z, delta: float = DEFAULT_DELTA) -> float:
    if delta <= 1:
        raise ValueError("delta must exceed 1")
    if not 0 <= p < data.M:
        raise ValueError(f"level {p} outside 0..{data.M - 1}")
    lp = float(data.log_phi(p, j, z))
    if lp == -math.inf:
        raise ExcludedPoint(f"phi_{p}(Q_{j}) vanishes at {z}")
    return math.exp(_log_Phi(lp, float(data.log_phi(p + 1, j, z)), delta))


@dataclass
class SumToProductReport:
    p: int
    delta: float
    constant: float
    samples: int
    excluded: int
    verdict: str
    rows: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"p": self.p, "delta": self.delta, "constant": self.constant,
                "samples": self.samples, "excluded": self.excluded, "verdict": self.verdict}


def sum_to_product_check(data: ContactData, samples: SampleSet, p: int,
                         delta: float = DEFAULT_DELTA) -> SumToProductReport:
    """Lower estimate of the constant in
    ``sum_j w_j Phi_jp >= C (prod_j Phi_jp^w_j)^(1/(M-p))``."""
    M = data.M
    if not 0 <= p <= M - 1:
        raise ValueError(f"level {p} outside 0..{M - 1}")
    z = samples.points
    w = np.array([float(x) for x in data.omegas])
    logs = np.array([_log_Phi(data.log_phi(p, j, z), data.log_phi(p + 1, j, z), delta)
                     for j in range(data.q)])
    ok = np.all(np.isfinite(logs), axis=0)
    if not np.any(ok):
        raise ValueError("no samples left after exclusions")
    logs = logs[:, ok]
    top = logs.max(axis=0)
    log_lhs = top + np.log(np.sum(w[:, None] * np.exp(logs - top), axis=0))
    log_rhs = (w @ logs) / (M - p)
    ratio = log_lhs - log_rhs
    C = float(np.exp(ratio.min()))
    rows = [(zz.real, zz.imag, float(a), float(b), float(a - b), "PASS" if C > 0 else "FAIL")
            for zz, a, b in zip(z[ok], log_lhs, log_rhs)]
    return SumToProductReport(p, delta, C, int(ok.sum()), int((~ok).sum()),
                              "PASS" if C > 0 else "FAIL", rows)


# ---------------------------------------------------------------------------
# divisor inequality (exact)
# ---------------------------------------------------------------------------

class RestrictedMode(ValueError):
    """Exact zero orders need polynomial components."""


@dataclass
class DivisorPoint:
    factor: list  # monic square-free polynomial (ascending coefficients) whose roots share the orders
    roots: list[complex]
    order_W: int
    orders_Q: list[int]
    value: Fraction

    @property
    def ok(self) -> bool:
        return self.value >= 0

    def to_json(self) -> dict:
        return {"roots": [[r.real, r.imag] for r in self.roots], "order_W": self.order_W,
                "orders_Q": self.orders_Q, "value": str(self.value), "verdict": "PASS" if self.ok else "FAIL"}


@dataclass
class DivisorReport:
    points: list[DivisorPoint]
    M: int

    @property
    def verdict(self) -> str:
        if not self.points:
            return "VACUOUS"
        return "PASS" if all(pt.ok for pt in self.points) else "FAIL"

    def to_json(self) -> dict:
        return {"M": self.M, "verdict": self.verdict, "points": [p.to_json() for p in self.points]}


def _roots(poly) -> list[complex]:
    coeffs = [complex(c) for c in reversed(poly)]
    return sorted((complex(r) for r in np.roots(coeffs)), key=lambda r: (r.real, r.imag))


def divisor_inequality_check(F: CurveRep, cfg: PositionConfig, omegas: Sequence) -> DivisorReport:
    """At every zero of ``prod Q_j(F)``:
    ``ord W - sum w_j ord Q_j(F) + sum w_j min(ord Q_j(F), M) >= 0``
    in exact rational arithmetic, where ``W`` is the top Wronskian."""
    if not F.is_polynomial():
        raise RestrictedMode("exact orders need polynomial components")
    omegas = [Fraction(w) for w in omegas]
    M = cfg.basis.M
    W = utrim(wronskian(basis_composition(F, cfg.basis)).polynomial_part())
    if not W:
        raise DegenerateCurveError("top Wronskian vanishes identically")
    Qs = [utrim(compose_with_polynomial(Q, F).polynomial_part()) for Q in cfg.hypersurfaces]
    if any(not P for P in Qs):
        raise DegenerateCurveError("some Q_j(F) vanishes identically")
    points = []
    for g in coprime_basis([P for P in Qs if len(P) > 1]):
        oq = [order_at_factor(P, g) for P in Qs]
        if not any(oq):
            continue
        ow = order_at_factor(W, g)
        value = ow - sum(w * o for w, o in zip(omegas, oq)) + sum(w * min(o, M) for w, o in zip(omegas, oq))
        points.append(DivisorPoint(g, _roots(g), ow, oq, value))
    return DivisorReport(points, M)


# ---------------------------------------------------------------------------
# Schwarz bound
# ---------------------------------------------------------------------------

def poincare_density(R: float, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return 2 * R / (R * R - np.abs(z) ** 2)


@dataclass
class SchwarzReport:
    R: float
    max_ratio: float
    failures: list
    verdict: str

    def to_json(self) -> dict:
        return {"R": self.R, "max_ratio": self.max_ratio, "failures": self.failures, "verdict": self.verdict}


def schwarz_bound_check(values, points, R: float, rtol: float = 1e-12) -> SchwarzReport:
    v = np.asarray(values, dtype=float)
    z = np.asarray(points, dtype=complex)
    if np.any(np.abs(z) >= R):
        raise ValueError("sample outside the disk")
    bound = poincare_density(R, z)
    ratio = v / bound
    bad = ratio > 1 + rtol
    fails = [[p.real, p.imag, float(r)] for p, r in zip(z[bad], ratio[bad])]
    return SchwarzReport(R, float(ratio.max()) if ratio.size else 0.0, fails, "FAIL" if fails else "PASS")


# ---------------------------------------------------------------------------
# finite-difference Laplacians and curvature
# ---------------------------------------------------------------------------

@dataclass
class Laplacian:
    value: np.ndarray   # Richardson combination of the h and h/2 stencils
    coarse: np.ndarray
    fine: np.ndarray
    error: np.ndarray   # |fine - coarse| / 3 plus a rounding floor

    @property
    def tolerance(self) -> np.ndarray:
        return 10 * self.error


def _stencil(u: Callable, z: np.ndarray, h: float):
    c = u(z)
    s = u(z + h) + u(z - h) + u(z + 1j * h) + u(z - 1j * h)
    mag = np.maximum(np.abs(c), np.abs(s) / 4)
    return (s - 4 * c) / (h * h), 8 * _EPS * mag / (h * h)


def laplacian(u: Callable, points, h: float) -> Laplacian:
    z = np.asarray(points, dtype=complex)
    coarse, r1 = _stencil(u, z, h)
    fine, r2 = _stencil(u, z, h / 2)
    err = np.abs(fine - coarse) / 3 + r1 + r2
    return Laplacian(fine + (fine - coarse) / 3, coarse, fine, err)


@dataclass
class CurvatureReport:
    C: float
    fraction: float
    failures: list
    verdict: str
    fitted: bool
    rows: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"C": self.C, "fraction": self.fraction, "fitted": self.fitted,
                "failures": self.failures[:20], "failure_count": len(self.failures), "verdict": self.verdict}


def curvature_negativity_check(log_lambda: Callable, samples: SampleSet, C: float | None = None,
                               quantile: float = 0.01) -> CurvatureReport:
    """Check ``Lap log lambda >= C lambda^2`` at 99% of the samples.

    With ``C=None`` the constant is fitted as half the ``quantile`` of the
    observed ratio; a non-positive fit is reported as FAIL (no negative
    curvature bound exists).
    """
    z = samples.points
    L = laplacian(log_lambda, z, samples.h)
    lam2 = np.exp(2 * log_lambda(z))
    fitted = C is None
    if fitted:
        C = float(0.5 * np.quantile(L.value / lam2, quantile))
    rhs = C * lam2
    margin = L.value - rhs
    ok = margin >= -L.tolerance
    frac = float(np.mean(ok))
    fails = [[p.real, p.imag, float(m)] for p, m in zip(z[~ok], margin[~ok])]
    rows = [(p.real, p.imag, float(a), float(b), float(m), "PASS" if k else "FAIL")
            for p, a, b, m, k in zip(z, L.value, rhs, margin, ok)]
    if C <= 0:
        verdict = "FAIL"
    elif np.mean(L.error > np.abs(rhs)) > 1 - PASS_FRACTION:
        verdict = "INCONCLUSIVE"
    else:
        verdict = "PASS" if frac >= PASS_FRACTION else "FAIL"
    return CurvatureReport(C, frac, fails, verdict, fitted, rows)


@dataclass
class CalibrationReport:
    R: float
    h: float
    max_relative_error: float
    curvature: CurvatureReport

    def to_json(self) -> dict:
        return {"R": self.R, "h": self.h, "max_relative_error": self.max_relative_error,
                "curvature": self.curvature.to_json()}


def poincare_calibration(R: float = 1.0, count: int = 21, fill: float = 0.9) -> CalibrationReport:
    """The Poincare density satisfies ``Lap log lambda = lambda^2`` exactly."""
    h = 1e-3 * R
    samples = SampleSet.disk_grid(R, count, h, fill=fill)
    u = lambda z: np.log(poincare_density(R, z))  # noqa: E731
    L = laplacian(u, samples.points, h)
    lam2 = poincare_density(R, samples.points) ** 2
    rel = float(np.max(np.abs(L.value - lam2) / lam2))
    return CalibrationReport(R, h, rel, curvature_negativity_check(u, samples, C=1.0))


def flat_control(count: int = 11) -> CurvatureReport:
    samples = SampleSet.disk_grid(1.0, count, 1e-3)
    return curvature_negativity_check(lambda z: np.zeros(np.shape(z)), samples)


# ---------------------------------------------------------------------------
# the derived-norm inequality
# ---------------------------------------------------------------------------

@dataclass
class DerivedNormReport:
    fraction: float
    failures: list
    verdict: str
    rows: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"fraction": self.fraction, "failures": self.failures[:20],
                "failure_count": len(self.failures), "verdict": self.verdict}


def derived_norm_sides(data: ContactData, samples: SampleSet) -> tuple[Laplacian, np.ndarray]:
    """Finite-difference ``Lap log prod_{p<M} |F_p|^2`` and the density
    ``4 (tau_M/sigma_M) (prod_{p<=M} |F_p|^2 / |F_0|^(2 sigma_{M+1}))^(1/tau_M)``."""
    M = data.M
    if M < 1:
        raise ValueError("need M >= 1")
    cc = data.constants
    lhs = laplacian(lambda z: 2 * sum(data.log_norm(p, z) for p in range(M)), samples.points, samples.h)
    z = samples.points
    logs = [data.log_norm(p, z) for p in range(M + 1)]
    expo = (2 * sum(logs) - 2 * cc.sigma[M + 1] * logs[0]) / cc.tau_M
    rhs = 4 * cc.tau_M / cc.sigma[M] * np.exp(expo)
    return lhs, rhs


def derived_norm_inequality_check(data: ContactData, samples: SampleSet) -> DerivedNormReport:
    for p in range(data.M + 1):
        if data.derived[p].is_identically_zero():
            raise DegenerateCurveError(f"|F_{p}| vanishes identically")
    lhs, rhs = derived_norm_sides(data, samples)
    margin = lhs.value - rhs
    ok = margin >= -lhs.tolerance
    z = samples.points
    fails = [[p.real, p.imag, float(m)] for p, m in zip(z[~ok], margin[~ok])]
    rows = [(p.real, p.imag, float(a), float(b), float(m), "PASS" if k else "FAIL")
            for p, a, b, m, k in zip(z, lhs.value, rhs, margin, ok)]
    frac = float(np.mean(ok))
    return DerivedNormReport(frac, fails, "PASS" if frac >= PASS_FRACTION else "FAIL", rows)


# ---------------------------------------------------------------------------
# the negatively curved pseudo-metric eta
# ---------------------------------------------------------------------------

class HypothesisViolation(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x).limit_denominator(10**12) if isinstance(x, float) else Fraction(x)


@dataclass
class MainLemmaParams:
    eta: list
    omegas: list
    epsilon: Fraction
    M: int
    d: int = 1
    delta: float = DEFAULT_DELTA
    k_funcs: list | None = None  # log k_j as callables; None means k_j = 1

    def __post_init__(self):
        self.eta = [_frac(e) for e in self.eta]
        self.omegas = [_frac(w) for w in self.omegas]
        self.epsilon = _frac(self.epsilon)
        if len(self.eta) != len(self.omegas):
            raise ValueError("one eta per weight")
        if any(e <= 0 for e in self.eta) or self.epsilon <= 0:
            raise ValueError("eta_j and epsilon must be positive")
        if self.delta <= 1:
            raise ValueError("delta must exceed 1")
        lhs, rhs = self.gamma, self.epsilon * self.threshold_factor
        if not lhs > rhs:
            raise HypothesisViolation(
                f"gamma = {lhs} must exceed epsilon*(sigma_(M+1) + sum eta_j/q) = {rhs}")

    @property
    def q(self) -> int:
        return len(self.eta)

    @property
    def constants(self) -> ContactConstants:
        return ContactConstants(self.M)

    @property
    def gamma(self) -> Fraction:
        return sum((w * (1 - e) for w, e in zip(self.omegas, self.eta)), Fraction(0)) - self.M - 1

    @property
    def threshold_factor(self) -> Fraction:
        return self.constants.sigma[self.M + 1] + sum(self.eta, Fraction(0)) / self.q

    @property
    def exponent(self) -> Fraction:
        """``sigma_M + epsilon tau_M``."""
        cc = self.constants
        return cc.sigma[self.M] + self.epsilon * cc.tau_M

    @property
    def h(self) -> Fraction:
        return self.d * self.gamma - self.epsilon * self.d * self.threshold_factor

    @property
    def rho_applicable(self) -> bool:
        return self.h > self.exponent

    @property
    def rho(self) -> Fraction | None:
        return self.exponent / self.h if self.rho_applicable else None

    @property
    def rho_star(self) -> Fraction | None:
        if not self.rho_applicable:
            return None
        return 1 / ((1 - self.rho) * self.h)

    def rho_star_closed_form(self) -> Fraction | None:
        if not self.rho_applicable:
            return None
        cc = self.constants
        return 1 / (self.d * self.gamma - cc.sigma[self.M]
                    - self.epsilon * (self.d * cc.sigma[self.M + 1] + cc.tau_M
                                      + self.d * sum(self.eta, Fraction(0)) / self.q))

    def to_json(self) -> dict:
        return {"eta": [str(e) for e in self.eta], "omegas": [str(w) for w in self.omegas],
                "epsilon": str(self.epsilon), "M": self.M, "d": self.d, "delta": self.delta,
                "gamma": str(self.gamma), "exponent": str(self.exponent),
                "rho": None if self.rho is None else str(self.rho),
                "rho_star": None if self.rho_star is None else str(self.rho_star)}


def _log_h(data: ContactData, params: MainLemmaParams, j: int, z) -> np.ndarray:
    out = float(params.d * params.eta[j]) * data.log_curve_norm(z)
    if params.k_funcs is not None:
        out = out + params.k_funcs[j](z)
    return out


def _check_params(data: ContactData, params: MainLemmaParams):
    if params.M != data.M or params.q != data.q:
        raise ValueError("parameters do not match the scenario")


def lemma_log_eta(data: ContactData, params: MainLemmaParams, z) -> np.ndarray:
    """``log`` of the continuous negatively curved pseudo-metric density
    (the one with the ``log(delta/phi)`` factors and exponent
    ``1/(sigma_M + epsilon tau_M)``)."""
    _check_params(data, params)
    z = np.asarray(z, dtype=complex)
    M, q = data.M, data.q
    eps = float(params.epsilon)
    a0 = float(params.gamma - params.epsilon * params.threshold_factor)
    top = a0 * data.log_norm(0, z) + data.log_norm(M, z) + eps * sum(data.log_norm(p, z) for p in range(M + 1))
    for j in range(q):
        top = top + float(params.omegas[j] + params.epsilon / q) * _log_h(data, params, j, z)
    bottom = 0.0
    logd = math.log(params.delta)
    for j in range(q):
        acc = data.log_Q(j, z)
        for p in range(M):
            acc = acc + np.log(logd - data.log_phi(p, j, z))
        bottom = bottom + float(params.omegas[j]) * acc
    return (top - bottom) / float(params.exponent)


def main_lemma_log_eta(data: ContactData, params: MainLemmaParams, z) -> np.ndarray:
    """``log eta`` for the quantity bounded by a multiple of the Poincare
    density raised to ``sigma_M + epsilon tau_M``."""
    _check_params(data, params)
    z = np.asarray(z, dtype=complex)
    M, q = data.M, data.q
    eps = float(params.epsilon)
    a0 = float(params.gamma - params.epsilon * params.threshold_factor)
    out = a0 * data.log_norm(0, z) + (1 + eps) * data.log_norm(M, z)
    for j in range(q):
        out = out + float(params.omegas[j] + params.epsilon / q) * _log_h(data, params, j, z)
        out = out - float(params.omegas[j]) * data.log_Q(j, z)
        for p in range(M):
            out = out + eps / q * (data.log_phi(p, j, z) + data.log_norm(p, z))
    return out


def main_lemma_eta(data: ContactData, params: MainLemmaParams, z) -> float:
    return float(np.exp(main_lemma_log_eta(data, params, z)))


@dataclass
class MainLemmaBoundReport:
    R: float
    log_C: float
    ring_log_ratios: list
    boundary_slope: float
    verdict: str

    def to_json(self) -> dict:
        return {"R": self.R, "log_C": self.log_C, "ring_log_ratios": self.ring_log_ratios,
                "boundary_slope": self.boundary_slope, "verdict": self.verdict}


def main_lemma_bound_check(data: ContactData, params: MainLemmaParams, R: float,
                           rings: int = 12, per_ring: int = 64) -> MainLemmaBoundReport:
    """Fit ``C`` in ``eta <= C (2R/(R^2-|z|^2))^(sigma_M+eps tau_M)`` on rings
    approaching ``|z| = R``.

    The fitted ``C`` is the maximum observed ratio. PASS needs it finite and
    the log ratio non-increasing in ``log lambda`` over the outer half of the
    rings: a ratio that grows like ``lambda^a`` towards ``|z| = R`` gives
    slope ``a > 0`` and no uniform ``C`` exists.
    """
    radii = R * (1 - np.logspace(-0.3, -6, rings))
    th = 2 * np.pi * (np.arange(per_ring) + 0.5) / per_ring
    expo = float(params.exponent)
    out = []
    for r in radii:
        z = r * np.exp(1j * th)
        lr = main_lemma_log_eta(data, params, z) - expo * np.log(poincare_density(R, z))
        out.append(float(np.max(lr)))
    log_C = max(out)
    outer = slice(rings // 2, rings)
    log_lam = np.log(poincare_density(R, radii))
    slope = float(np.polyfit(log_lam[outer], np.array(out)[outer], 1)[0]) if math.isfinite(log_C) else math.inf
    verdict = "PASS" if math.isfinite(log_C) and slope <= 1e-6 else "FAIL"
    return MainLemmaBoundReport(R, log_C, out, slope, verdict)


def pseudo_metric_schwarz(data: ContactData, params: MainLemmaParams, samples: SampleSet, R: float) -> SchwarzReport:
    """Schwarz bound for ``sqrt(C2) eta`` where ``C2`` is the fitted constant of
    ``Lap log eta >= C2 eta^2``."""
    u = lambda z: lemma_log_eta(data, params, z)  # noqa: E731
    curv = curvature_negativity_check(u, samples)
    if curv.C <= 0:
        return SchwarzReport(R, math.inf, [], "FAIL")
    v = math.sqrt(curv.C) * np.exp(u(samples.points))
    return schwarz_bound_check(v, samples.points, R)
