"""Minimal surfaces through their Gauss maps.

A surface is stored by the holomorphic derivatives ``G_z = (dx_0/dz, ...)``
on one chart.  Two chart kinds are used:

``disk``
    a simply connected parameter domain (the plane ``C``);
``cylinder``
    ``C`` modulo ``2 pi i``; components must be Laurent polynomials in
    ``w = e^z`` so that intersection counts reduce to roots in ``w``.

Total curvature uses ``K dA = -Lap log ||G_z|| dx dy`` and the divergence
theorem, so only first derivatives on the boundary of the exhaustion are
ever evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .curves import CurveRep, ExpPoly, Region, compose_with_polynomial, parse_exppoly, reduce_polynomial_curve
from .exact import GaussQ, I, ONE, ZERO, gq, squarefree_decomposition, utrim
from .nevanlinna import DegenerateCurveError
from .poly import QuotientBasis, VarietyPresentation, projective_space
from .position import PositionConfig
from .quadrature import adaptive_mean
from .wronskian import nondegeneracy_witness
from .zeros import argument_principle_count, zeros_on_annulus

CHARTS = ("disk", "cylinder")
SNAP = 1e-3


class NotMinimal(ValueError):
    """The quadric identity ``sum (dx_i/dz)^2 = 0`` fails."""


class BranchPoint(ValueError):
    pass


@dataclass
class MinimalSurface:
    name: str
    derivatives: list  # ExpPoly components of G_z
    chart: str = "disk"
    weierstrass: dict | None = None
    known_total_curvature: float | None = None  # catalogue annotation, never used by the computations

    def __post_init__(self):
        self.derivatives = [d if isinstance(d, ExpPoly) else parse_exppoly(str(d)) for d in self.derivatives]
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart {self.chart!r}")
        if self.chart == "cylinder":
            for d in self.derivatives:
                _laurent(d)

    @property
    def n(self) -> int:
        return len(self.derivatives) - 1

    def quadric(self) -> ExpPoly:
        acc = ExpPoly()
        for d in self.derivatives:
            acc = acc + d * d
        return acc

    def is_minimal(self) -> bool:
        return self.quadric().is_zero()

    def reparametrized(self, c) -> "MinimalSurface":
        """Chart ``z = c xi``: ``G_xi(xi) = c G_z(c xi)``."""
        c = gq(c)
        return MinimalSurface(f"{self.name}@{c}", [d.substitute_scale(c).scale(c) for d in self.derivatives],
                              self.chart, None, self.known_total_curvature)

    def to_json(self) -> dict:
        obj = {"name": self.name, "chart": self.chart, "derivatives": [str(d) for d in self.derivatives]}
        if self.weierstrass:
            obj["weierstrass"] = dict(self.weierstrass)
        if self.known_total_curvature is not None:
            obj["known_total_curvature"] = self.known_total_curvature
        return obj

    @classmethod
    def from_json(cls, obj) -> "MinimalSurface":
        if "weierstrass" in obj and "derivatives" not in obj:
            w = obj["weierstrass"]
            return from_weierstrass(obj["name"], w["f"], w["g"], obj.get("chart", "disk"),
                                    obj.get("known_total_curvature"))
        return cls(obj["name"], list(obj["derivatives"]), obj.get("chart", "disk"),
                   obj.get("weierstrass"), obj.get("known_total_curvature"))


def _laurent(f: ExpPoly) -> dict[int, GaussQ]:
    """``f`` as ``sum c_m e^(m z)`` with integer ``m`` and constant ``c_m``."""
    out = {}
    for lam, p in f.terms.items():
        if lam.im != 0 or lam.re.denominator != 1 or len(utrim(p)) > 1:
            raise ValueError("cylinder-chart components must be Laurent polynomials in e^z")
        out[int(lam.re)] = p[0]
    return out


def from_weierstrass(name: str, f, g, chart: str = "disk", known_total_curvature: float | None = None) -> MinimalSurface:
    """Surface in ``R^3`` from data ``(f, g)``:
    ``G = (f(1-g^2)/2, i f(1+g^2)/2, f g)``."""
    fs = f if isinstance(f, ExpPoly) else parse_exppoly(str(f))
    gs = g if isinstance(g, ExpPoly) else parse_exppoly(str(g))
    half = GaussQ(Fraction(1, 2))
    g2 = gs * gs
    comps = [(fs * (ExpPoly.const(ONE) - g2)).scale(half),
             (fs * (ExpPoly.const(ONE) + g2)).scale(I * half),
             fs * gs]
    return MinimalSurface(name, comps, chart, {"f": str(f), "g": str(g)}, known_total_curvature)


def catalogue() -> dict[str, MinimalSurface]:
    return {
        "plane": from_weierstrass("plane", "1", "0", "disk", 0.0),
        "enneper": from_weierstrass("enneper", "1", "z", "disk", -4 * math.pi),
        "catenoid": from_weierstrass("catenoid", "exp(-z)", "exp(z)", "cylinder", -4 * math.pi),
        # the helicoid's parameter plane is simply connected, so it keeps the disk chart
        "helicoid": from_weierstrass("helicoid", "I*exp(-z)", "exp(z)", "disk", -math.inf),
    }


# ---------------------------------------------------------------------------
# Gauss map and metric
# ---------------------------------------------------------------------------

def gauss_map(surface: MinimalSurface, target: VarietyPresentation | None = None) -> CurveRep:
    q = surface.quadric()
    if not q.is_zero():
        raise NotMinimal(f"sum (dx_i/dz)^2 = {q} is not identically zero")
    comps = reduce_polynomial_curve(surface.derivatives)
    return CurveRep(comps, Region.disk(math.inf), target, surface.name)


def induced_metric_density(surface: MinimalSurface, z) -> np.ndarray:
    """``2 ||G_z(z)||^2``; raises :class:`BranchPoint` where it vanishes."""
    z = np.asarray(z, dtype=complex)
    vals = np.stack([np.asarray(d.evaluate(z)) for d in surface.derivatives])
    dens = 2 * np.sum(np.abs(vals) ** 2, axis=0)
    if np.any(dens == 0):
        raise BranchPoint("||G_z|| vanishes")
    return dens


def induced_metric_density_exact(surface: MinimalSurface, z) -> Fraction:
    """Exact density at a Gaussian-rational point (polynomial data only)."""
    if not all(d.is_polynomial() for d in surface.derivatives):
        raise ValueError("exact evaluation needs polynomial data")
    return 2 * sum((d.evaluate_exact(z).abs2() for d in surface.derivatives), Fraction(0))


# ---------------------------------------------------------------------------
# total curvature
# ---------------------------------------------------------------------------

def _grad_log_norm(G: Sequence[ExpPoly], dG: Sequence[ExpPoly], z: np.ndarray) -> np.ndarray:
    """``2 d/dz log ||G|| = sum conj(G_i) G_i' / ||G||^2`` (complex)."""
    live = [f for f in list(G) + list(dG) if not f.is_zero()]
    s = np.max([f.shift(z) for f in live], axis=0)
    vals = [f.shifted(z, s) for f in G]
    ders = [f.shifted(z, s) if not f.is_zero() else np.zeros(z.shape, dtype=complex) for f in dG]
    num = sum(np.conj(v) * d for v, d in zip(vals, ders))
    den = sum(np.abs(v) ** 2 for v in vals)
    return num / den


def curvature_flux(surface: MinimalSurface, size: float, tol: float = 1e-12) -> float:
    """``-integral of Lap log ||G_z||`` over the exhaustion piece of the given
    size: the disk ``|z| < size`` or the cylinder slab ``|Re z| < size``."""
    G = surface.derivatives
    dG = [g.derivative() for g in G]
    if all(d.is_zero() for d in dG):
        return 0.0
    if surface.chart == "disk":
        def radial(th):
            e = np.exp(1j * th)
            return np.real(e * _grad_log_norm(G, dG, size * e))
        res = adaptive_mean(radial, 0.0, 2 * np.pi, tol / (2 * np.pi * size))
        return -2 * np.pi * size * res.value

    def across(x):
        def fx(y):
            return np.real(_grad_log_norm(G, dG, x + 1j * y))
        return adaptive_mean(fx, 0.0, 2 * np.pi, tol / (4 * np.pi)).value
    return -2 * np.pi * (across(size) - across(-size))


@dataclass
class TotalCurvature:
    value: float | None
    verdict: str  # "CONVERGED", "INFINITE", "UNKNOWN"
    sweep: list
    degree: float | None
    degree_snapped: int | None

    def to_json(self) -> dict:
        return {"value": self.value, "verdict": self.verdict, "sweep": self.sweep,
                "degree": self.degree, "degree_snapped": self.degree_snapped}


def total_curvature(surface: MinimalSurface, start: float | None = None, factor: float = 2.0,
                    steps: int = 16, tol: float = 1e-6) -> TotalCurvature:
    """Sweep the exhaustion size geometrically until successive values agree
    to ``tol / 10``.

    ``degree`` is ``-value / 2 pi`` (the degree of the generalized Gauss map),
    snapped to an integer when within 1e-3.  Growth that does not slow down
    over the last three steps is reported as INFINITE.
    """
    if start is None:
        start = 1.0 if surface.chart == "disk" else 0.5
    sweep = []
    size = start
    prev = None
    incs = []
    for _ in range(steps):
        v = curvature_flux(surface, size, tol=tol * 1e-3)
        sweep.append([size, v])
        if prev is not None:
            incs.append(abs(v - prev))
            if incs[-1] <= tol / 10:
                deg = -v / (2 * np.pi)
                snap = round(deg) if abs(deg - round(deg)) < SNAP else None
                return TotalCurvature(v, "CONVERGED", sweep, deg, snap)
        prev = v
        size *= factor
    if len(incs) >= 3 and all(incs[i + 1] >= 0.5 * incs[i] for i in range(len(incs) - 3, len(incs) - 1)):
        return TotalCurvature(None, "INFINITE", sweep, None, None)
    return TotalCurvature(None, "UNKNOWN", sweep, None, None)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

@dataclass
class BoundReport:
    N: int
    k: int
    d: int
    M: int
    q: int
    B1: Fraction
    B2: Fraction
    product_form: Fraction

    @property
    def forms_agree(self) -> bool:
        return self.B1 == self.product_form

    @property
    def q_exceeds(self) -> bool:
        return self.q > self.B1

    def to_json(self) -> dict:
        return {"N": self.N, "k": self.k, "d": self.d, "M": self.M, "q": self.q,
                "B1": str(self.B1), "B2": str(self.B2), "product_form": str(self.product_form),
                "forms_agree": self.forms_agree, "q_exceeds_B1": self.q_exceeds}


def bound_evaluator(N: int, k: int, d: int, M: int, q: int) -> BoundReport:
    if not (N >= k >= 1 and d >= 1 and M >= k and q >= 1):
        raise ValueError("need N >= k >= 1, d >= 1, M >= k, q >= 1")
    c = Fraction(2 * N - k + 1, k + 1)
    B1 = c * (M + 1) + c * Fraction(M * (M + 1), 2 * d)
    B2 = c * (M + 1) + c * Fraction(M * (M + 1), d)
    prod = c * Fraction((M + 1) * (M + 2 * d), 2 * d)
    return BoundReport(N, k, d, M, q, B1, B2, prod)


# ---------------------------------------------------------------------------
# ramification and the finite-curvature criterion
# ---------------------------------------------------------------------------

@dataclass
class RamificationWitness:
    bound: Fraction | None
    m_claimed: int | float
    m_observed: int | float
    certificate: str  # "exact" or "numeric"
    offending_zero: complex | None = None

    def to_json(self) -> dict:
        return {"bound": None if self.bound is None else str(self.bound), "m_claimed": _inf(self.m_claimed),
                "m_observed": _inf(self.m_observed), "certificate": self.certificate,
                "offending_zero": None if self.offending_zero is None else [self.offending_zero.real,
                                                                            self.offending_zero.imag]}


def _inf(x):
    return "inf" if x == math.inf else x


def _zero_orders(f: ExpPoly, outside: float | None, radius: float) -> tuple[list, str]:
    """``[(zero, order)]`` of ``f`` with ``outside < |z| < radius``; no
    inner cut when ``outside`` is None."""
    def keep(r):
        return (outside is None or abs(r) > outside) and abs(r) < radius
    if f.is_polynomial():
        out = []
        for fac, mult in squarefree_decomposition(f.polynomial_part()):
            if len(utrim(fac)) <= 1:
                continue
            out.extend((complex(r), mult) for r in np.roots([complex(c) for c in reversed(fac)]) if keep(r))
        return out, "exact"
    div = zeros_on_annulus(f, max(outside or 0.0, 0.0), radius)
    return [(complex(p), int(m)) for p, m in div.support if keep(p)], "numeric"


def ramification_defect_witness(F: CurveRep, Q, M: int, m_j, outside: float | None = None,
                                radius: float = 1e3) -> RamificationWitness:
    """``1 - M/m_j`` (clamped at 0) once every zero of ``Q(F)`` in the
    subdomain has order at least ``m_j``; ``m_j = inf`` for a zero-free
    ``Q(F)``."""
    f = compose_with_polynomial(Q, F)
    if f.is_zero():
        raise DegenerateCurveError("Q(F) vanishes identically")
    zs, cert = _zero_orders(f, outside, radius)
    observed = min((m for _, m in zs), default=math.inf)
    if observed < m_j:
        bad = min(zs, key=lambda t: (t[1], abs(t[0])))[0]
        return RamificationWitness(None, m_j, observed, cert, bad)
    bound = Fraction(1) if m_j == math.inf else max(Fraction(0), 1 - Fraction(M, m_j))
    return RamificationWitness(bound, m_j, observed, cert)


def _count_disk(f: ExpPoly, r: float) -> int:
    if f.is_polynomial():
        return sum(m for _, m in _zero_orders(f, None, r)[0])
    inner = 1e-3
    val, _ = argument_principle_count(f, inner)
    return int(round(val)) + zeros_on_annulus(f, inner, r).degree()


def _count_cylinder(f: ExpPoly, a: float) -> int:
    """Zeros in ``|Re z| < a`` modulo ``2 pi i``: roots ``w`` with
    ``e^-a < |w| < e^a``."""
    lau = _laurent(f)
    lo = min(lau)
    coeffs = [lau.get(m, ZERO) for m in range(lo, max(lau) + 1)]
    total = 0
    for fac, mult in squarefree_decomposition(coeffs):
        if len(utrim(fac)) <= 1:
            continue
        for w in np.roots([complex(c) for c in reversed(fac)]):
            if w != 0 and abs(math.log(abs(w))) < a:
                total += mult
    return total


@dataclass
class FiniteCurvatureReport:
    surface: str
    counts: list  # per sweep size, one count per hypersurface
    sizes: list
    stabilized: bool
    bound: BoundReport
    curvature: TotalCurvature
    consistent: bool

    @property
    def verdict(self) -> str:
        return "PASS" if self.consistent else "FAIL"

    def to_json(self) -> dict:
        return {"surface": self.surface, "sizes": self.sizes, "counts": self.counts,
                "stabilized": self.stabilized, "bound": self.bound.to_json(),
                "curvature": self.curvature.to_json(), "consistent": self.consistent, "verdict": self.verdict}


def finite_total_curvature_criterion(surface: MinimalSurface, cfg: PositionConfig,
                                     sizes: Sequence[float] | None = None,
                                     curvature: TotalCurvature | None = None) -> FiniteCurvatureReport:
    """Intersection counts of the Gauss map with each ``Q_j`` over an
    exhaustion, compared with the bound and the total curvature verdict.

    The only inconsistency is stabilized counts with ``q`` above the bound
    together with infinite total curvature.
    """
    g = gauss_map(surface)
    B: QuotientBasis = cfg.basis
    if nondegeneracy_witness(g, B).is_zero():
        raise DegenerateCurveError(f"Gauss map of {surface.name} is degenerate over the quotient")
    if sizes is None:
        sizes = [2.0, 4.0, 8.0, 16.0] if surface.chart == "cylinder" else [10.0, 20.0, 40.0, 80.0]
    fs = [compose_with_polynomial(Q, g) for Q in cfg.hypersurfaces]
    counter = _count_cylinder if surface.chart == "cylinder" else _count_disk
    counts = [[counter(f, s) for f in fs] for s in sizes]
    stabilized = len(counts) >= 3 and counts[-1] == counts[-2] == counts[-3]
    rep = bound_evaluator(cfg.N, cfg.k, cfg.d, B.M, cfg.q)
    curv = curvature if curvature is not None else total_curvature(surface)
    violated = stabilized and rep.q_exceeds and curv.verdict == "INFINITE"
    return FiniteCurvatureReport(surface.name, counts, list(sizes), stabilized, rep, curv, not violated)


def gauss_config(Q: Sequence, N: int, V: VarietyPresentation | None = None, name: str = "") -> PositionConfig:
    """Configuration for hypersurfaces in the Gauss-map target (``P^2`` by
    default)."""
    return PositionConfig.lift(V or projective_space(2), list(Q), N, name)
