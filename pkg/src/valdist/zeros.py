"""Zeros of exponential polynomials on annuli.

Pure polynomials are split exactly into square-free parts (so multiplicities
are exact) and the parts are solved numerically.  General exponential
polynomials are searched with the argument principle: the winding number of
``f`` along the boundary of an annular sector counts its zeros, sectors are
quadrisected until each holds one zero (or one cluster), and Newton polishes
the point.  Either way, the final count is checked against the trapezoid
approximation of ``(1/2 pi i) ∮ f'/f dz`` on two circles.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curves import Divisor, ExpPoly, Region
from fractions import Fraction
from functools import reduce

from .exact import ZERO, squarefree_decomposition

BOUNDARY_EPS = 1e-9  # radius perturbation, relative to s (or t when s = 0)
SEARCH_MARGIN = 0.05  # search annulus is enlarged by this factor on both sides
_MAX_EDGE_POINTS = 1 << 17
_MAX_TRAPEZOID_POINTS = 1 << 22
# sector cuts avoid the axes, where catalogue zeros like to sit
_THETA0 = -np.pi + 0.0137
# clusters larger than this are always subdivided further
_MAX_CLUSTER = 8
_MAX_MULTISTART = 4


class ZeroCountError(RuntimeError):
    """Boundary-zero or precision failure in the argument principle."""


class _EdgeFailure(Exception):
    pass


def _magnitude(f: ExpPoly, z: complex, shift: float) -> float:
    """``sum_j sum_k |c_jk| |z|^k |exp(lam_j z - shift)|``, the natural scale of
    ``f(z) exp(-shift)`` for relative smallness tests."""
    az = abs(z)
    acc = 0.0
    for lam, coeffs in zip(*f._arrays()):
        val = 0.0
        for c in coeffs[::-1]:
            val = val * az + abs(c)
        acc += val * math.exp((lam * z).real - shift)
    return acc


def _rate(f: ExpPoly) -> float:
    return max((abs(complex(l)) for l in f.terms), default=0.0)


# ---------------------------------------------------------------------------
# contour integral
# ---------------------------------------------------------------------------

def argument_principle_count(f: ExpPoly, r: float, tol: float = 1e-6) -> tuple[float, int]:
    """Trapezoid value of ``(1/2 pi i) ∮_{|z|=r} f'/f dz`` and the number of
    nodes used.  The rule is spectrally accurate for periodic integrands, so
    the node count is doubled until two successive values agree."""
    if r <= 0:
        return 0.0, 0
    df = f.derivative()
    n = 64
    need = 8 * (_rate(f) * r + f.max_degree() + 4)
    while n < need:
        n *= 2
    prev = None
    while n <= _MAX_TRAPEZOID_POINTS:
        theta = 2 * np.pi * np.arange(n) / n
        z = r * np.exp(1j * theta)
        s = f.shift(z)
        num = df.shifted(z, s)
        den = f.shifted(z, s)
        if np.any(den == 0):
            raise ZeroCountError(f"f vanishes at a node of the circle |z| = {r}")
        val = np.mean(z * num / den)
        if prev is not None and abs(val - prev) < tol:
            return float(val.real), n
        prev = val
        n *= 2
    raise ZeroCountError(f"trapezoid rule did not settle on |z| = {r}; a zero is probably on the circle")


# ---------------------------------------------------------------------------
# winding numbers on annular sectors
# ---------------------------------------------------------------------------

class _Winder:
    def __init__(self, f: ExpPoly):
        self.f = f
        self.df = f.derivative()
        self.rate = _rate(f)
        self.deg = max(f.max_degree(), 0)
        self.cache: dict = {}

    def _phase_change(self, path, length):
        # a step h is trusted only where |f'/f| h is small, so a zero close to
        # the path cannot slip between two samples
        n = int(min(_MAX_EDGE_POINTS, max(16, 4 * (self.rate * length + self.deg + 2))))
        while n <= _MAX_EDGE_POINTS:
            z = path(np.linspace(0.0, 1.0, n + 1))
            sh = self.f.shift(z)
            m = self.f.shifted(z, sh)
            if np.any(m == 0) or not np.all(np.isfinite(m)):
                raise _EdgeFailure
            dm = self.df.shifted(z, sh)
            h = np.abs(z[1] - z[0])
            d = np.angle(m[1:] / m[:-1])
            if np.max(np.abs(d)) < 0.5 and np.max(np.abs(dm / m)) * h < 0.5:
                return float(np.sum(d))
            n *= 2
        raise _EdgeFailure

    def arc(self, r, t0, t1):
        """Phase change along ``r e^{i theta}``, theta from t0 to t1."""
        if r == 0.0:
            return 0.0
        key = ("a", r, min(t0, t1), max(t0, t1))
        if key not in self.cache:
            a, b = key[2], key[3]
            self.cache[key] = self._phase_change(lambda u: r * np.exp(1j * (a + (b - a) * u)), r * (b - a))
        v = self.cache[key]
        return v if t0 <= t1 else -v

    def ray(self, theta, r0, r1):
        key = ("r", theta, min(r0, r1), max(r0, r1))
        if key not in self.cache:
            a, b = key[2], key[3]
            e = np.exp(1j * theta)
            self.cache[key] = self._phase_change(lambda u: (a + (b - a) * u) * e, b - a)
        v = self.cache[key]
        return v if r0 <= r1 else -v

    def count(self, cell):
        r0, r1, t0, t1 = cell
        total = self.arc(r1, t0, t1) + self.ray(t1, r1, r0) + self.arc(r0, t1, t0) + self.ray(t0, r0, r1)
        w = total / (2 * np.pi)
        k = round(w)
        if abs(w - k) > 0.05 or k < 0:
            raise _EdgeFailure
        return int(k)


@dataclass
class _Cell:
    r0: float
    r1: float
    t0: float
    t1: float
    count: int
    depth: int = 0

    @property
    def key(self):
        return (self.r0, self.r1, self.t0, self.t1)

    def center(self) -> complex:
        r = 0.5 * (self.r0 + self.r1)
        return r * np.exp(1j * 0.5 * (self.t0 + self.t1))

    def diameter(self) -> float:
        return max(self.r1 - self.r0, self.r1 * (self.t1 - self.t0))

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        a = abs(z)
        th = math.atan2(z.imag, z.real)
        # bring the angle into [t0, t0 + 2 pi)
        th = self.t0 + ((th - self.t0) % (2 * np.pi))
        tol = slack * max(1.0, self.r1)
        inside_r = self.r0 - tol <= a <= self.r1 + tol
        inside_t = th <= self.t1 + slack or th >= self.t0 + 2 * np.pi - slack
        if self.r0 == 0.0 and a <= tol:
            return True
        return inside_r and inside_t


def _newton(f: ExpPoly, df: ExpPoly, shift_of: ExpPoly, z0: complex, iters: int = 60) -> complex | None:
    z = complex(z0)
    step = math.inf
    for _ in range(iters):
        s = shift_of.shift_at(z)
        try:
            fv = f.value_at(z, s)
            dv = df.value_at(z, s)
            step = fv / dv
        except (ZeroDivisionError, OverflowError, ValueError):
            return None
        z = z - step
        if not cmath.isfinite(z):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            return z
    return z if abs(step) <= 1e-11 * max(1.0, abs(z)) else None


def _is_zero_of_order(f: ExpPoly, derivs: list, z: complex, c: int, rtol: float) -> bool:
    s = f.shift_at(z)
    for j in range(c):
        g = derivs[j]
        if g.is_zero():
            continue
        if abs(g.value_at(z, s)) > rtol * _magnitude(g, z, s) * max(1.0, abs(z)) ** j:
            return False
    return True


def _multistart(f: ExpPoly, df: ExpPoly, cell: "_Cell") -> list:
    """Distinct simple zeros reached by Newton from a 3x3 polar grid of seeds
    inside the cell."""
    out: list = []
    for a in (0.5, 0.2, 0.8):
        for b in (0.5, 0.2, 0.8):
            r = cell.r0 + a * (cell.r1 - cell.r0)
            z0 = r * cmath.exp(1j * (cell.t0 + b * (cell.t1 - cell.t0)))
            z = _newton(f, df, f, z0)
            if z is None or not cell.contains(z):
                continue
            if any(abs(z - w) < 1e-9 * max(1.0, abs(z)) for w in out):
                continue
            s = f.shift_at(z)
            if not _is_zero_of_order(f, [f], z, 1, 1e-8):
                continue
            if abs(df.value_at(z, s)) < 1e-6 * _magnitude(df, z, s):
                continue  # looks multiple; leave it to the cluster branch
            out.append(z)
            if len(out) == cell.count:
                return out
    return out


def _sector_search(f: ExpPoly, r_in: float, r_out: float, max_depth: int = 60) -> tuple[list, list]:
    """Zeros of ``f`` in ``r_in < |z| < r_out`` with multiplicities, plus notes."""
    winder = _Winder(f)
    derivs = [f]
    notes: list = []

    def deriv(j):
        while len(derivs) <= j:
            derivs.append(derivs[-1].derivative())
        return derivs[j]

    # initial partition: shells of ratio <= 2 and sectors of bounded arc length
    radii = [r_in]
    if r_in == 0.0:
        radii.append(min(r_out, 0.9137))
    while radii[-1] < r_out:
        radii.append(min(r_out, radii[-1] * 1.9371))
    radii = sorted(set(radii))
    cells = []
    for a, b in zip(radii[:-1], radii[1:]):
        k = int(min(256, max(8, 2 ** math.ceil(math.log2(max(1.0, b * (winder.rate + 1) / 8.0))))))
        for j in range(k):
            cells.append((a, b, _THETA0 + 2 * np.pi * j / k, _THETA0 + 2 * np.pi * (j + 1) / k))

    stack = []
    for c in cells:
        stack.append(_Cell(*c, count=winder.count(c)))

    found = []
    fracs = (0.5, 0.4713, 0.5387, 0.3917, 0.6123)
    while stack:
        cell = stack.pop()
        if cell.count == 0:
            continue
        z0 = cell.center()
        if cell.count <= _MAX_MULTISTART:
            simple = _multistart(f, deriv(1), cell)
            if len(simple) == cell.count:
                found.extend((z, 1) for z in simple)
                continue
        if cell.count >= 2 and cell.count <= _MAX_CLUSTER and cell.diameter() < 1e-2 * max(1.0, cell.r1):
            c = cell.count
            z = _newton(deriv(c - 1), deriv(c), f, z0)
            if z is not None and cell.contains(z) and _is_zero_of_order(f, [deriv(j) for j in range(c)], z, c, 1e-7):
                found.append((z, c))
                continue
        if cell.count <= _MAX_CLUSTER and (cell.depth >= max_depth or cell.diameter() < 1e-10 * max(1.0, cell.r1)):
            z = _newton(deriv(cell.count - 1), deriv(cell.count), f, z0)
            zz = z if z is not None and cell.contains(z, 1e-8) else z0
            found.append((zz, cell.count))
            notes.append(f"unresolved cluster of {cell.count} zeros near {zz:.6g} counted as one point")
            continue
        children = None
        for fr in fracs:
            if cell.r0 == 0.0:
                rm = cell.r1 * fr
            else:
                rm = cell.r0 * (cell.r1 / cell.r0) ** fr if cell.r1 / cell.r0 > 1.5 else cell.r0 + fr * (cell.r1 - cell.r0)
            tm = cell.t0 + fr * (cell.t1 - cell.t0)
            parts = [(cell.r0, rm, cell.t0, tm), (cell.r0, rm, tm, cell.t1),
                     (rm, cell.r1, cell.t0, tm), (rm, cell.r1, tm, cell.t1)]
            try:
                counts = [winder.count(p) for p in parts]
            except _EdgeFailure:
                continue
            if sum(counts) != cell.count:
                continue
            children = [_Cell(*p, count=k, depth=cell.depth + 1) for p, k in zip(parts, counts)]
            break
        if children is None:
            raise ZeroCountError(f"could not subdivide the sector {cell.key}; zero on a cut?")
        stack.extend(children)
    return found, notes


def _polynomial_zeros(f: ExpPoly) -> list:
    out = []
    for factor, mult in squarefree_decomposition(f.polynomial_part()):
        coeffs = [complex(c) for c in factor]
        if len(coeffs) <= 1:
            continue
        roots = np.roots(coeffs[::-1])
        g = ExpPoly.poly(factor)
        dg = g.derivative()
        for r in roots:
            z = _newton(g, dg, g, r) or complex(r)
            out.append((z, mult))
    return out


def _lattice_form(f: ExpPoly):
    """If ``f = sum_j c_j exp(n_j mu z)`` with constants ``c_j`` and integers
    ``n_j``, return ``(mu, ascending coefficients of P)`` with
    ``f = exp(n_min mu z) P(exp(mu z))``; otherwise None."""
    if any(len(p) != 1 for p in f.terms.values()) or len(f.terms) < 2:
        return None
    lams = f.lambdas()
    ref = next(l for l in lams if l != ZERO)
    ratios = []
    for l in lams:
        rho = l / ref
        if rho.im != 0:
            return None
        ratios.append(rho.re)
    den = reduce(math.lcm, (r.denominator for r in ratios), 1)
    ints = [int(r * den) for r in ratios]
    g = reduce(math.gcd, ints, 0)
    ints = [i // g for i in ints]
    mu = ref * Fraction(g, den)
    lo = min(ints)
    coeffs = [ZERO] * (max(ints) - lo + 1)
    for l, i in zip(lams, ints):
        coeffs[i - lo] = f.terms[l][0]
    return mu, coeffs


def _lattice_zeros(mu, coeffs, r_max: float) -> list:
    """Zeros of ``P(exp(mu z))`` with ``|z| <= r_max``: for each root ``w`` of
    ``P`` the points ``(Log w + 2 pi i k) / mu``."""
    m = complex(mu)
    out = []
    for factor, mult in squarefree_decomposition(coeffs):
        if len(factor) <= 1:
            continue
        for w in np.roots([complex(c) for c in factor][::-1]):
            lw = cmath.log(w)
            reach = r_max * abs(m)
            if abs(lw.real) > reach:
                continue
            k0 = math.floor((-reach - lw.imag) / (2 * math.pi)) - 1
            k1 = math.ceil((reach - lw.imag) / (2 * math.pi)) + 1
            ks = np.arange(k0, k1 + 1)
            zs = (lw + 2j * math.pi * ks) / m
            out.extend((complex(z), mult) for z in zs[np.abs(zs) <= r_max])
    return out


def _pick_radius(lo: float, hi: float, moduli: list) -> float:
    cand = np.linspace(lo, hi, 33)
    if not moduli:
        return float(cand[len(cand) // 2])
    mods = np.asarray(moduli)
    dist = [np.min(np.abs(mods - c)) for c in cand]
    return float(cand[int(np.argmax(dist))])


_CACHE: dict = {}
_CACHE_SIZE = 256


def zeros_on_annulus(f: ExpPoly, s: float, t: float) -> Divisor:
    """Divisor of zeros of ``f`` in ``s <= |z| <= t`` (``s = 0`` allowed).

    A zero within ``1e-9 * s`` of a boundary circle is kept, and the shift of
    that circle is recorded in ``Divisor.perturbations``.  Results are
    memoized per ``(f, s, t)``.
    """
    key = (f, float(s), float(t))
    if key not in _CACHE:
        if len(_CACHE) >= _CACHE_SIZE:
            _CACHE.pop(next(iter(_CACHE)))
        _CACHE[key] = _zeros_on_annulus(f, s, t)
    d = _CACHE[key]
    return Divisor(list(d.support), d.region, list(d.perturbations), dict(d.certificate))


def _zeros_on_annulus(f: ExpPoly, s: float, t: float) -> Divisor:
    if f.is_zero():
        raise ValueError("f vanishes identically")
    if not 0 <= s < t:
        raise ValueError("need 0 <= s < t")
    lo = s / (1 + SEARCH_MARGIN)
    hi = t * (1 + SEARCH_MARGIN)
    notes: list = []
    lattice = None if f.is_polynomial() else _lattice_form(f)
    if f.is_polynomial():
        pts = _polynomial_zeros(f)
        method = "square-free factorization + polished roots"
    elif lattice is not None:
        pts = [(z, m) for z, m in _lattice_zeros(*lattice, hi) if abs(z) >= lo]
        method = "polynomial in exp(mu z): square-free roots lifted to lattices"
    else:
        pts = None
        for attempt in range(5):
            h = hi * (1 + 0.0123 * attempt)
            l = lo / (1 + 0.0123 * attempt) if lo > 0 else 0.0
            try:
                pts, notes = _sector_search(f, l, h)
                break
            except _EdgeFailure:
                continue
        if pts is None:
            raise ZeroCountError("every search boundary met a zero")
        method = "argument principle on annular sectors + Newton"

    eps = BOUNDARY_EPS * (s if s > 0 else t)
    pts = _dedupe(pts)
    moduli = [abs(z) for z, _ in pts]
    rho_out = _pick_radius(t + 2 * eps, hi, moduli)
    rho_in = _pick_radius(lo, s - 2 * eps, moduli) if s > 0 else 0.0
    outer, n_out = argument_principle_count(f, rho_out)
    inner, n_in = argument_principle_count(f, rho_in) if rho_in > 0 else (0.0, 0)
    integral = outer - inner
    expected = sum(m for z, m in pts if (rho_in == 0 or rho_in < abs(z)) and abs(z) < rho_out)
    if abs(integral - round(integral)) > 1e-3 or round(integral) != expected:
        raise ZeroCountError(
            f"boundary-zero or precision failure: contour integral {integral:.6f} vs {expected} zeros located"
        )

    perturbations = []
    support = []
    for z, m in pts:
        a = abs(z)
        if abs(a - s) <= eps and s > 0:
            perturbations.append({"circle": "inner", "radius": s, "shift": -eps, "zero": [z.real, z.imag]})
        elif abs(a - t) <= eps:
            perturbations.append({"circle": "outer", "radius": t, "shift": eps, "zero": [z.real, z.imag]})
        elif not (s <= a <= t):
            continue
        support.append((z, m))
    cert = {
        "method": method,
        "contour_radii": [rho_in, rho_out],
        "contour_nodes": [n_in, n_out],
        "contour_count": int(round(integral)),
        "located_count": expected,
        "notes": notes,
    }
    region = Region.annulus(s, t) if s > 0 else Region.disk(t)
    return Divisor(support, region, perturbations, cert)


def _dedupe(pts: list) -> list:
    out: list = []
    for z, m in sorted(pts, key=lambda p: (p[0].real, p[0].imag)):
        if out and abs(out[-1][0] - z) < 1e-10 * max(1.0, abs(z)):
            continue
        out.append((complex(z), int(m)))
    return out
