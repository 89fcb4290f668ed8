"""Exponential polynomials and holomorphic curves built from them.

An :class:`ExpPoly` is a finite sum ``sum_j p_j(z) exp(lam_j z)`` with exact
Gaussian-rational exponents and coefficients.  The class is closed under
sums, products and d/dz, so Wronskians and compositions stay exact.

Numerical evaluation works with a real log-scale: ``scaled(z)`` returns
``(mantissa, shift)`` where ``f(z) = mantissa * exp(shift)`` and
``shift = max_j Re(lam_j z)``.  This keeps ``e^z`` at ``|z| = 1000`` finite.
Polynomial factors are evaluated by Horner's rule; the relative error of each
term is a small multiple of ``deg * eps`` times the condition number of the
polynomial at ``z``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exact import ONE, ZERO, GaussQ, gq, uadd, uderiv, umul, uscale, utrim
from .poly import HomogeneousPolynomial, VarietyPresentation

_OVERFLOW_SHIFT = 700.0


class ExpPoly:
    __slots__ = ("terms", "_numeric")

    def __init__(self, terms: dict | Iterable | None = None):
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        clean: dict = {}
        for lam, p in items:
            lam = gq(lam)
            p = utrim([gq(c) for c in p])
            if not p:
                continue
            clean[lam] = utrim(uadd(clean[lam], p)) if lam in clean else p
            if not clean[lam]:
                del clean[lam]
        self.terms = clean
        self._numeric = None

    # constructors -----------------------------------------------------------
    @classmethod
    def const(cls, c) -> "ExpPoly":
        return cls({ZERO: [c]})

    @classmethod
    def z(cls) -> "ExpPoly":
        return cls({ZERO: [ZERO, ONE]})

    @classmethod
    def poly(cls, coeffs: Sequence) -> "ExpPoly":
        """Pure polynomial from ascending coefficients."""
        return cls({ZERO: list(coeffs)})

    @classmethod
    def exp(cls, lam, coeffs: Sequence = (1,)) -> "ExpPoly":
        """``p(z) * exp(lam z)`` with ``p`` given by ascending coefficients."""
        return cls({lam: list(coeffs)})

    # structure --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        return all(lam == ZERO for lam in self.terms)

    def polynomial_part(self) -> list[GaussQ]:
        """Ascending coefficients of a pure polynomial (``[]`` for zero)."""
        if not self.is_polynomial():
            raise ValueError("not a pure polynomial")
        return list(self.terms.get(ZERO, []))

    def lambdas(self) -> list[GaussQ]:
        return sorted(self.terms, key=GaussQ.sort_key)

    def max_degree(self) -> int:
        return max((len(p) - 1 for p in self.terms.values()), default=-1)

    def is_constant(self) -> bool:
        return self.is_zero() or (self.is_polynomial() and len(self.terms[ZERO]) == 1)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return ExpPoly(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly({lam: [-c for c in p] for lam, p in self.terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        out = []
        for l1, p1 in self.terms.items():
            for l2, p2 in other.terms.items():
                out.append((l1 + l2, umul(p1, p2)))
        return ExpPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = ExpPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c) -> "ExpPoly":
        c = gq(c)
        return ExpPoly({lam: uscale(p, c) for lam, p in self.terms.items()})

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((lam, tuple(p)) for lam, p in self.terms.items()))

    def __repr__(self):
        return f"ExpPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for lam in self.lambdas():
            p = self.terms[lam]
            poly = " + ".join(
                str(c) if k == 0 else (f"{c}*z" if k == 1 else f"{c}*z^{k}")
                for k, c in enumerate(p) if c
            )
            if lam == ZERO:
                parts.append(poly)
            else:
                parts.append(f"({poly})*exp({lam}*z)")
        return " + ".join(parts)

    # calculus ---------------------------------------------------------------
    def derivative(self) -> "ExpPoly":
        # (p e^{lam z})' = (p' + lam p) e^{lam z}
        return ExpPoly({lam: uadd(uderiv(p), uscale(p, lam)) for lam, p in self.terms.items()})

    def substitute_scale(self, c) -> "ExpPoly":
        """The function ``xi -> f(c xi)``."""
        c = gq(c)
        out = {}
        for lam, p in self.terms.items():
            ck = ONE
            q = []
            for a in p:
                q.append(a * ck)
                ck = ck * c
            out[lam * c] = q
        return ExpPoly(out)

    # evaluation -------------------------------------------------------------
    def _arrays(self):
        # float copies of (lambda, coefficients), built once
        if self._numeric is None:
            lams = self.lambdas()
            coeffs = [[complex(c) for c in self.terms[l]] for l in lams]
            self._numeric = ([complex(l) for l in lams], [np.array(c) for c in coeffs],
                             [c[::-1] for c in coeffs])
        return self._numeric[:2]

    def value_at(self, z: complex, shift: float) -> complex:
        """Scalar version of :meth:`shifted` in plain Python arithmetic."""
        acc = 0j
        self._arrays()
        for lam, rev in zip(self._numeric[0], self._numeric[2]):
            val = 0j
            for c in rev:
                val = val * z + c
            acc += val * cmath.exp(lam * z - shift)
        return acc

    def shift_at(self, z: complex) -> float:
        return max((lam * z).real for lam in self._arrays()[0]) if self.terms else 0.0

    def shift(self, z) -> np.ndarray:
        """``max_j Re(lam_j z)``: the log-scale used by :meth:`scaled`."""
        z = np.asarray(z, dtype=complex)
        if not self.terms:
            return np.zeros(z.shape)
        return np.max([np.real(l * z) for l in self._arrays()[0]], axis=0)

    def shifted(self, z, shift) -> np.ndarray:
        """``f(z) * exp(-shift)`` evaluated term by term."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros(np.broadcast(z, shift).shape, dtype=complex)
        for lam, coeffs in zip(*self._arrays()):
            val = np.zeros(z.shape, dtype=complex)
            for c in coeffs[::-1]:
                val = val * z + c
            acc = acc + val * np.exp(lam * z - shift)
        return acc

    def scaled(self, z):
        s = self.shift(z)
        return self.shifted(z, s), s

    def log_abs(self, z) -> np.ndarray:
        with np.errstate(divide="ignore"):
            m, s = self.scaled(z)
            return np.log(np.abs(m)) + s

    def evaluate(self, z):
        """Plain value ``f(z)``; raises ``OverflowError`` when
        ``Re(lam z) > 700`` for some term (use :meth:`scaled` there)."""
        arr = np.asarray(z, dtype=complex)
        s = self.shift(arr)
        if np.any(s > _OVERFLOW_SHIFT):
            raise OverflowError(f"exp overflow: Re(lambda z) reaches {float(np.max(s)):.1f}")
        val = self.shifted(arr, np.zeros(arr.shape))
        return complex(val) if val.ndim == 0 else val

    __call__ = evaluate

    def evaluate_exact(self, z) -> GaussQ:
        """Exact value at a Gaussian-rational point of a pure polynomial."""
        from .exact import ueval

        return ueval(self.polynomial_part(), gq(z))

    # serialization ----------------------------------------------------------
    def to_json(self) -> list:
        return [
            {"lambda": lam.to_short_json(), "poly": [c.to_short_json() for c in self.terms[lam]]}
            for lam in self.lambdas()
        ]

    @classmethod
    def from_json(cls, obj) -> "ExpPoly":
        if isinstance(obj, str):
            return parse_exppoly(obj)
        return cls([(GaussQ.from_json(t["lambda"]), [GaussQ.from_json(c) for c in t["poly"]]) for t in obj])


def _coerce(x) -> ExpPoly | None:
    if isinstance(x, ExpPoly):
        return x
    try:
        return ExpPoly.const(gq(x))
    except TypeError:
        return None


def differentiate(f: ExpPoly, order: int = 1) -> ExpPoly:
    if order < 0:
        raise ValueError("order must be nonnegative")
    for _ in range(order):
        f = f.derivative()
    return f


def evaluate(f: ExpPoly, z):
    return f.evaluate(z)


def parse_exppoly(text: str) -> ExpPoly:
    """Parse an expression in ``z`` built from rationals, ``I``, ``+ - * **``
    and ``exp(c*z)``."""
    import sympy

    try:
        return _parse_exppoly(text)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise ValueError(f"{text!r} is not an exponential polynomial in z: {exc}") from exc


def _parse_exppoly(text: str) -> ExpPoly:
    import sympy

    zs = sympy.Symbol("z")
    expr = sympy.expand(sympy.sympify(text, locals={"z": zs}))
    # exp(a)*exp(b) is merged by powsimp so each product has one exponential
    expr = sympy.expand(sympy.powsimp(expr))
    out = []
    for term in sympy.Add.make_args(expr):
        lam = ZERO
        rest = sympy.Integer(1)
        for factor in sympy.Mul.make_args(term):
            if isinstance(factor, sympy.exp) or (factor.is_Pow and factor.base == sympy.E):
                arg = factor.args[0] if isinstance(factor, sympy.exp) else factor.exp
                lin = sympy.Poly(sympy.expand(arg), zs)
                if lin.degree() > 1 or lin.coeff_monomial(1) != 0:
                    raise ValueError(f"exponent {arg} is not a multiple of z")
                lam = lam + _sym_gq(lin.coeff_monomial(zs))
            else:
                rest = rest * factor
        p = sympy.Poly(rest, zs)
        coeffs = [_sym_gq(c) for c in reversed(p.all_coeffs())]
        out.append((lam, coeffs))
    return ExpPoly(out)


def _sym_gq(c) -> GaussQ:
    import sympy

    re, im = sympy.nsimplify(c).as_real_imag()
    vals = []
    for x in (re, im):
        x = sympy.nsimplify(x)
        if not x.is_Rational:
            raise ValueError(f"coefficient {c} is not Gaussian rational")
        vals.append(Fraction(int(x.p), int(x.q)))
    return GaussQ(*vals)


# ---------------------------------------------------------------------------
# regions, curves, divisors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    kind: str  # "disk", "punctured_disk", "annulus"
    R: float | None = None
    s: float | None = None
    t: float | None = None

    def __post_init__(self):
        if self.kind == "disk":
            if not (self.R and self.R > 0):
                raise ValueError("disk needs R > 0")
        elif self.kind == "punctured_disk":
            if not (self.s and self.s > 0):
                raise ValueError("punctured disk needs s > 0")
        elif self.kind == "annulus":
            if not (self.s and self.t and 0 < self.s < self.t):
                raise ValueError("annulus needs 0 < s < t")
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")

    @classmethod
    def disk(cls, R: float) -> "Region":
        return cls("disk", R=R)

    @classmethod
    def punctured(cls, s: float) -> "Region":
        return cls("punctured_disk", s=s)

    @classmethod
    def annulus(cls, s: float, t: float) -> "Region":
        return cls("annulus", s=s, t=t)

    def contains(self, z: complex) -> bool:
        a = abs(z)
        if self.kind == "disk":
            return a < self.R
        if self.kind == "punctured_disk":
            return a >= self.s
        return self.s <= a <= self.t

    def to_json(self) -> dict:
        return {k: v for k, v in (("kind", self.kind), ("R", self.R), ("s", self.s), ("t", self.t)) if v is not None}

    @classmethod
    def from_json(cls, obj) -> "Region":
        return cls(obj["kind"], obj.get("R"), obj.get("s"), obj.get("t"))


@dataclass
class Divisor:
    support: list  # list of (point, multiplicity)
    region: Region | None = None
    perturbations: list = field(default_factory=list)
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        for (p, m) in self.support:
            if int(m) != m or m <= 0:
                raise ValueError("multiplicities must be positive integers")
        pts = [complex(p) for p, _ in self.support]
        if pts:
            # hash grid with cells no smaller than any point's tolerance
            cell = 1e-12 * max(1.0, max(abs(z) for z in pts))
            grid: dict = {}
            for z in pts:
                key = (math.floor(z.real / cell), math.floor(z.imag / cell))
                tol = 1e-12 * max(1.0, abs(z))
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        for w in grid.get((key[0] + dx, key[1] + dy), ()):
                            if abs(w - z) <= tol:
                                raise ValueError("divisor points must be distinct")
                grid.setdefault(key, []).append(z)
        self.support = sorted(((complex(p), int(m)) for p, m in self.support),
                              key=lambda pm: (round(math.atan2(pm[0].imag, pm[0].real), 12), abs(pm[0])))

    def degree(self) -> int:
        return sum(m for _, m in self.support)

    def truncated(self, p) -> "Divisor":
        if p is None or p == math.inf:
            return self
        return Divisor([(z, min(p, m)) for z, m in self.support], self.region, list(self.perturbations), dict(self.certificate))

    def count_within(self, r: float) -> int:
        return sum(m for z, m in self.support if abs(z) <= r)

    def to_json(self) -> list:
        return [{"re": z.real, "im": z.imag, "multiplicity": m} for z, m in self.support]


@dataclass
class CurveRep:
    """A holomorphic curve ``(f_0 : ... : f_n)`` with ExpPoly components."""

    components: list
    region: Region = field(default_factory=lambda: Region.punctured(1.0))
    target: VarietyPresentation | None = None
    name: str = ""

    def __post_init__(self):
        self.components = [c if isinstance(c, ExpPoly) else _coerce(c) for c in self.components]
        if len(self.components) < 1:
            raise ValueError("a curve needs at least one component")
        if all(c.is_zero() for c in self.components):
            raise ValueError("all components vanish identically")
        self.reduction = self._certify_reduced()
        if self.target is not None:
            if self.target.n != self.n:
                raise ValueError("target variety lives in a different projective space")
            bad = self.generators_failing()
            if bad:
                raise ValueError(f"curve does not lie on the target: generator(s) {bad} do not vanish")

    def _certify_reduced(self) -> dict:
        """Refuse components with a common zero in the region."""
        live = [c for c in self.components if not c.is_zero()]
        for i, c in enumerate(live):
            if len(c.terms) == 1 and len(next(iter(c.terms.values()))) == 1:
                return {"method": "zero-free component", "component": i}
        if all(c.is_polynomial() for c in live):
            g = common_polynomial_gcd(live)
            roots = np.roots([complex(a) for a in reversed(g)]) if len(g) > 1 else []
            hit = [complex(r) for r in roots if self.region.contains(complex(r))]
            if hit:
                raise ValueError(f"components share a zero at {hit[0]:.6g} (not a reduced representation)")
            return {"method": "exact gcd", "gcd_degree": len(g) - 1}
        from .zeros import zeros_on_annulus

        # zeros of the component with fewest terms, on a bounded window
        f = min(live, key=lambda c: (sum(len(p) for p in c.terms.values()), len(c.terms)))
        reg = self.region
        lo = reg.s if reg.s is not None else 1e-9
        hi = reg.t if reg.t is not None else (reg.R if reg.R is not None else max(10.0, 10 * reg.s))
        pts = [z for z, _ in zeros_on_annulus(f, lo, hi).support]
        if reg.kind == "disk" and abs(complex(f.evaluate(0.0))) == 0:
            pts.append(0j)
        for z in pts:
            if not reg.contains(z):
                continue
            scale = max(float(np.exp(c.shift_at(z))) * max(1.0, abs(z)) ** c.max_degree() for c in live)
            if all(abs(complex(c.evaluate(z))) <= 1e-9 * scale for c in live):
                raise ValueError(f"components share a zero at {z:.6g} (not a reduced representation)")
        return {"method": "zero counting", "window": [lo, hi], "checked": len(pts)}

    @property
    def n(self) -> int:
        return len(self.components) - 1

    def generators_failing(self) -> list[int]:
        if self.target is None:
            return []
        return [i for i, g in enumerate(self.target.generators) if not compose_with_polynomial(g, self).is_zero()]

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.components)

    def derivative(self) -> list[ExpPoly]:
        return [c.derivative() for c in self.components]

    def shift(self, z) -> np.ndarray:
        return np.max([c.shift(z) for c in self.components if not c.is_zero()], axis=0)

    def scaled(self, z):
        """Components times ``exp(-shift)`` (stacked on axis 0) and the shift."""
        s = self.shift(z)
        return np.stack([c.shifted(z, s) for c in self.components]), s

    def log_norm(self, z) -> np.ndarray:
        """``log ||F(z)||`` with the Euclidean norm."""
        vals, s = self.scaled(z)
        with np.errstate(divide="ignore"):
            return 0.5 * np.log(np.sum(np.abs(vals) ** 2, axis=0)) + s

    def evaluate(self, z) -> np.ndarray:
        return np.stack([np.asarray(c.evaluate(z)) for c in self.components])

    def substitute_scale(self, c) -> "CurveRep":
        return CurveRep([f.substitute_scale(c) for f in self.components], self.region, self.target, self.name)

    def to_json(self) -> dict:
        obj = {"components": [c.to_json() for c in self.components], "region": self.region.to_json()}
        if self.name:
            obj["name"] = self.name
        return obj


def compose_with_polynomial(Q: HomogeneousPolynomial, F: CurveRep | Sequence[ExpPoly]) -> ExpPoly:
    comps = F.components if isinstance(F, CurveRep) else list(F)
    if Q.n + 1 != len(comps):
        raise ValueError(f"form in {Q.n + 1} variables applied to a curve with {len(comps)} components")
    powers: dict = {}
    out = ExpPoly()
    for mono, c in Q.terms.items():
        term = ExpPoly.const(c)
        for i, e in enumerate(mono):
            if e:
                if (i, e) not in powers:
                    powers[(i, e)] = comps[i] ** e
                term = term * powers[(i, e)]
        out = out + term
    return out


def common_polynomial_gcd(components: Sequence[ExpPoly]) -> list[GaussQ]:
    from .exact import ugcd

    g: list = []
    for c in components:
        if not c.is_zero():
            g = ugcd(g, c.polynomial_part()) if g else list(c.polynomial_part())
    return g


def reduce_polynomial_curve(components: Sequence[ExpPoly]) -> list[ExpPoly]:
    """Divide pure-polynomial components by their (monic) gcd."""
    from .exact import udivmod, umonic

    if not all(c.is_polynomial() for c in components):
        return list(components)
    g = umonic(common_polynomial_gcd(components))
    if len(g) <= 1:
        return list(components)
    return [ExpPoly.poly(udivmod(c.polynomial_part(), g)[0]) if not c.is_zero() else c for c in components]
