"""Homogeneous polynomials over Q(i), ideal degree slices and quotient bases.

Monomials are exponent tuples ``(i_0, ..., i_n)``.  The monomial order is
graded lexicographic everywhere: within one degree, ``(2,0) > (1,1) > (0,2)``
and lists are sorted from the largest monomial down.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .exact import ONE, ZERO, GaussQ, gq, rank, rref

MultiIndex = tuple


def monomial_basis(n: int, d: int) -> list[MultiIndex]:
    """All exponent tuples of total degree ``d`` in ``n + 1`` variables,
    largest first in lexicographic order."""
    if n < 0 or d < 0:
        raise ValueError("n and d must be nonnegative")
    out: list[MultiIndex] = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), d, n + 1)
    return out


class HomogeneousPolynomial:
    """A form of degree ``degree`` in ``x_0..x_n`` with exact coefficients."""

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: dict | None = None):
        self.n = n
        self.degree = degree
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n + 1 or sum(mono) != degree or min(mono) < 0:
                raise ValueError(f"monomial {mono} does not have degree {degree} in {n + 1} variables")
            c = gq(c)
            if c:
                clean[mono] = clean.get(mono, ZERO) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean

    # constructors -----------------------------------------------------------
    @classmethod
    def variable(cls, n: int, i: int) -> "HomogeneousPolynomial":
        mono = tuple(1 if j == i else 0 for j in range(n + 1))
        return cls(n, 1, {mono: ONE})

    @classmethod
    def monomial(cls, mono: Sequence[int], coeff=1) -> "HomogeneousPolynomial":
        mono = tuple(mono)
        return cls(len(mono) - 1, sum(mono), {mono: coeff})

    @classmethod
    def constant(cls, n: int, c) -> "HomogeneousPolynomial":
        return cls(n, 0, {(0,) * (n + 1): c})

    @classmethod
    def zero(cls, n: int, degree: int) -> "HomogeneousPolynomial":
        return cls(n, degree, {})

    @classmethod
    def from_vector(cls, n: int, d: int, vec: Sequence) -> "HomogeneousPolynomial":
        return cls(n, d, dict(zip(monomial_basis(n, d), vec)))

    @classmethod
    def parse(cls, text: str, n: int) -> "HomogeneousPolynomial":
        """Parse an expression in ``x0..xn`` (and ``I`` for sqrt(-1))."""
        import sympy

        xs = sympy.symbols(f"x0:{n + 1}")
        expr = sympy.sympify(text, locals={f"x{i}": xs[i] for i in range(n + 1)})
        poly = sympy.Poly(sympy.expand(expr), *xs)
        terms = {}
        degree = None
        for mono, c in poly.terms():
            re, im = c.as_real_imag()
            terms[mono] = GaussQ(_sym_fraction(re), _sym_fraction(im))
            if degree is None:
                degree = sum(mono)
            elif sum(mono) != degree:
                raise ValueError(f"{text!r} is not homogeneous")
        if degree is None:
            raise ValueError(f"{text!r} is the zero polynomial; give the degree explicitly")
        return cls(n, degree, terms)

    # arithmetic -------------------------------------------------------------
    def _check(self, other):
        if self.n != other.n:
            raise ValueError("ambient dimensions differ")

    def __add__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, ZERO) + c
        return HomogeneousPolynomial(self.n, self.degree, terms)

    def __neg__(self):
        return HomogeneousPolynomial(self.n, self.degree, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, HomogeneousPolynomial):
            self._check(other)
            terms: dict = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    terms[m] = terms.get(m, ZERO) + c1 * c2
            return HomogeneousPolynomial(self.n, self.degree + other.degree, terms)
        try:
            c = gq(other)
        except TypeError:
            return NotImplemented
        return HomogeneousPolynomial(self.n, self.degree, {m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = HomogeneousPolynomial.constant(self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.n == other.n
        return self.n == other.n and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.degree, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return f"HomogeneousPolynomial(0, n={self.n}, degree={self.degree})"
        return f"HomogeneousPolynomial({self})"

    def __str__(self):
        parts = []
        for mono in sorted(self.terms, reverse=True):
            c = self.terms[mono]
            vars_ = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(mono) if e
            )
            if not vars_:
                parts.append(str(c))
            elif c == ONE:
                parts.append(vars_)
            elif c == -ONE:
                parts.append(f"-{vars_}")
            else:
                parts.append(f"{c}*{vars_}")
        return " + ".join(parts) if parts else "0"

    # evaluation -------------------------------------------------------------
    def vector(self) -> list[GaussQ]:
        return [self.terms.get(m, ZERO) for m in monomial_basis(self.n, self.degree)]

    def evaluate_exact(self, point: Sequence) -> GaussQ:
        point = [gq(x) for x in point]
        acc = ZERO
        for mono, c in self.terms.items():
            t = c
            for x, e in zip(point, mono):
                if e:
                    t = t * x ** e
            acc = acc + t
        return acc

    def evaluate(self, point) -> complex | np.ndarray:
        """Numerical value at ``point``; a leading axis of length n+1 may carry
        arrays of sample points."""
        point = [np.asarray(x, dtype=complex) for x in point]
        acc = np.zeros(np.broadcast(*point).shape, dtype=complex) if point else 0j
        for mono, c in self.terms.items():
            t = complex(c)
            for x, e in zip(point, mono):
                if e:
                    t = t * x ** e
            acc = acc + t
        return acc[()] if isinstance(acc, np.ndarray) and acc.ndim == 0 else acc

    def compose(self, subs: Sequence["HomogeneousPolynomial"]) -> "HomogeneousPolynomial":
        """Substitute ``x_i -> subs[i]``; all substitutes share one degree."""
        if len(subs) != self.n + 1:
            raise ValueError("need one substitute per variable")
        m = subs[0].n
        e = subs[0].degree
        if any(s.n != m or (s.degree != e and not s.is_zero()) for s in subs):
            raise ValueError("substitutes must be forms of one degree in one ring")
        result = HomogeneousPolynomial.zero(m, self.degree * e)
        cache: dict = {}
        for mono, c in self.terms.items():
            t = HomogeneousPolynomial.constant(m, c)
            for i, k in enumerate(mono):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = subs[i] ** k
                    t = t * cache[key]
            result = result + t
        if result.is_zero():
            return HomogeneousPolynomial.zero(m, self.degree * e)
        return result

    # serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        obj = {
            "degree": self.degree,
            "terms": [
                {"exponents": list(m), "coeff": self.terms[m].to_json()}
                for m in sorted(self.terms, reverse=True)
            ],
        }
        if not self.terms:
            obj["n"] = self.n
        return obj

    @classmethod
    def from_json(cls, obj) -> "HomogeneousPolynomial":
        if isinstance(obj, str):
            raise ValueError("string polynomials need the ambient dimension; use parse()")
        terms = obj.get("terms", [])
        if terms:
            n = len(terms[0]["exponents"]) - 1
        else:
            n = obj["n"]
        return cls(
            n,
            obj["degree"],
            {tuple(t["exponents"]): GaussQ.from_json(t["coeff"]) for t in terms},
        )


def _sym_fraction(x):
    from fractions import Fraction

    import sympy

    x = sympy.nsimplify(x)
    if not x.is_Rational:
        raise ValueError(f"coefficient {x} is not rational")
    return Fraction(int(x.p), int(x.q))


def poly_from_any(obj, n: int | None = None) -> HomogeneousPolynomial:
    if isinstance(obj, HomogeneousPolynomial):
        return obj
    if isinstance(obj, str):
        if n is None:
            raise ValueError("ambient dimension required to parse a string polynomial")
        return HomogeneousPolynomial.parse(obj, n)
    return HomogeneousPolynomial.from_json(obj)


# ---------------------------------------------------------------------------
# varieties
# ---------------------------------------------------------------------------

@dataclass
class VarietyPresentation:
    """A projective variety V in P^n given by generators of I(V), optionally
    with a rational parametrization P^m -> V (m = k for the shipped examples)."""

    n: int
    k: int
    generators: list[HomogeneousPolynomial] = field(default_factory=list)
    parametrization: list[HomogeneousPolynomial] | None = None
    name: str = ""

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError("need 0 <= k <= n")
        for g in self.generators:
            if g.n != self.n:
                raise ValueError("generator in the wrong ambient space")
        if self.parametrization is not None and len(self.parametrization) != self.n + 1:
            raise ValueError("parametrization needs n+1 components")

    @property
    def parameter_dim(self) -> int | None:
        if self.parametrization is None:
            return None
        return self.parametrization[0].n

    def generators_vanish_on_parametrization(self) -> bool:
        if self.parametrization is None:
            return True
        return all(g.compose(self.parametrization).is_zero() for g in self.generators)

    def sample_points(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Points of V (rows, homogeneous coordinates) from the parametrization."""
        if self.parametrization is None:
            raise ValueError("unsupported presentation: no parametrization")
        m = self.parameter_dim
        params = rng.normal(size=(count, m + 1)) + 1j * rng.normal(size=(count, m + 1))
        cols = [np.asarray(p.evaluate(params.T)) for p in self.parametrization]
        return np.stack(cols, axis=1)

    def to_json(self) -> dict:
        obj = {
            "n": self.n,
            "k": self.k,
            "generators": [g.to_json() for g in self.generators],
        }
        if self.parametrization is not None:
            obj["parametrization"] = [p.to_json() for p in self.parametrization]
        if self.name:
            obj["name"] = self.name
        return obj

    @classmethod
    def from_json(cls, obj) -> "VarietyPresentation":
        n = obj["n"]
        gens = [poly_from_any(g, n) for g in obj.get("generators", [])]
        par = obj.get("parametrization")
        if par is not None:
            m = obj.get("parameter_dim", obj["k"])
            par = [poly_from_any(p, m) for p in par]
        return cls(n, obj["k"], gens, par, obj.get("name", ""))


def projective_space(n: int) -> VarietyPresentation:
    ident = [HomogeneousPolynomial.variable(n, i) for i in range(n + 1)]
    return VarietyPresentation(n, n, [], ident, name=f"P^{n}")


def rational_normal_curve(n: int) -> VarietyPresentation:
    """Image of (s:t) -> (s^n : s^(n-1) t : ... : t^n), cut out by 2x2 minors."""
    x = [HomogeneousPolynomial.variable(n, i) for i in range(n + 1)]
    gens = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            gens.append(x[i] * x[j + 1] - x[i + 1] * x[j])
    par = [HomogeneousPolynomial.monomial((n - i, i)) for i in range(n + 1)]
    return VarietyPresentation(n, 1, gens, par, name=f"rational normal curve in P^{n}")


def conic() -> VarietyPresentation:
    """The conic x0*x2 - x1^2 in P^2."""
    return VarietyPresentation(
        2, 1, [HomogeneousPolynomial.parse("x0*x2 - x1**2", 2)],
        [HomogeneousPolynomial.parse(p, 1) for p in ("x0**2", "x0*x1", "x1**2")],
        name="conic x0*x2 = x1^2",
    )


def null_quadric_conic() -> VarietyPresentation:
    """The conic x0^2 + x1^2 + x2^2 = 0 containing every Gauss map of a
    minimal surface in R^3, parametrized by (s:t) -> (s^2-t^2 : i(s^2+t^2) : 2st)."""
    return VarietyPresentation(
        2, 1, [HomogeneousPolynomial.parse("x0**2 + x1**2 + x2**2", 2)],
        [HomogeneousPolynomial.parse(p, 1) for p in ("x0**2 - x1**2", "I*(x0**2 + x1**2)", "2*x0*x1")],
        name="null quadric conic",
    )


# ---------------------------------------------------------------------------
# ideal slices, Hilbert function, quotient bases
# ---------------------------------------------------------------------------

def ideal_slice_rows(V: VarietyPresentation, d: int) -> list[list[GaussQ]]:
    """Spanning vectors of (generated ideal) cap C[x]_d in the monomial basis."""
    rows = []
    for g in V.generators:
        if g.degree > d or g.is_zero():
            continue
        for m in monomial_basis(V.n, d - g.degree):
            rows.append((g * HomogeneousPolynomial.monomial(m)).vector())
    return rows


def hilbert_function(V: VarietyPresentation, d: int) -> int:
    if d < 1:
        raise ValueError("Hilbert function is evaluated for d >= 1")
    total = comb(V.n + d, V.n)
    rows = ideal_slice_rows(V, d)
    return total - (rank(rows) if rows else 0)


@dataclass
class QuotientBasis:
    """An ordered monomial basis of I_d(V) with an exact reduction map."""

    variety: VarietyPresentation
    d: int
    basis: list[MultiIndex]
    # monomial -> coordinates in the basis
    reduction: dict

    @property
    def M(self) -> int:
        return len(self.basis) - 1

    @property
    def n(self) -> int:
        return self.variety.n

    def basis_polynomials(self) -> list[HomogeneousPolynomial]:
        return [HomogeneousPolynomial.monomial(m) for m in self.basis]

    def coordinates(self, Q: HomogeneousPolynomial) -> list[GaussQ]:
        if Q.is_zero():
            return [ZERO] * len(self.basis)
        if Q.degree != self.d or Q.n != self.n:
            raise ValueError(f"degree mismatch: form of degree {Q.degree}, basis of degree {self.d}")
        out = [ZERO] * len(self.basis)
        for mono, c in Q.terms.items():
            for i, a in enumerate(self.reduction[mono]):
                if a:
                    out[i] = out[i] + c * a
        return out

    def representative(self, coords: Sequence) -> HomogeneousPolynomial:
        return HomogeneousPolynomial(self.n, self.d, dict(zip(self.basis, coords)))

    def reduce(self, Q: HomogeneousPolynomial) -> HomogeneousPolynomial:
        return self.representative(self.coordinates(Q))

    def in_ideal(self, Q: HomogeneousPolynomial) -> bool:
        return not any(self.coordinates(Q))


def quotient_basis(V: VarietyPresentation, d: int) -> QuotientBasis:
    if d < 1:
        raise ValueError("quotient basis needs d >= 1")
    monos = monomial_basis(V.n, d)
    rows = ideal_slice_rows(V, d)
    # scanning columns from the smallest monomial up makes every non-pivot
    # monomial independent of the ideal plus all larger monomials kept before it
    red, piv = rref(rows, len(monos), column_order=range(len(monos) - 1, -1, -1)) if rows else ([], [])
    pivset = set(piv)
    basis_idx = [j for j in range(len(monos)) if j not in pivset]
    if not basis_idx:
        raise ValueError("degenerate presentation: the degree-d slice of the quotient is zero")
    pos = {j: i for i, j in enumerate(basis_idx)}
    reduction = {}
    for j in basis_idx:
        reduction[monos[j]] = tuple(ONE if i == pos[j] else ZERO for i in range(len(basis_idx)))
    for row, pc in zip(red, piv):
        reduction[monos[pc]] = tuple(-row[j] for j in basis_idx)
    return QuotientBasis(V, d, [monos[j] for j in basis_idx], reduction)


def rank_in_quotient(B: QuotientBasis, polys: Iterable[HomogeneousPolynomial]) -> int:
    vecs = []
    for P in polys:
        if not P.is_zero() and P.degree != B.d:
            raise ValueError(f"degree mismatch: form of degree {P.degree}, basis of degree {B.d}")
        vecs.append(B.coordinates(P))
    return rank(vecs) if vecs else 0


# ---------------------------------------------------------------------------
# completion hypersurfaces
# ---------------------------------------------------------------------------

class CompletionError(RuntimeError):
    def __init__(self, message, failing_subset=None):
        super().__init__(message)
        self.failing_subset = failing_subset


@dataclass
class Completion:
    hypersurfaces: list[HomogeneousPolynomial]
    seed: int
    attempts: int
    qualifying_subsets: list[tuple[int, ...]]


def full_rank_subsets(B: QuotientBasis, Q: Sequence[HomogeneousPolynomial], size: int) -> list[tuple[int, ...]]:
    coords = [B.coordinates(P) for P in Q]
    return [R for R in itertools.combinations(range(len(Q)), size) if rank([coords[i] for i in R]) == size]


def completion_hypersurfaces(
    B: QuotientBasis,
    Q: Sequence[HomogeneousPolynomial],
    k: int,
    seed: int = 0,
    max_attempts: int = 25,
    height: int = 3,
) -> Completion:
    """Find M-k forms completing every rank-(k+1) subset of Q to a basis of I_d(V)."""
    M = B.M
    if M - k < 0:
        raise ValueError("need M >= k")
    qualifying = full_rank_subsets(B, Q, k + 1)
    if M == k:
        return Completion([], seed, 0, qualifying)
    if not qualifying:
        raise ValueError("no subset of Q with rank = cardinality = k+1")
    coords = [B.coordinates(P) for P in Q]
    last_fail = None
    for attempt in range(max_attempts):
        rng = random.Random(seed + attempt)
        T = [[GaussQ(rng.randint(-height, height)) for _ in range(M + 1)] for _ in range(M - k)]
        failed = None
        for R in qualifying:
            if rank([coords[i] for i in R] + T) != M + 1:
                failed = R
                break
        if failed is None:
            return Completion([B.representative(t) for t in T], seed + attempt, attempt + 1, qualifying)
        last_fail = failed
    raise CompletionError(
        f"no completion found in {max_attempts} attempts; subset {last_fail} stayed rank deficient",
        last_fail,
    )
