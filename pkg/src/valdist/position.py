"""Subgeneral position, Nochka weights and the comparability constants.

Weights are produced by the exact simplex in :mod:`valdist.lp`.  Besides the
defining constraints, the solver can impose ``sum_{i in P} w_i <= min(rank P,
k+1)`` for every small subset ``P``; with those in place a greedy
(matroid) argument gives the subset-selection property for every choice of
``E_i >= 1`` at once, so it no longer has to be checked query by query.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .exact import ZERO, nullspace, rank, ugcd, utrim
from .lp import linprog_exact
from .poly import HomogeneousPolynomial, QuotientBasis, VarietyPresentation, quotient_basis


@dataclass
class PositionConfig:
    V: VarietyPresentation
    hypersurfaces: list  # lifted to the common degree d
    N: int
    original: list = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        if not self.original:
            self.original = list(self.hypersurfaces)
        if len(self.hypersurfaces) < self.k + 1:
            raise ValueError("need q >= k + 1 hypersurfaces")
        if self.N < self.k:
            raise ValueError("need N >= k")
        if len({h.degree for h in self.hypersurfaces}) != 1:
            raise ValueError("stored hypersurfaces must share one degree; use PositionConfig.lift")

    @classmethod
    def lift(cls, V: VarietyPresentation, Q: Sequence[HomogeneousPolynomial], N: int, name: str = "") -> "PositionConfig":
        """Raise each ``Q_i`` to the power ``d / deg Q_i`` with ``d`` the lcm."""
        for P in Q:
            if P.n != V.n:
                raise ValueError("hypersurface in the wrong ambient space")
            if P.degree < 1:
                raise ValueError("hypersurfaces must have degree >= 1")
        d = reduce(math.lcm, (P.degree for P in Q), 1)
        lifted = [P ** (d // P.degree) for P in Q]
        return cls(V, lifted, N, list(Q), name)

    @property
    def k(self) -> int:
        return self.V.k

    @property
    def q(self) -> int:
        return len(self.hypersurfaces)

    @property
    def d(self) -> int:
        return self.hypersurfaces[0].degree

    @property
    def degrees(self) -> list[int]:
        return [P.degree for P in self.original]

    @property
    def lift_exponents(self) -> list[int]:
        return [self.d // P.degree for P in self.original]

    @cached_property
    def basis(self) -> QuotientBasis:
        return quotient_basis(self.V, self.d)

    @cached_property
    def coordinates(self) -> list:
        return [self.basis.coordinates(P) for P in self.hypersurfaces]

    def rank_of(self, idx: Sequence[int]) -> int:
        return rank([self.coordinates[i] for i in idx]) if idx else 0

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "d": self.d,
            "q": self.q,
            "degrees": self.degrees,
            "lift_exponents": self.lift_exponents,
            "hypersurfaces": [str(P) for P in self.original],
        }


# ---------------------------------------------------------------------------
# position check
# ---------------------------------------------------------------------------

@dataclass
class PositionResult:
    ok: bool
    method: str
    subset: tuple | None = None
    point: list | None = None
    checked: int = 0

    def to_json(self) -> dict:
        obj = {"ok": self.ok, "method": self.method, "subsets_checked": self.checked}
        if self.subset is not None:
            obj["violating_subset"] = list(self.subset)
        if self.point is not None:
            obj["witness_point"] = [[complex(x).real, complex(x).imag] for x in self.point]
        return obj


def _binary_common_zero(forms: list[HomogeneousPolynomial]):
    """Common zero of binary forms in P^1, or None."""
    if any(f.is_zero() for f in forms):
        return (1, 0)
    # (1:0) is a root iff the x0^deg coefficient vanishes
    if all(not f.terms.get((f.degree, 0), ZERO) for f in forms):
        return (1, 0)
    # dehomogenize at x0 = 1: roots u give points (1 : u)
    g = None
    for f in forms:
        u = utrim([f.terms.get((f.degree - j, j), ZERO) for j in range(f.degree + 1)])
        g = u if g is None else ugcd(g, u)
    if len(g) <= 1:
        return None
    root = np.roots([complex(c) for c in g][::-1])[0]
    return (1, complex(root))


def _linear_common_zero(forms: list[HomogeneousPolynomial], n: int):
    unit = [tuple(1 if j == i else 0 for j in range(n + 1)) for i in range(n + 1)]
    rows = [[f.terms.get(e, ZERO) for e in unit] for f in forms]
    ns = nullspace(rows, n + 1)
    return ns[0] if ns else None


def _groebner_empty(forms: list[HomogeneousPolynomial]) -> bool:
    """True iff the forms have no common projective zero (zero-dimensional
    affine ideal, which for homogeneous ideals means only the origin)."""
    import sympy

    m = forms[0].n
    xs = sympy.symbols(f"x0:{m + 1}")
    exprs = []
    for f in forms:
        e = 0
        for mono, c in f.terms.items():
            coeff = sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(c.im.numerator, c.im.denominator)
            e += coeff * sympy.prod([x ** k for x, k in zip(xs, mono)])
        exprs.append(sympy.expand(e))
    complex_coeffs = any(not c.is_real() for f in forms for c in f.terms.values())
    G = sympy.groebner(exprs, *xs, order="grevlex", **({"extension": sympy.I} if complex_coeffs else {}))
    return bool(G.is_zero_dimensional)


def check_subgeneral_position(cfg: PositionConfig) -> PositionResult:
    V = cfg.V
    if V.parametrization is None:
        raise ValueError("unsupported presentation: V has no rational parametrization")
    m = V.parameter_dim
    pulled = [P.compose(V.parametrization) for P in cfg.hypersurfaces]
    is_identity = m == V.n and all(
        p == HomogeneousPolynomial.variable(V.n, i) for i, p in enumerate(V.parametrization)
    )
    linear = is_identity and all(P.degree == 1 for P in cfg.original)
    method = "gcd of pulled-back binary forms" if m == 1 else ("rank of linear forms" if linear else "groebner zero-dimensionality")
    size = cfg.N + 1
    checked = 0
    # with q <= N there is no (N+1)-subset and the condition is vacuous
    for R in itertools.combinations(range(cfg.q), size):
        checked += 1
        if m == 1:
            pt = _binary_common_zero([pulled[i] for i in R])
            if pt is not None:
                image = [complex(p.evaluate(pt)) for p in V.parametrization]
                return PositionResult(False, method, R, image, checked)
        elif linear:
            v = _linear_common_zero([cfg.original[i] for i in R], V.n)
            if v is not None:
                return PositionResult(False, method, R, [complex(x) for x in v], checked)
        else:
            if any(pulled[i].is_zero() for i in R) or not _groebner_empty([pulled[i] for i in R]):
                return PositionResult(False, method, R, None, checked)
    return PositionResult(True, method, None, None, checked)


# ---------------------------------------------------------------------------
# Nochka weights
# ---------------------------------------------------------------------------

class NoWeightsFound(RuntimeError):
    pass


@dataclass
class NochkaWeights:
    omegas: list  # Fractions
    omega_tilde: Fraction
    certificate: dict

    def to_json(self) -> dict:
        return {
            "omegas": [str(w) for w in self.omegas],
            "omega_tilde": str(self.omega_tilde),
            "certificate": self.certificate,
        }


def omega_bounds(N: int, k: int) -> tuple[Fraction, Fraction]:
    return Fraction(k + 1, 2 * N - k + 1), Fraction(k, N)


def verify_clauses(omegas: Sequence[Fraction], omega_tilde: Fraction, cfg: PositionConfig) -> dict:
    """Exact check of the four defining clauses; returns a per-clause verdict."""
    N, k, q = cfg.N, cfg.k, cfg.q
    lo, hi = omega_bounds(N, k)
    res = {
        "i": all(0 < w <= 1 for w in omegas),
        "ii": sum(omegas, Fraction(0)) == omega_tilde * (q - 2 * N + k - 1) + k + 1,
        "iii": lo <= omega_tilde <= hi,
        "iv": all(sum((omegas[i] for i in R), Fraction(0)) <= k + 1
                  for R in itertools.combinations(range(q), min(N + 1, q))),
        "max": max(omegas) == omega_tilde,
    }
    return res


def _rank_constraints(cfg: PositionConfig):
    """Subsets P with |P| <= N+1 whose rank cap is binding."""
    out = []
    for size in range(2, min(cfg.N + 1, cfg.q) + 1):
        for P in itertools.combinations(range(cfg.q), size):
            cap = min(cfg.rank_of(P), cfg.k + 1)
            if cap < size:
                out.append((P, cap))
    return out


def _solve_for(cfg: PositionConfig, w: Fraction, rank_rows, force: int | None):
    q, N, k = cfg.q, cfg.N, cfg.k
    nv = q + 1  # omegas then t
    A_ub, b_ub = [], []
    for i in range(q):
        row = [0] * nv
        row[q] = 1
        row[i] = -1
        A_ub.append(row)
        b_ub.append(0)  # t <= w_i
        row = [0] * nv
        row[i] = 1
        A_ub.append(row)
        b_ub.append(w)  # w_i <= w~
    for R in itertools.combinations(range(q), min(N + 1, q)):
        row = [0] * nv
        for i in R:
            row[i] = 1
        A_ub.append(row)
        b_ub.append(k + 1)
    for P, cap in rank_rows:
        row = [0] * nv
        for i in P:
            row[i] = 1
        A_ub.append(row)
        b_ub.append(cap)
    A_eq = [[1] * q + [0]]
    b_eq = [w * (q - 2 * N + k - 1) + k + 1]
    if force is not None:
        row = [0] * nv
        row[force] = 1
        A_eq.append(row)
        b_eq.append(w)
    c = [0] * q + [1]
    res = linprog_exact(c, A_ub, b_ub, A_eq, b_eq, maximize=True)
    if res.status != "optimal" or res.x[q] <= 0:
        return None
    return res.x[:q]


def _candidates(lo: Fraction, hi: Fraction, levels: int):
    yield lo
    if hi != lo:
        yield hi
        for lev in range(1, levels + 1):
            for j in range(1, 2 ** lev, 2):
                yield lo + (hi - lo) * Fraction(j, 2 ** lev)


def nochka_weights(cfg: PositionConfig, strengthen: bool = True, levels: int = 6) -> NochkaWeights:
    q, N, k = cfg.q, cfg.N, cfg.k
    if q <= 2 * N - k + 1:
        raise ValueError(f"need q > 2N - k + 1 = {2 * N - k + 1}, got q = {q}")
    lo, hi = omega_bounds(N, k)
    modes = [True, False] if strengthen else [False]
    tried = 0
    for strong in modes:
        rank_rows = _rank_constraints(cfg) if strong else []
        for w in _candidates(lo, hi, levels):
            tried += 1
            x = _solve_for(cfg, w, rank_rows, None)
            if x is not None and max(x) != w:
                x = next((y for j in range(q) if (y := _solve_for(cfg, w, rank_rows, j)) is not None), None)
            if x is None:
                continue
            clauses = verify_clauses(x, w, cfg)
            if not all(clauses.values()):
                continue
            cert = {
                "clauses": {key: bool(v) for key, v in clauses.items()},
                "arithmetic": "exact rational",
                "omega_tilde_candidates_tried": tried,
                "rank_constraints": len(rank_rows),
                "clause_v": "all E (rank-capped subset sums)" if strong else "per query only",
            }
            return NochkaWeights(list(x), w, cert)
    raise NoWeightsFound(f"no certified weights found after {tried} candidate values of omega~")


# ---------------------------------------------------------------------------
# subset selection and comparability constants
# ---------------------------------------------------------------------------

@dataclass
class SubsetChoice:
    subset: tuple
    log_lhs: float
    log_rhs: float


def select_subset_R0(weights: NochkaWeights, cfg: PositionConfig, R: Sequence[int], E: Sequence[float]) -> SubsetChoice:
    """A full-rank ``(k+1)``-subset ``R0`` of ``R`` with
    ``prod_R E_i^w_i <= prod_R0 E_i``; ``E`` is indexed like the hypersurfaces."""
    if any(E[i] < 1 for i in R):
        raise ValueError("all E_i must be >= 1")
    lhs = sum(float(weights.omegas[i]) * math.log(E[i]) for i in R)
    best = None
    for R0 in itertools.combinations(sorted(R), cfg.k + 1):
        if cfg.rank_of(R0) != cfg.k + 1:
            continue
        rhs = sum(math.log(E[i]) for i in R0)
        if lhs <= rhs + 1e-12 * max(1.0, abs(rhs)) and (best is None or rhs > best.log_rhs):
            best = SubsetChoice(R0, lhs, rhs)
    if best is None:
        raise RuntimeError(f"internal consistency failure: no qualifying subset of {tuple(R)}")
    return best


def norm_comparability(cfg: PositionConfig, R: Sequence[int], samples: np.ndarray) -> tuple[float, float]:
    """Empirical ``(alpha, beta)`` with ``alpha ||x||^d <= max_R |Q_i(x)| <= beta ||x||^d``."""
    samples = np.atleast_2d(np.asarray(samples, dtype=complex))
    vals = np.max([np.abs(np.asarray(cfg.hypersurfaces[i].evaluate(samples.T))) for i in R], axis=0)
    ratio = vals / np.linalg.norm(samples, axis=1) ** cfg.d
    alpha, beta = float(np.min(ratio)), float(np.max(ratio))
    if alpha <= 0:
        raise RuntimeError("alpha = 0: a sample lies on all of the hypersurfaces (missed intersection point)")
    return alpha, beta
