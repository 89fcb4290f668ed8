"""Wronskians, derived curves and contact functions.

Subset Wronskians are built bottom-up by Laplace expansion along the row of
highest derivatives:

    W(h_S) = sum_{j in S} (-1)^(|S|-1+pos(j)) h_j^(|S|-1) W(h_{S - j})

so one pass yields the Wronskian of every column subset up to a given size,
which is exactly the data of all derived curves at once.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curves import CurveRep, ExpPoly, compose_with_polynomial
from .exact import ZERO, GaussQ
from .poly import HomogeneousPolynomial, QuotientBasis


class DegeneracyError(ValueError):
    """Raised at points where |F_p| vanishes."""


def subset_wronskians(h: Sequence[ExpPoly], max_size: int | None = None) -> dict:
    """``{S: W(h_S)}`` for every increasing index tuple ``S`` with
    ``1 <= |S| <= max_size``."""
    n = len(h)
    max_size = n if max_size is None else min(max_size, n)
    derivs = [[f] for f in h]

    def d(j, k):
        while len(derivs[j]) <= k:
            derivs[j].append(derivs[j][-1].derivative())
        return derivs[j][k]

    table: dict = {(j,): h[j] for j in range(n)}
    for size in range(2, max_size + 1):
        for S in itertools.combinations(range(n), size):
            acc = ExpPoly()
            for pos, j in enumerate(S):
                minor = table[S[:pos] + S[pos + 1:]]
                if minor.is_zero():
                    continue
                term = d(j, size - 1) * minor
                acc = acc - term if (size - 1 + pos) % 2 else acc + term
            table[S] = acc
    return table


def wronskian(h: Sequence[ExpPoly]) -> ExpPoly:
    if not h:
        raise ValueError("empty family")
    return subset_wronskians(h)[tuple(range(len(h)))]


def wronskian_scaling_check(h: Sequence[ExpPoly], g: ExpPoly) -> bool:
    """Exact check of ``W(g h_0, ..., g h_n) == g^(n+1) W(h_0, ..., h_n)``."""
    return wronskian([g * f for f in h]) == (g ** len(h)) * wronskian(h)


def is_linearly_dependent(h: Sequence[ExpPoly]) -> bool:
    """Exact linear dependence over C, decided by coefficient comparison."""
    keys = sorted({(lam, k) for f in h for lam, p in f.terms.items() for k in range(len(p))},
                  key=lambda t: (t[0].sort_key(), t[1]))
    if not keys:
        return True
    from .exact import rank

    rows = [[f.terms.get(lam, [])[k] if k < len(f.terms.get(lam, [])) else ZERO for lam, k in keys] for f in h]
    return rank(rows) < len(h)


# ---------------------------------------------------------------------------
# derived curves
# ---------------------------------------------------------------------------

@dataclass
class DerivedCurve:
    base: CurveRep
    basis: QuotientBasis
    p: int
    funcs: list  # v_i(F), i = 0..M
    components: dict  # (p+1)-subset -> ExpPoly

    @property
    def M(self) -> int:
        return len(self.funcs) - 1

    def norm(self, z) -> np.ndarray:
        """``|F_p|`` at ``z`` (arrays allowed)."""
        return np.exp(self.log_norm(z))

    def log_norm(self, z) -> np.ndarray:
        return _log_norm(list(self.components.values()), z)

    def is_identically_zero(self) -> bool:
        return all(c.is_zero() for c in self.components.values())


def basis_composition(F: CurveRep, B: QuotientBasis) -> list[ExpPoly]:
    return [compose_with_polynomial(v, F) for v in B.basis_polynomials()]


def derived_curves(F: CurveRep, B: QuotientBasis, levels: Sequence[int] | None = None) -> dict[int, DerivedCurve]:
    funcs = basis_composition(F, B)
    M = len(funcs) - 1
    levels = list(range(M + 1)) if levels is None else list(levels)
    for p in levels:
        if not 0 <= p <= M:
            raise ValueError(f"level {p} outside 0..{M}")
    table = subset_wronskians(funcs, max(levels) + 1)
    out = {}
    for p in levels:
        comps = {S: table[S] for S in itertools.combinations(range(M + 1), p + 1)}
        out[p] = DerivedCurve(F, B, p, funcs, comps)
    return out


def derived_curve(F: CurveRep, B: QuotientBasis, p: int) -> DerivedCurve:
    return derived_curves(F, B, [p])[p]


def nondegeneracy_witness(F: CurveRep, B: QuotientBasis) -> ExpPoly:
    """The top Wronskian of ``v_0(F), ..., v_M(F)``; identically zero exactly
    when the curve is degenerate over the quotient."""
    return wronskian(basis_composition(F, B))


# ---------------------------------------------------------------------------
# interior products and contact functions
# ---------------------------------------------------------------------------

def unit_coordinates(B: QuotientBasis, Q: HomogeneousPolynomial) -> np.ndarray:
    """Basis coordinates of ``[Q]`` scaled to unit Euclidean length."""
    a = np.array([complex(c) for c in B.coordinates(Q)])
    nrm = np.linalg.norm(a)
    if nrm == 0:
        raise ValueError("Q lies in the ideal of V")
    return a / nrm


def interior_product_against(D: DerivedCurve, a: Sequence) -> dict:
    """Components of ``F_p ∨ a`` indexed by ``p``-subsets ``J``:
    ``sum_{l not in J} a_l W(v_l, v_J)``.

    ``a`` is a coordinate vector (exact or float).  For exact ``a`` the result
    is exact.
    """
    exact = all(isinstance(x, (GaussQ, int)) for x in a)
    M = D.M
    out = {}
    for J in itertools.combinations(range(M + 1), D.p):
        acc = ExpPoly() if exact else []
        for l in range(M + 1):
            if l in J or not a[l]:
                continue
            S = tuple(sorted(J + (l,)))
            sign = -1 if S.index(l) % 2 else 1
            if exact:
                acc = acc + D.components[S].scale(a[l] * sign)
            else:
                acc.append((complex(a[l]) * sign, D.components[S]))
        out[J] = acc
    return out


def _log_norm(funcs: list, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    live = [f for f in funcs if not f.is_zero()]
    if not live:
        return np.full(z.shape, -np.inf)
    s = np.max([f.shift(z) for f in live], axis=0)
    tot = sum(np.abs(f.shifted(z, s)) ** 2 for f in live)
    with np.errstate(divide="ignore"):
        return 0.5 * np.log(tot) + s


def _log_norm_weighted(comps: dict, z) -> np.ndarray:
    """``log |sum-form|`` for float-weighted interior product components."""
    z = np.asarray(z, dtype=complex)
    funcs = [f for terms in comps.values() for _, f in terms if not f.is_zero()]
    if not funcs:
        return np.full(z.shape, -np.inf)
    s = np.max([f.shift(z) for f in funcs], axis=0)
    tot = np.zeros(z.shape)
    for terms in comps.values():
        v = np.zeros(z.shape, dtype=complex)
        for c, f in terms:
            v = v + c * f.shifted(z, s)
        tot = tot + np.abs(v) ** 2
    with np.errstate(divide="ignore"):
        return 0.5 * np.log(tot) + s


def interior_log_norm(D: DerivedCurve, a: Sequence, z) -> np.ndarray:
    comps = interior_product_against(D, [complex(x) for x in a])
    return _log_norm_weighted(comps, z)


@dataclass
class ContactValue:
    j: int | None
    p: int
    z: complex
    value: float
    log_numerator: float
    log_denominator: float


def contact_log(D: DerivedCurve, a: Sequence, z) -> np.ndarray:
    """``log phi_p`` at ``z``; ``-inf`` where the numerator vanishes."""
    den = D.log_norm(z)
    if np.any(~np.isfinite(den)):
        raise DegeneracyError("|F_p| vanishes: degeneracy locus point")
    return interior_log_norm(D, a, z) - den


def contact_function(D: DerivedCurve, a: Sequence, z: complex, j: int | None = None) -> ContactValue:
    num = float(interior_log_norm(D, a, z))
    den = float(D.log_norm(z))
    if not math.isfinite(den):
        raise DegeneracyError(f"|F_{D.p}| vanishes at z = {z}: degeneracy locus point")
    value = 0.0 if num == -math.inf else math.exp(num - den)
    return ContactValue(j, D.p, complex(z), value, num, den)


def sigma(p: int) -> int:
    return p * (p + 1) // 2


def coordinate_change_check(h: Sequence[ExpPoly], c) -> bool:
    """For ``z = c xi``: ``W_xi(h(c xi)) == c^sigma * W_z(h)(c xi)`` with
    ``sigma = p(p+1)/2`` for ``p + 1`` functions (exact)."""
    from .exact import gq

    c = gq(c)
    lhs = wronskian([f.substitute_scale(c) for f in h])
    rhs = wronskian(h).substitute_scale(c).scale(c ** sigma(len(h) - 1))
    return lhs == rhs
