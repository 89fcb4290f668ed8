"""Independent oracle values, frozen into ``frozen.json``.

Nothing here imports ``valdist``: every number comes from sympy (exact
algebra) or mpmath (high-precision quadrature). Regenerate with
``python tests/oracles/build.py`` and review the diff before committing.
"""
from __future__ import annotations

import itertools
import json
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import sympy as sp

mp.mp.dps = 40
z = sp.Symbol("z")
X = sp.symbols("x0:4")
OUT = Path(__file__).with_name("frozen.json")


def monomials(nvars: int, d: int):
    for c in itertools.combinations_with_replacement(range(nvars), d):
        yield sp.Mul(*[X[i] for i in c])


def hilbert(gens, nvars: int, d: int) -> int:
    """dim of degree-d forms modulo the degree-d slice of the ideal."""
    basis = list(monomials(nvars, d))
    index = {m: i for i, m in enumerate(basis)}
    rows = []
    for g in gens:
        e = sp.Poly(g, *X[:nvars]).total_degree()
        if e > d:
            continue
        for m in monomials(nvars, d - e) if d > e else [sp.Integer(1)]:
            p = sp.Poly(sp.expand(g * m), *X[:nvars])
            row = [0] * len(basis)
            for mon, c in p.terms():
                row[index[sp.Mul(*[X[i] ** k for i, k in enumerate(mon)])]] = c
            rows.append(row)
    r = sp.Matrix(rows).rank() if rows else 0
    return len(basis) - r


def wronskian(fs):
    n = len(fs)
    return sp.simplify(sp.Matrix(n, n, lambda i, j: sp.diff(fs[j], z, i)).det())


def circle_mean(f, r):
    return mp.quad(lambda t: f(r * mp.expj(t)), mp.linspace(0, 2 * mp.pi, 9)) / (2 * mp.pi)


def T_curve(comps, r, s):
    def ln(w):
        return 0.5 * mp.log(sum(abs(c(w)) ** 2 for c in comps))
    return circle_mean(ln, r) - circle_mean(ln, s)


def main() -> None:
    out: dict = {}

    # Hilbert functions by exact rank of ideal slices
    conic = [X[0] * X[2] - X[1] ** 2]
    twisted = [X[0] * X[2] - X[1] ** 2, X[0] * X[3] - X[1] * X[2], X[1] * X[3] - X[2] ** 2]
    out["hilbert_conic"] = {str(d): hilbert(conic, 3, d) for d in range(1, 7)}
    out["hilbert_twisted_cubic"] = {str(d): hilbert(twisted, 4, d) for d in range(1, 5)}

    # rank of {x0^2, x1^2, (x0+x1)^2} via a 3x3 determinant
    M = sp.Matrix([[1, 0, 0], [0, 0, 1], [1, 2, 1]])
    out["three_squares_det"] = int(M.det())

    # Wronskians, symbolically
    E = sp.exp
    out["wronskians"] = {
        "exp(z),exp(2*z)": str(wronskian([E(z), E(2 * z)])),
        "exp(z),z*exp(z)": str(wronskian([E(z), z * E(z)])),
        "z,z**2,z**3": str(wronskian([z, z ** 2, z ** 3])),
        "1,exp(z)": str(wronskian([sp.Integer(1), E(z)])),
        "1,z,z**2": str(wronskian([sp.Integer(1), z, z ** 2])),
        "1,exp(z),exp(2*z)": str(wronskian([sp.Integer(1), E(z), E(2 * z)])),
    }

    # contact value of x1 against (1, e^z) at 0
    out["phi_1_ez_x1_p0_at_0"] = float(1 / mp.sqrt(2))

    # counting function of {+1, -1} between 0.5 and 2
    out["counting_pm1"] = float(2 * mp.log(2))

    # characteristic of (1, z^m): quadrature of the circle mean
    radii = [2, 5, 10, 20, 50, 100, 200, 500, 1000]
    out["T_radii"] = radii
    out["T_1_zm"] = {
        str(m): [float(T_curve([lambda w: 1, lambda w, m=m: w ** m], r, 1)) for r in radii] for m in range(1, 6)
    }
    ez_radii = [2, 5, 10, 20, 50, 100]
    out["T_1_ez_radii"] = ez_radii
    out["T_1_ez"] = [float(T_curve([lambda w: 1, mp.exp], r, 1)) for r in ez_radii]

    # proximity m(r, s, f'/f) for f = (z-1)(z-2), s = 3
    def kinked_mean(r):
        # log+ has kinks where |f'/f| = 1; integrate piecewise between them
        def g(t):
            w = r * mp.expj(t)
            return abs((2 * w - 3) / ((w - 1) * (w - 2))) - 1
        ts = [2 * mp.pi * k / 4000 for k in range(4001)]
        kinks = [mp.findroot(g, (a, b), solver="bisect") for a, b in zip(ts, ts[1:]) if g(a) * g(b) < 0]
        return mp.quad(lambda t: max(mp.log(g(t) + 1), 0), [0, *kinks, 2 * mp.pi]) / (2 * mp.pi)
    base = kinked_mean(3)
    out["logderiv_quadratic"] = {str(r): float(kinked_mean(r) - base) for r in (4, 10, 100)}

    # total curvature as the area integral of -4|g'|^2/(1+|g|^2)^2
    enn = mp.quad(lambda rr, t: -4 * rr / (1 + rr ** 2) ** 2, [0, mp.inf], [0, 2 * mp.pi])
    cat = mp.quad(lambda x, y: -4 * mp.exp(2 * x) / (1 + mp.exp(2 * x)) ** 2, [-mp.inf, 0, mp.inf], [0, 2 * mp.pi])
    out["total_curvature"] = {"enneper": float(enn), "catenoid": float(cat)}

    # Laplacians in closed form
    x, y, R = sp.symbols("x y R", real=True)
    lam = 2 * R / (R ** 2 - x ** 2 - y ** 2)
    lap = sp.diff(sp.log(lam), x, 2) + sp.diff(sp.log(lam), y, 2)
    out["poincare_identity_residual"] = str(sp.simplify(lap - lam ** 2))
    u = sp.log(1 + x ** 2 + y ** 2)
    lap_u = sp.simplify(sp.diff(u, x, 2) + sp.diff(u, y, 2))
    pts = [[0.3, 0.1], [-1.2, 0.7], [2.0, -2.5], [0.0, 0.0]]
    out["laplacian_log_1z"] = {"expr": str(lap_u), "points": pts,
                               "values": [float(lap_u.subs({x: a, y: b})) for a, b in pts]}

    # divisor inequality on the conic (1, z, z^2) with tangent lines t = 2..5
    F = [sp.Integer(1), z, z ** 2]
    W = wronskian(F)
    vals = []
    for t in (2, 3, 4, 5):
        Q = sp.expand(t ** 2 * F[0] - 2 * t * F[1] + F[2])
        ord_Q = sp.roots(sp.Poly(Q, z))[t]
        ord_W = 0 if sp.Poly(W, z).eval(t) != 0 else None
        vals.append({"t": t, "ord_Q": int(ord_Q), "ord_W": ord_W, "value": ord_W - ord_Q + min(ord_Q, 2)})
    out["divisor_conic_tangents"] = vals

    # Nochka: k = 1, N = 2, q = 6 on the conic, exhaustive over a rational grid
    q, N, k = 6, 2, 1
    wt = Fraction(1, 2)
    target = wt * (q - 2 * N + k - 1) + k + 1
    grid = [Fraction(j, 12) for j in range(1, 7)]
    feasible = [w for w in itertools.product(grid, repeat=q)
                if sum(w) == target and all(v <= wt for v in w)]
    out["nochka_k1_N2_q6"] = {"sum": str(target), "solutions": [[str(v) for v in w] for w in feasible]}

    # ramification: Enneper Gauss map against x0 has simple zeros at +-1
    G0 = sp.expand((1 - z ** 2) / 2)
    out["enneper_x0_orders"] = {str(r): int(m) for r, m in sp.roots(sp.Poly(G0, z)).items()}

    # classical hyperplane bound m(m+1)/2 with m = n+1
    out["classical_bound"] = {str(n): (n + 1) * (n + 2) // 2 for n in range(1, 8)}

    OUT.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
