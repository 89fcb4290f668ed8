"""Scenario files: loading, validation and the check pipeline.

A scenario names a variety, hypersurfaces, a curve (or a minimal surface from
the catalogue) and the list of checks to run.  Checks execute in dependency
order regardless of the order given, and each produces a verdict:

PASS, VACUOUS   nothing wrong
FAIL            a refuted inequality, a failed certificate or a regression
INCONCLUSIVE    the numerics could not decide
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable

import jsonschema
import numpy as np

from . import gauss, metric
from .curves import CurveRep, ExpPoly, Region, parse_exppoly
from .exact import GaussQ
from .nevanlinna import (DegenerateCurveError, RadiusGrid, characteristic_series, defect_sum_check, hypersurface_divisors,
                         essential_singularity_test, require_nondegenerate, smt_verify)
from .poly import (HomogeneousPolynomial, VarietyPresentation, conic, hilbert_function, null_quadric_conic,
                   projective_space, rational_normal_curve)
from .position import NoWeightsFound, PositionConfig, check_subgeneral_position, nochka_weights, verify_clauses

CHECK_ORDER = [
    "position", "weights", "basis", "curve", "nondegeneracy",
    "characteristic", "essential", "smt", "defect_sum",
    "divisor", "phi", "sum_to_product", "derived_norm",
    "poincare_calibration", "flat_control", "curvature", "main_lemma_bound", "schwarz",
    "minimality", "gauss_density", "total_curvature", "bound", "ftc_criterion", "ramification",
]
GOOD = ("PASS", "VACUOUS")


class ScenarioError(ValueError):
    """Schema or reference errors; ``path`` is a JSON pointer."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path or "/"


def schema() -> dict:
    return json.loads(resources.files("valdist").joinpath("data/scenario.schema.json").read_text())


def _pointer(parts) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in parts) if parts else "/"


def validate(obj: dict) -> None:
    v = jsonschema.Draft202012Validator(schema())
    # deepest first: the most specific location is the useful one
    errors = sorted(v.iter_errors(obj),
                    key=lambda e: (-len(e.absolute_path), [str(p) for p in e.absolute_path], e.message))
    if errors:
        e = errors[0]
        raise ScenarioError(e.message, _pointer(e.absolute_path))
    for i, c in enumerate(obj.get("checks", [])):
        if c not in CHECK_ORDER:
            raise ScenarioError(f"unknown check {c!r}", _pointer(["checks", i]))
    if "surface" in obj and obj["surface"] not in gauss.catalogue():
        raise ScenarioError(f"no catalogue surface named {obj['surface']!r}", "/surface")


# ---------------------------------------------------------------------------
# plain-JSON conversion
# ---------------------------------------------------------------------------

def plain(x):
    """Recursively convert to JSON-safe values (rationals as strings,
    non-finite floats as strings, complex as ``[re, im]``)."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [plain(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        f = float(x)
        return f if math.isfinite(f) else ("inf" if f > 0 else "-inf" if f < 0 else "nan")
    if isinstance(x, (complex, np.complexfloating)):
        return [plain(x.real), plain(x.imag)]
    if isinstance(x, (Fraction, GaussQ, HomogeneousPolynomial, ExpPoly)):
        return str(x)
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# scenario model
# ---------------------------------------------------------------------------

_PN = re.compile(r"^P(\d+)$")


def resolve_variety(spec) -> VarietyPresentation:
    if isinstance(spec, dict):
        return VarietyPresentation.from_json(spec)
    if m := _PN.match(spec):
        return projective_space(int(m.group(1)))
    if spec == "conic":
        return conic()
    if spec == "null_conic":
        return null_quadric_conic()
    if m := re.match(r"^rnc(\d+)$", spec):
        return rational_normal_curve(int(m.group(1)))
    raise ScenarioError(f"unknown variety {spec!r}", "/variety")


@dataclass
class CheckResult:
    name: str
    verdict: str
    detail: dict = field(default_factory=dict)
    csv: tuple | None = None  # (header, rows)

    def to_json(self) -> dict:
        return {"check": self.name, "verdict": self.verdict, "detail": self.detail}


@dataclass
class ScenarioReport:
    id: str
    metadata: dict
    results: list

    @property
    def verdicts(self) -> dict:
        return {r.name: r.verdict for r in self.results}

    @property
    def exit_code(self) -> int:
        vs = [r.verdict for r in self.results]
        if any(v == "FAIL" for v in vs):
            return 2
        if any(v == "INCONCLUSIVE" for v in vs):
            return 3
        return 0

    def to_json(self) -> dict:
        return {"id": self.id, "metadata": self.metadata, "exit_code": self.exit_code,
                "results": [r.to_json() for r in self.results]}


class _Ctx:
    """Lazily built objects shared between checks."""

    def __init__(self, obj: dict, seed: int, tol: float | None, grid: RadiusGrid | None):
        self.obj = obj
        self.seed = obj.get("seed", seed)
        self.tol = tol if tol is not None else obj.get("tol", 1e-10)
        self._grid = grid
        self.V = resolve_variety(obj.get("variety", "P1"))
        n = self.V.n
        self.Q = [HomogeneousPolynomial.parse(s, n) for s in obj.get("hypersurfaces", [])]
        self.cfg = PositionConfig.lift(self.V, self.Q, obj["N"], obj["id"]) if self.Q else None
        self.weights = None
        self._curve = None
        self._data = None
        self._params = None
        self._divisors = None
        self.surface = gauss.catalogue()[obj["surface"]] if "surface" in obj else None

    @property
    def grid(self) -> RadiusGrid:
        if self._grid is not None:
            return self._grid
        g = self.obj.get("grid", {})
        return RadiusGrid.geometric(g.get("s", 1.0), g.get("r_min", 10.0), g.get("r_max", 1e4), g.get("count", 31))

    @property
    def curve(self) -> CurveRep:
        if self._curve is None:
            c = self.obj.get("curve")
            if c is None:
                if self.surface is None:
                    raise ScenarioError("scenario has neither a curve nor a surface", "/curve")
                self._curve = gauss.gauss_map(self.surface)
            else:
                comps = [parse_exppoly(s) for s in c["components"]]
                R = c.get("R")
                region = Region.disk(R) if R is not None else Region.punctured(self.grid.s)
                target = None if self.V.name.startswith("P^") else self.V
                self._curve = CurveRep(comps, region, target, self.obj["id"])
        return self._curve

    def divisors(self) -> list:
        if self._divisors is None:
            cfg = self.need_cfg()
            self._divisors = hypersurface_divisors(self.curve, cfg.original, self.grid.s, self.grid.r_max)
        return self._divisors

    def need_cfg(self) -> PositionConfig:
        if self.cfg is None:
            raise ScenarioError("check needs hypersurfaces", "/hypersurfaces")
        return self.cfg

    def omegas(self):
        if self.weights is not None:
            return self.weights.omegas
        cfg = self.need_cfg()
        if cfg.N == cfg.k:
            return [Fraction(1)] * cfg.q
        self.weights = nochka_weights(cfg)
        return self.weights.omegas

    @property
    def samples(self) -> dict:
        return self.obj.get("samples", {})

    @property
    def R(self) -> float:
        return float(self.samples.get("R", self.obj.get("curve", {}).get("R", 3.0)))

    def data(self) -> metric.ContactData:
        if self._data is None:
            self._data = metric.contact_data(self.curve, self.need_cfg(), self.omegas())
        return self._data

    def params(self) -> metric.MainLemmaParams:
        if self._params is None:
            m = self.obj.get("metric")
            if m is None:
                raise ScenarioError("check needs metric parameters", "/metric")
            d = self.data()
            self._params = metric.MainLemmaParams(
                [Fraction(e) for e in m["eta"]], d.omegas, Fraction(m["epsilon"]), d.M, self.need_cfg().d,
                float(m.get("delta", metric.DEFAULT_DELTA)))
        return self._params

    def grid_samples(self) -> metric.SampleSet:
        s = self.samples
        return metric.SampleSet.disk_grid(self.R, int(s.get("count", 41)), float(s.get("h", 1e-3)))

    def random_samples(self) -> metric.SampleSet:
        s = self.samples
        return metric.SampleSet.random_disk(self.R, int(s.get("random", 200)), float(s.get("h", 1e-3)),
                                            seed=self.seed)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _position(ctx: _Ctx) -> CheckResult:
    res = check_subgeneral_position(ctx.need_cfg())
    return CheckResult("position", "PASS" if res.ok else "FAIL", {"config": ctx.cfg.to_json(), **res.to_json()})


def _weights(ctx: _Ctx) -> CheckResult:
    cfg = ctx.need_cfg()
    if cfg.q <= 2 * cfg.N - cfg.k + 1:
        return CheckResult("weights", "VACUOUS", {"reason": "q <= 2N - k + 1"})
    try:
        w = nochka_weights(cfg)
    except NoWeightsFound as exc:
        return CheckResult("weights", "FAIL", {"error": str(exc)})
    ctx.weights = w
    clauses = verify_clauses(w.omegas, w.omega_tilde, cfg)
    ok = all(clauses[c] for c in ("i", "ii", "iii", "iv"))
    return CheckResult("weights", "PASS" if ok else "FAIL", w.to_json())


def _basis(ctx: _Ctx) -> CheckResult:
    cfg = ctx.need_cfg()
    B = cfg.basis
    H = hilbert_function(ctx.V, cfg.d)
    ok = H == B.M + 1
    return CheckResult("basis", "PASS" if ok else "FAIL",
                       {"d": cfg.d, "H": H, "M": B.M, "basis": [str(p) for p in B.basis_polynomials()]})


def _curve(ctx: _Ctx) -> CheckResult:
    try:
        F = ctx.curve
    except ValueError as exc:
        return CheckResult("curve", "FAIL", {"error": str(exc)})
    return CheckResult("curve", "PASS", {"components": [str(c) for c in F.components],
                                         "on_variety": F.target is not None, "reduced": F.reduction})


def _nondegeneracy(ctx: _Ctx) -> CheckResult:
    try:
        W = require_nondegenerate(ctx.curve, ctx.need_cfg().basis)
    except DegenerateCurveError as exc:
        return CheckResult("nondegeneracy", "FAIL", {"wronskian": "0", "relation": str(exc.relation),
                                                     "error": str(exc)})
    return CheckResult("nondegeneracy", "PASS", {"wronskian": str(W)})


def _characteristic(ctx: _Ctx) -> CheckResult:
    T, err = characteristic_series(ctx.curve, ctx.grid, ctx.tol)
    rows = [[r, t, e] for r, t, e in zip(ctx.grid.radii, T, err)]
    return CheckResult("characteristic", "PASS", {"grid": ctx.grid.to_json(), "T_max": float(T[-1])},
                       (["r", "T_f", "quadrature_error"], rows))


def _essential(ctx: _Ctx) -> CheckResult:
    rep = essential_singularity_test(ctx.curve, ctx.grid, tol=ctx.tol)
    verdict = "INCONCLUSIVE" if rep.verdict == "INCONCLUSIVE" else "PASS"
    return CheckResult("essential", verdict, rep.to_json())


def _smt(ctx: _Ctx) -> CheckResult:
    try:
        rep = smt_verify(ctx.curve, ctx.need_cfg(), ctx.grid, tol=ctx.tol, divisors=ctx.divisors())
    except DegenerateCurveError as exc:
        return CheckResult("smt", "FAIL", {"refused": str(exc), "relation": str(exc.relation)})
    detail = {k: v for k, v in rep.to_json().items() if k not in ("N", "N_trunc", "lhs", "rhs", "margin")}
    return CheckResult("smt", rep.verdict, detail, rep.csv_rows())


def _defect_sum(ctx: _Ctx) -> CheckResult:
    rep = defect_sum_check(ctx.curve, ctx.need_cfg(), ctx.grid, tol=ctx.tol, divisors=ctx.divisors())
    verdict = "VACUOUS" if rep.verdict == "SKIPPED" else rep.verdict
    detail = rep.to_json()
    for d in detail["defects"]:
        d.pop("ratios", None)
    return CheckResult("defect_sum", verdict, detail)


def _divisor(ctx: _Ctx) -> CheckResult:
    cfg = ctx.need_cfg()
    if cfg.N > cfg.k and cfg.q <= 2 * cfg.N - cfg.k + 1:
        return CheckResult("divisor", "VACUOUS", {"reason": "no weights: q <= 2N - k + 1"})
    try:
        rep = metric.divisor_inequality_check(ctx.curve, ctx.need_cfg(), ctx.omegas())
    except metric.RestrictedMode as exc:
        return CheckResult("divisor", "INCONCLUSIVE", {"refused": str(exc)})
    return CheckResult("divisor", rep.verdict, rep.to_json())


def _phi(ctx: _Ctx) -> CheckResult:
    d = ctx.data()
    z = complex(*ctx.samples.get("point", [1.0, 1.0]))
    delta = float(ctx.obj.get("metric", {}).get("delta", metric.DEFAULT_DELTA))
    vals = {}
    ok = True
    for j in range(d.q):
        for p in range(d.M):
            try:
                v = metric.phi_jp(d, p, j, z, delta)
            except metric.ExcludedPoint:
                vals[f"{j},{p}"] = "excluded"
                continue
            vals[f"{j},{p}"] = v
            ok = ok and math.isfinite(v) and v > 0
    return CheckResult("phi", "PASS" if ok else "FAIL", {"z": z, "delta": delta, "values": vals})


def _sum_to_product(ctx: _Ctx) -> CheckResult:
    d = ctx.data()
    S = ctx.random_samples()
    delta = float(ctx.obj.get("metric", {}).get("delta", metric.DEFAULT_DELTA))
    reps = [metric.sum_to_product_check(d, S, p, delta) for p in range(d.M)]
    verdict = "PASS" if all(r.verdict == "PASS" for r in reps) else "FAIL"
    rows = [list(r) for rep in reps for r in rep.rows]
    return CheckResult("sum_to_product", verdict, {"levels": [r.to_json() for r in reps]},
                       (["z_re", "z_im", "log_lhs", "log_rhs", "margin", "verdict"], rows))


def _derived_norm(ctx: _Ctx) -> CheckResult:
    rep = metric.derived_norm_inequality_check(ctx.data(), ctx.grid_samples())
    return CheckResult("derived_norm", rep.verdict, rep.to_json(),
                       (["z_re", "z_im", "lhs", "rhs", "margin", "verdict"], [list(r) for r in rep.rows]))


def _poincare(ctx: _Ctx) -> CheckResult:
    rep = metric.poincare_calibration(ctx.R)
    ok = rep.max_relative_error <= 1e-6 and rep.curvature.verdict == "PASS"
    return CheckResult("poincare_calibration", "PASS" if ok else "FAIL", rep.to_json())


def _flat(ctx: _Ctx) -> CheckResult:
    rep = metric.flat_control()
    # the control must be rejected
    return CheckResult("flat_control", "PASS" if rep.verdict == "FAIL" else "FAIL", rep.to_json())


def _curvature(ctx: _Ctx) -> CheckResult:
    d, prm = ctx.data(), ctx.params()
    rep = metric.curvature_negativity_check(lambda z: metric.lemma_log_eta(d, prm, z), ctx.grid_samples())
    return CheckResult("curvature", rep.verdict, {"params": prm.to_json(), **rep.to_json()},
                       (["z_re", "z_im", "lhs", "rhs", "margin", "verdict"], [list(r) for r in rep.rows]))


def _main_lemma_bound(ctx: _Ctx) -> CheckResult:
    rep = metric.main_lemma_bound_check(ctx.data(), ctx.params(), ctx.R)
    return CheckResult("main_lemma_bound", rep.verdict, rep.to_json())


def _schwarz(ctx: _Ctx) -> CheckResult:
    rep = metric.pseudo_metric_schwarz(ctx.data(), ctx.params(), ctx.grid_samples(), ctx.R)
    return CheckResult("schwarz", rep.verdict, rep.to_json())


def _need_surface(ctx: _Ctx):
    if ctx.surface is None:
        raise ScenarioError("check needs a catalogue surface", "/surface")
    return ctx.surface


def _minimality(ctx: _Ctx) -> CheckResult:
    s = _need_surface(ctx)
    q = s.quadric()
    return CheckResult("minimality", "PASS" if q.is_zero() else "FAIL", {"quadric": str(q), **s.to_json()})


def _gauss_density(ctx: _Ctx) -> CheckResult:
    s = _need_surface(ctx)
    z = complex(*ctx.samples.get("point", [0.0, 0.0]))
    num = float(gauss.induced_metric_density(s, z))
    detail = {"z": z, "numeric": num}
    ok = num > 0
    if all(d.is_polynomial() for d in s.derivatives):
        ex = gauss.induced_metric_density_exact(s, GaussQ(Fraction(z.real), Fraction(z.imag)))
        detail["exact"] = ex
        ok = ok and abs(float(ex) - num) <= 1e-12 * max(1.0, num)
    return CheckResult("gauss_density", "PASS" if ok else "FAIL", detail)


def _total_curvature(ctx: _Ctx) -> CheckResult:
    s = _need_surface(ctx)
    tc = gauss.total_curvature(s)
    ctx.total = tc
    verdict = "INCONCLUSIVE" if tc.verdict == "UNKNOWN" else "PASS"
    return CheckResult("total_curvature", verdict, tc.to_json(),
                       (["size", "total_curvature"], [list(r) for r in tc.sweep]))


def _bound(ctx: _Ctx) -> CheckResult:
    cfg = ctx.need_cfg()
    rep = gauss.bound_evaluator(cfg.N, cfg.k, cfg.d, cfg.basis.M, cfg.q)
    return CheckResult("bound", "PASS" if rep.forms_agree and rep.B1 <= rep.B2 else "FAIL", rep.to_json())


def _ftc(ctx: _Ctx) -> CheckResult:
    s = _need_surface(ctx)
    try:
        rep = gauss.finite_total_curvature_criterion(s, ctx.need_cfg(), curvature=getattr(ctx, "total", None))
    except DegenerateCurveError as exc:
        return CheckResult("ftc_criterion", "VACUOUS", {"excluded": str(exc)})
    return CheckResult("ftc_criterion", rep.verdict, rep.to_json())


def _ramification(ctx: _Ctx) -> CheckResult:
    cfg = ctx.need_cfg()
    r = ctx.obj.get("ramification", {})
    j = int(r.get("index", 0))
    m = r.get("m", 1)
    m = math.inf if m == "inf" else int(m)
    w = gauss.ramification_defect_witness(ctx.curve, cfg.original[j], cfg.basis.M, m)
    return CheckResult("ramification", "PASS" if w.bound is not None else "FAIL", w.to_json())


CHECKS: dict[str, Callable[[_Ctx], CheckResult]] = {
    "position": _position, "weights": _weights, "basis": _basis, "curve": _curve,
    "nondegeneracy": _nondegeneracy, "characteristic": _characteristic, "essential": _essential,
    "smt": _smt, "defect_sum": _defect_sum, "divisor": _divisor, "phi": _phi,
    "sum_to_product": _sum_to_product, "derived_norm": _derived_norm,
    "poincare_calibration": _poincare, "flat_control": _flat, "curvature": _curvature,
    "main_lemma_bound": _main_lemma_bound, "schwarz": _schwarz, "minimality": _minimality,
    "gauss_density": _gauss_density, "total_curvature": _total_curvature, "bound": _bound,
    "ftc_criterion": _ftc, "ramification": _ramification,
}
assert list(CHECKS) == CHECK_ORDER

# later checks are meaningless once these fail
_GATES = ("position", "curve", "nondegeneracy")


def run_scenario(obj: dict, seed: int = 0, tol: float | None = None, grid: RadiusGrid | None = None,
                 only: list | None = None) -> ScenarioReport:
    validate(obj)
    ctx = _Ctx(obj, seed, tol, grid)
    requested = set(only if only is not None else obj.get("checks", []))
    meta = {"variety": ctx.V.name or ctx.V.to_json(), "N": obj.get("N"), "seed": ctx.seed}
    if ctx.cfg is not None:
        meta.update({"d": ctx.cfg.d, "degrees": ctx.cfg.degrees, "q": ctx.cfg.q})
    if "surface" in obj:
        meta["surface"] = obj["surface"]
    results = []
    blocked = None
    for name in CHECK_ORDER:
        if name not in requested:
            continue
        if blocked is not None:
            results.append(CheckResult(name, "FAIL", {"blocked_by": blocked}))
            continue
        try:
            res = CHECKS[name](ctx)
        except DegenerateCurveError as exc:
            res = CheckResult(name, "FAIL", {"refused": str(exc), "relation": str(exc.relation)})
        except metric.HypothesisViolation as exc:
            res = CheckResult(name, "FAIL", {"refused": str(exc)})
        results.append(res)
        if name in _GATES and res.verdict == "FAIL":
            blocked = name
    expected = obj.get("expected", {})
    for r in results:
        want = expected.get(r.name)
        if want is not None and want != r.verdict:
            r.detail["expected"] = want
            r.detail["observed"] = r.verdict
            r.verdict = "FAIL"
    return ScenarioReport(obj["id"], meta, results)


def load(path) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc


def shipped() -> dict[str, dict]:
    """The scenario catalogue shipped with the package, keyed by id."""
    out = {}
    for p in sorted(resources.files("valdist").joinpath("data/scenarios").iterdir(), key=lambda p: p.name):
        if p.name.endswith(".json"):
            obj = json.loads(p.read_text())
            out[obj["id"]] = obj
    return out


def scenario_grid_from_text(text: str) -> RadiusGrid:
    """``"s,r_min,r_max,count"``."""
    try:
        s, a, b, c = text.split(",")
        return RadiusGrid.geometric(float(s), float(a), float(b), int(c))
    except ValueError as exc:
        raise ScenarioError(f"bad grid {text!r}: expected s,r_min,r_max,count") from exc


def curve_from_components(texts: list[str]) -> CurveRep:
    return CurveRep([parse_exppoly(t) for t in texts])
