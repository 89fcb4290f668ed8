"""Command line front end.

Every verifier subcommand builds a scenario object and runs it through the
same pipeline as ``valdist run``, so exit codes and report layout agree:
0 when every check is PASS or VACUOUS, 2 on any FAIL, 3 when the worst
verdict is INCONCLUSIVE, and 1 for malformed input (the message carries a
JSON pointer into the offending scenario).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .curves import parse_exppoly
from .poly import hilbert_function
from .scenario import (ScenarioError, ScenarioReport, dumps, load, resolve_variety, run_scenario,
                       scenario_grid_from_text, shipped)
from .wronskian import wronskian

METRIC_CHECKS = ["divisor", "phi", "sum_to_product", "derived_norm", "poincare_calibration", "flat_control",
                 "curvature", "main_lemma_bound", "schwarz"]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for randomized sample sets")
    p.add_argument("--tol", type=float, default=None, help="quadrature tolerance")
    p.add_argument("--grid", default=None, metavar="S,RMIN,RMAX,COUNT", help="geometric radius grid")
    p.add_argument("--out", default=None, metavar="DIR", help="write JSON and CSV reports here")


def _config_args(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--variety", default="P1", help="P<n>, conic, null_conic or rnc<n>")
    p.add_argument("--hyper", action="append", default=[], required=required, metavar="POLY",
                   help="hypersurface in x0..xn (repeatable)")
    p.add_argument("-N", "--N", type=int, default=None, dest="N", help="subgeneral position index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="valdist", description="Value distribution verifiers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hilbert", help="Hilbert function of a variety")
    p.add_argument("variety")
    p.add_argument("degrees", type=int, nargs="+")

    p = sub.add_parser("nochka", help="Nochka weights for a hypersurface family")
    _common(p)
    _config_args(p, True)

    p = sub.add_parser("wronskian", help="Wronskian of exponential polynomials")
    p.add_argument("components", nargs="+")

    p = sub.add_parser("nevanlinna", help="characteristic and essential-singularity test of a curve")
    _common(p)
    _config_args(p, False)
    p.add_argument("components", nargs="+")

    p = sub.add_parser("smt", help="second main theorem and defect-sum verification")
    _common(p)
    _config_args(p, True)
    p.add_argument("components", nargs="+")

    p = sub.add_parser("metric-checks", help="contact-function and curvature checks")
    _common(p)
    p.add_argument("scenario", nargs="?", help="scenario file or shipped scenario id supplying curve and metric parameters")

    p = sub.add_parser("gauss", help="minimal-surface checks for a catalogue surface")
    _common(p)
    _config_args(p, False)
    p.add_argument("surface")

    p = sub.add_parser("run", help="run scenario files")
    _common(p)
    p.add_argument("scenarios", nargs="*", help="scenario JSON files")
    p.add_argument("--shipped", action="store_true", help="also run every scenario shipped with the package")
    p.add_argument("--jobs", type=int, default=1, help="scenarios run concurrently in this many processes")
    return parser


def _adhoc(args, ident: str, checks: list[str], **extra) -> dict:
    obj = {"id": ident, "variety": args.variety, "checks": checks, **extra}
    if args.hyper:
        obj["hypersurfaces"] = args.hyper
        n = resolve_variety(args.variety).n
        obj["N"] = args.N if args.N is not None else n
    return obj


def _scenario_for(args) -> list[dict]:
    cmd = args.command
    if cmd == "nochka":
        return [_adhoc(args, "cli-nochka", ["position", "weights", "basis"])]
    if cmd == "nevanlinna":
        checks = ["curve", "characteristic", "essential"]
        if args.hyper:
            checks = ["position", "basis"] + checks + ["nondegeneracy", "defect_sum"]
        return [_adhoc(args, "cli-nevanlinna", checks, curve={"components": args.components})]
    if cmd == "smt":
        checks = ["position", "weights", "basis", "curve", "nondegeneracy", "smt", "defect_sum"]
        return [_adhoc(args, "cli-smt", checks, curve={"components": args.components})]
    if cmd == "gauss":
        checks = ["minimality", "gauss_density", "total_curvature"]
        if args.hyper:
            checks = ["position", "basis", "nondegeneracy"] + checks + ["bound", "ftc_criterion"]
        return [_adhoc(args, "cli-gauss", checks, surface=args.surface)]
    if cmd == "metric-checks":
        if args.scenario is None:
            return [{"id": "cli-metric-controls", "checks": ["poincare_calibration", "flat_control"]}]
        cat = shipped()
        obj = dict(cat[args.scenario]) if args.scenario in cat and not Path(args.scenario).exists() \
            else load(args.scenario)
        obj["checks"] = [c for c in obj.get("checks", []) if c in METRIC_CHECKS] or \
            ["poincare_calibration", "flat_control"]
        return [obj]
    objs = [load(p) for p in args.scenarios]
    if args.shipped:
        objs.extend(shipped().values())
    if not objs:
        raise ScenarioError("no scenarios given")
    return objs


def _run_one(job) -> tuple[str, str, dict]:
    obj, seed, tol, grid_text = job
    grid = scenario_grid_from_text(grid_text) if grid_text else None
    rep = run_scenario(obj, seed=seed, tol=tol, grid=grid)
    return rep.id, dumps(rep.to_json()), _csv_files(rep)


def _csv_files(rep: ScenarioReport) -> dict[str, str]:
    files = {}
    for r in rep.results:
        if r.csv is None:
            continue
        header, rows = r.csv
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
        files[f"{rep.id}.{r.name}.csv"] = buf.getvalue()
    return files


def _exit_code(report_texts: list[str]) -> int:
    codes = [json.loads(t)["exit_code"] for t in report_texts]
    if 2 in codes:
        return 2
    if 3 in codes:
        return 3
    return 0


def _emit(results: list[tuple[str, str, dict]], out: str | None) -> None:
    if out is not None:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        for ident, text, files in results:
            (d / f"{ident}.json").write_text(text)
            for name, body in files.items():
                (d / name).write_text(body)
    if len(results) == 1 and out is None:
        sys.stdout.write(results[0][1])
        return
    for ident, text, _ in results:
        rep = json.loads(text)
        bad = [r["check"] for r in rep["results"] if r["verdict"] in ("FAIL", "INCONCLUSIVE")]
        sys.stdout.write(f"{ident}: exit {rep['exit_code']}" + (f" ({', '.join(bad)})" if bad else "") + "\n")


def _hilbert(args) -> int:
    V = resolve_variety(args.variety)
    sys.stdout.write(dumps({"variety": V.name, "H": {str(d): hilbert_function(V, d) for d in args.degrees}}))
    return 0


def _wronskian(args) -> int:
    h = [parse_exppoly(t) for t in args.components]
    W = wronskian(h)
    sys.stdout.write(dumps({"components": [str(f) for f in h], "wronskian": str(W), "dependent": W.is_zero()}))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "hilbert":
            return _hilbert(args)
        if args.command == "wronskian":
            return _wronskian(args)
        objs = _scenario_for(args)
        jobs = [(o, args.seed, args.tol, args.grid) for o in objs]
        n = getattr(args, "jobs", 1)
        if n > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=n) as pool:
                results = list(pool.map(_run_one, jobs))  # map keeps submission order
        else:
            results = [_run_one(j) for j in jobs]
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    _emit(results, args.out)
    return _exit_code([t for _, t, _ in results])

