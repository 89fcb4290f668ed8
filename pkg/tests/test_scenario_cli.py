import json
import math
from fractions import Fraction

import numpy as np
import pytest

from valdist.cli import main
from valdist.scenario import CHECK_ORDER, ScenarioError, dumps, plain, run_scenario, shipped, validate


@pytest.mark.parametrize("obj, pointer", [
    ({"checks": []}, "/"),
    ({"id": 3, "checks": []}, "/id"),
    ({"id": "x", "checks": ["position", "nonsense"]}, "/checks/1"),
    ({"id": "x", "checks": [], "surface": "torus"}, "/surface"),
    ({"id": "x", "checks": [], "variety": "P1", "hypersurfaces": [1]}, "/hypersurfaces/0"),
])
def test_schema_errors_carry_pointer(obj, pointer):
    with pytest.raises(ScenarioError) as info:
        validate(obj)
    assert info.value.path == pointer
    assert str(info.value).startswith(pointer + ":")


def test_shipped_scenarios_validate():
    cat = shipped()
    assert len(cat) >= 10
    for obj in cat.values():
        validate(obj)


def test_empty_scenario_metadata_only():
    rep = run_scenario(shipped()["empty"])
    assert rep.exit_code == 0 and rep.results == []
    assert set(rep.to_json()) == {"id", "metadata", "exit_code", "results"}


def test_smt_p1_exp_two_passes():
    rep = run_scenario(shipped()["smt_p1_exp_two"])
    assert rep.exit_code == 0
    assert all(v in ("PASS", "VACUOUS") for v in rep.verdicts.values())


def test_degenerate_control_refused():
    rep = run_scenario(shipped()["degenerate_control"])
    assert rep.exit_code == 2
    assert rep.verdicts["nondegeneracy"] == "FAIL"
    smt = next(r for r in rep.results if r.name == "smt")
    assert smt.detail == {"blocked_by": "nondegeneracy"}
    nd = next(r for r in rep.results if r.name == "nondegeneracy")
    assert "x1^2" in json.dumps(plain(nd.detail)) and "x0*x2" in json.dumps(plain(nd.detail))


def test_results_follow_check_order():
    obj = dict(shipped()["smt_conic_tangents"])
    obj["checks"] = list(reversed(obj["checks"]))
    names = [r.name for r in run_scenario(obj).results]
    assert names == sorted(names, key=CHECK_ORDER.index)


def test_expected_verdict_mismatch_fails():
    obj = {"id": "e", "checks": ["flat_control"], "expected": {"flat_control": "FAIL"}}
    rep = run_scenario(obj)
    assert rep.verdicts["flat_control"] == "FAIL" and rep.exit_code == 2
    assert rep.results[0].detail["observed"] == "PASS"


def test_exit_code_inconclusive(monkeypatch):
    from valdist import scenario
    from valdist.scenario import CheckResult
    monkeypatch.setitem(scenario.CHECKS, "flat_control", lambda ctx: CheckResult("flat_control", "INCONCLUSIVE"))
    assert run_scenario({"id": "i", "checks": ["flat_control"]}).exit_code == 3
    monkeypatch.setitem(scenario.CHECKS, "poincare_calibration",
                        lambda ctx: CheckResult("poincare_calibration", "FAIL"))
    assert run_scenario({"id": "i", "checks": ["flat_control", "poincare_calibration"]}).exit_code == 2


def test_plain_conversions():
    out = plain({"a": Fraction(7, 10), "b": math.inf, "c": -math.inf, "d": math.nan, "e": 1 + 2j,
                 "f": np.array([1.5, 2.5]), "g": np.bool_(True), 3: None})
    assert out == {"a": "7/10", "b": "inf", "c": "-inf", "d": "nan", "e": [1.0, 2.0],
                   "f": [1.5, 2.5], "g": True, "3": None}
    assert dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'
    with pytest.raises(TypeError):
        plain(object())


def test_cli_hilbert(capsys):
    assert main(["hilbert", "conic", "1", "2", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["H"] == {"1": 3, "2": 5, "3": 7}


def test_cli_wronskian(capsys):
    assert main(["wronskian", "exp(z)", "exp(2*z)"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert not out["dependent"]
    assert main(["wronskian", "z", "2*z"]) == 0
    assert json.loads(capsys.readouterr().out)["dependent"]


def test_cli_nochka(capsys):
    code = main(["nochka", "--variety", "conic", "-N", "2", "--hyper", "x0", "--hyper", "x1", "--hyper", "x2",
                 "--hyper", "x0 + x1 + x2", "--hyper", "x0 - x1 + 2*x2", "--hyper", "x0 + 3*x1 - x2"])
    rep = json.loads(capsys.readouterr().out)
    assert code == 0
    assert [r["check"] for r in rep["results"]] == ["position", "weights", "basis"]


def test_cli_smt_and_nevanlinna(capsys):
    hyp = ["--hyper", "x0", "--hyper", "x1", "--hyper", "x0 + x1"]
    assert main(["smt", *hyp, "--grid", "1,10,1000,8", "1", "exp(z)"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert {r["check"]: r["verdict"] for r in rep["results"]}["smt"] == "PASS"
    assert main(["nevanlinna", "--grid", "1,10,1000,8", "1", "z**3"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert {r["check"] for r in rep["results"]} == {"curve", "characteristic", "essential"}


def test_cli_metric_and_gauss(capsys):
    assert main(["metric-checks"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert {r["check"]: r["verdict"] for r in rep["results"]} == {"poincare_calibration": "PASS",
                                                                   "flat_control": "PASS"}
    assert main(["gauss", "enneper"]) == 0
    capsys.readouterr()


def test_cli_degenerate_exit_2(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(shipped()["degenerate_control"]))
    assert main(["run", str(p)]) == 2


def test_cli_bad_input_exit_1(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"id": "b", "checks": ["position", "bogus"]}))
    assert main(["run", str(p)]) == 1
    assert "/checks/1" in capsys.readouterr().err
    p.write_text("{not json")
    assert main(["run", str(p)]) == 1
    assert main(["run", str(tmp_path / "missing.json")]) == 1
    assert main(["run"]) == 1
    assert main(["smt", "--hyper", "x0", "--grid", "oops", "1", "z"]) == 1


def test_cli_out_files_and_determinism(tmp_path, capsys):
    names = ["smt_conic_tangents", "metric_zero_free", "gauss_enneper"]
    paths = []
    for n in names:
        p = tmp_path / f"{n}.json"
        p.write_text(json.dumps(shipped()[n]))
        paths.append(str(p))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", *paths, "--out", str(a)]) == 0
    assert main(["run", *paths, "--out", str(b), "--jobs", "3"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "smt_conic_tangents: exit 0"
    files = sorted(f.name for f in a.iterdir())
    assert "smt_conic_tangents.json" in files and "smt_conic_tangents.smt.csv" in files
    assert files == sorted(f.name for f in b.iterdir())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
    header = (a / "smt_conic_tangents.smt.csv").read_text().splitlines()[0]
    assert header.startswith("r,T_f,") and header.endswith("margin,margin_over_T")


def test_cli_metric_checks_shipped_id(capsys):
    assert main(["metric-checks", "metric_zero_free"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert [r["check"] for r in rep["results"]] == ["phi", "sum_to_product", "derived_norm", "poincare_calibration",
                                                    "flat_control", "curvature", "main_lemma_bound", "schwarz"]
