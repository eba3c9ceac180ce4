import io
import json
import math
import shutil
import subprocess
import sys

import pytest

from bridgegauss import cli

WELL1 = json.dumps({"dim": 1, "terms": [{"coeff": -0.5, "factors": [
    {"dim": 1, "profile": {"type": "indicator_ball", "radius": 1.0}}]}]})
POS1 = json.dumps({"dim": 1, "terms": [{"coeff": 0.2, "factors": [
    {"dim": 1, "profile": {"type": "indicator_ball", "radius": 1.0}}]}]})


def call(*argv, csv=False):
    buf = io.StringIO()
    code = cli.run(list(argv), stdout=buf)
    text = buf.getvalue()
    return code, (text if csv else json.loads(text)), text


def test_eval_s_matches_library():
    from bridgegauss import bridge_quad as bq, potentials as P
    from bridgegauss.kernel import BridgeSpec
    code, rep, _ = call("eval-s", "--potential", WELL1, "--t", "1", "--y", "0.3")
    assert code == 0 and rep["command"] == "eval-s" and rep["flags"] == []
    V = P.potential_from_json(json.loads(WELL1))
    ref = bq.s_value(V, BridgeSpec(1.0, [0.0], [0.3])).value
    assert rep["results"]["S"]["value"] == ref
    assert rep["config"]["quad"]["rel_tol"] == 1e-8


def test_divergent_S_reports_inf_string():
    code, rep, _ = call("eval-s", "--potential", '{"example": "nfs2"}', "--t", "1")
    assert code == 0
    assert rep["results"]["divergent"] is True
    assert rep["results"]["S"]["value"] == "inf"
    assert rep["results"]["S"]["partial_lower_bounds"]


def test_json_byte_identical():
    args = ("g", "--potential", WELL1, "--method", "mc", "--paths", "2000", "--steps", "16", "--seed", "4")
    _, _, a = call(*args)
    _, _, b = call(*args)
    assert a == b
    assert "wall_time" not in json.loads(a)
    _, rep, _ = call(*args, "--timing")
    assert rep["wall_time"] >= 0


def test_seed_changes_mc():
    base = ("g", "--potential", WELL1, "--method", "mc", "--paths", "2000", "--steps", "16")
    r1 = call(*base, "--seed", "1")[1]["results"]["mc"]["ratio"]
    r2 = call(*base, "--seed", "2")[1]["results"]["mc"]["ratio"]
    assert r1 != r2


def test_g_series_and_cross_check():
    code, rep, _ = call("g", "--potential", WELL1, "--cross-check", "--paths", "20000", "--steps", "128")
    res = rep["results"]
    assert code == 0
    assert res["series"]["truncation_bound"] < 1e-6
    assert res["agree_within_3_sigma"] is True


def test_g_series_unavailable_off_origin_3d():
    pot3 = '{"example": "czwarty"}'
    code, rep, _ = call("g", "--potential", pot3, "--x", "0.2", "--y", "0.3")
    assert code == 0 and "unavailable" in rep["results"]["series"]
    assert "series_unavailable" in rep["flags"]


def test_envelope_and_sup_s():
    code, rep, _ = call("envelope", "--potential", POS1, "--t", "1", "--y", "0.3")
    assert code == 0 and rep["results"]["pass"] is True and rep["results"]["lower"] == 1.0
    code, rep, _ = call("sup-s", "--potential", WELL1, "--t", "1", "--grid", "radii:0,0.5")
    r = rep["results"]
    assert code == 0 and r["F_hat"]["value"] >= r["f_hat"]["value"]
    assert r["F_hat"]["is_lower_bound"] is True


def test_csv_output():
    code, _, text = call("sup-s", "--potential", WELL1, "--t", "1", "--grid", "origin", "--csv", csv=True)
    lines = text.strip().splitlines()
    assert code == 0 and lines[0] == "t,f_hat" and len(lines) == 7
    ts = [float(l.split(",")[0]) for l in lines[1:]]
    assert ts == sorted(ts) and ts[-1] == 1.0


def test_newtonian_closed_form():
    code, rep, _ = call("newtonian", "--potential", '{"example": "czwarty"}', "--sup")
    r = rep["results"]
    assert code == 0 and math.isfinite(r["value"]) and r["sup"]["value"] >= r["value"] * (1 - 1e-12)


def test_diagnose_lower_exp():
    code, rep, _ = call("diagnose", "--potential", WELL1, "--t", "0.5", "--grid", "radii:0,0.5")
    r = rep["results"]
    assert code == 0
    assert 0 < r["lower_exp"]["C"] <= 1 and r["lower_exp"]["c"] >= 0
    assert len(r["f_hat_table"]) == 6


def test_defaults_override(tmp_path, monkeypatch):
    d = cli.load_defaults()
    d["quad"]["rel_tol"] = 1e-6
    d["time_grid_points"] = 3
    p = tmp_path / "d.json"
    p.write_text(json.dumps(d))
    monkeypatch.setenv("BRIDGEGAUSS_DEFAULTS", str(p))
    code, rep, _ = call("sup-s", "--potential", WELL1, "--grid", "origin")
    assert code == 0 and rep["config"]["quad"]["rel_tol"] == 1e-6
    assert len(rep["results"]["table"]) == 3


@pytest.mark.parametrize("argv", [
    ("eval-s", "--potential", "{not json"),
    ("eval-s", "--potential", '{"dim": 1}'),
    ("eval-s", "--potential", WELL1, "--x", "1,2"),
    ("eval-s", "--potential", WELL1, "--t", "-1"),
    ("sup-s", "--potential", WELL1, "--grid", "bogus"),
])
def test_input_errors_exit_2(argv):
    code, rep, _ = call(*argv)
    assert code == 2 and rep["flags"][0].startswith("error:") and "results" not in rep


def test_verify_example_czwarty():
    code, rep, _ = call("verify-example", "czwarty")
    assert code == 0 and rep["flags"] == []
    assert all(c["pass"] for c in rep["results"]["checks"])


@pytest.mark.skipif(shutil.which("bridgegauss") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["bridgegauss", "eval-s", "--potential", WELL1], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["results"]["S"]["divergent"] is False
    out = subprocess.run([sys.executable, "-m", "bridgegauss.cli", "eval-s", "--potential", "[1"],
                         capture_output=True, text=True)
    assert out.returncode == 2
