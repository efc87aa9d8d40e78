import json
import subprocess
import sys

import pytest

from slowfast.cli import main

from conftest import FIXTURES, GOLDEN, ROOT


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out.strip() else None, err


def fx(name):
    return FIXTURES / f"{name}.json"


@pytest.mark.parametrize("path", sorted(FIXTURES.glob("*.json")), ids=lambda p: p.stem)
def test_golden_charts_round_trip(capsys, path):
    code, out, _ = run(capsys, "charts", path)
    assert code == 0
    assert out == (GOLDEN / f"{path.stem}.charts.json").read_text()


def test_every_fixture_has_a_golden_file():
    assert {p.stem for p in FIXTURES.glob("*.json")} == \
        {p.name.split(".")[0] for p in GOLDEN.glob("*.charts.json")}


def test_charts_strings(capsys):
    code, data, _ = run_json(capsys, "charts", fx("infinity_filled"))
    assert code == 0
    assert data["charts"]["U1"]["equations"] == ["3/2*u*v^3 + u^2*eps - eps", "1/2*v^4"]
    assert data["charts"]["U2"]["rescale_power"] == 3
    code, data, _ = run_json(capsys, "charts", fx("non_transversal"), "--chart", "U2")
    assert list(data["charts"]) == ["U2"]
    assert data["charts"]["U2"]["equations"][0] == "-u^2*eps - u*v*eps + v + 1"


def test_charts_hemisphere(capsys):
    _, data, _ = run_json(capsys, "charts", fx("global_fenichel"), "--hemisphere", "south")
    assert all(k.startswith("V") for k in data["charts"])


def test_charts_text(capsys):
    code, out, _ = run(capsys, "--output", "text", "charts", fx("infinity_filled"))
    assert code == 0
    assert "U1" in out and "u' = 3/2*u*v^3 + u^2*eps - eps" in out


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"variables": ["x", "y"], "fast": "x", "P": "x",
                               "Q": {}, "weights": [1, 1]}))
    code, out, err = run(capsys, "charts", bad)
    assert code == 2 and "error" in err
    bad.write_text("{")
    assert run(capsys, "analyze", bad)[0] == 2


def test_missing_file_is_io_error(capsys, tmp_path):
    assert run(capsys, "charts", tmp_path / "nope.json")[0] == 4


def test_analyze_global_fenichel(capsys):
    code, data, _ = run_json(capsys, "analyze", fx("global_fenichel"))
    assert code == 0
    gf = data["global_fenichel"]
    assert gf["verdict"] is True
    assert [r["exact"] for r in gf["certificate"]["U2"]] == ["-1", "0"]
    assert gf["certificate"]["U1_origin"]["hyperbolic_node"] is True
    assert data["warnings"] == []


def test_analyze_fold_flips_finite_nh(capsys):
    _, data, _ = run_json(capsys, "analyze", fx("global_fenichel_fold"))
    assert data["global_fenichel"]["finite_NH"] is False
    assert data["global_fenichel"]["verdict"] is False


def test_analyze_non_transversal(capsys):
    code, data, _ = run_json(capsys, "analyze", fx("non_transversal"))
    assert code == 0
    assert data["nh"] == []
    assert any("transversal but not normally hyperbolic" in w for w in data["warnings"])


def test_analyze_infinity_filled(capsys):
    code, data, _ = run_json(capsys, "analyze", fx("infinity_filled"))
    assert code == 5
    assert data["structure"]["infinity_filled_with_equilibria"] is True


def test_newton(capsys):
    code, data, _ = run_json(capsys, "newton", fx("newton_planar"))
    assert code == 0
    assert sorted(map(tuple, data["support"])) == [(-1, 1), (0, 0), (2, -1)]
    _, data, _ = run_json(capsys, "newton", fx("newton_spatial"))
    assert sorted(map(tuple, data["support"])) == [(-1, 0, 0), (0, 0, 2), (0, 1, 0), (1, 0, 0)]
    assert len(data["hull"]["vertices"]) == 4


def test_singular(capsys):
    code, data, _ = run_json(capsys, "singular", fx("fold_infinity"))
    (v,) = data["singularities"]
    assert code == 0 and v["kind"] == "fold" and v["method"] == "pattern"
    assert "chart computation agrees" in v["notes"]
    _, data, _ = run_json(capsys, "singular", fx("pattern_mismatch"))
    (v,) = data["singularities"]
    assert v["method"] == "chart" and v["kind"] == "fold"
    _, data, _ = run_json(capsys, "singular", fx("global_fenichel_fold"))
    assert [v["kind"] for v in data["singularities"]] == ["fold"]
    code, _, _ = run_json(capsys, "singular", fx("q_irrelevant"))
    assert code == 5


def test_permute_slow_variables(capsys):
    _, a, _ = run_json(capsys, "analyze", fx("slow_fast_infinity"))
    _, b, _ = run_json(capsys, "analyze", fx("slow_fast_infinity"), "--permute", "z,y")
    assert a["structure"] == b["structure"]


def test_json_is_deterministic(capsys):
    outs = {run(capsys, "analyze", fx("global_fenichel"), "--jobs", j)[1] for j in (1, 2, 1)}
    assert len(outs) == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "slowfast", "charts",
                          str(fx("newton_planar"))], capture_output=True, text=True, cwd=ROOT)
    assert res.returncode == 0 and json.loads(res.stdout)["charts"]
