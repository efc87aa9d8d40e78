import csv
import hashlib
import json

import pytest

from slowfast.cli import main
from slowfast.parse import parse_system
from slowfast.portrait import PortraitConfig, default_seeds, run_portrait, write_portrait

from conftest import FIXTURES, fixture_spec


def _digest(directory):
    h = hashlib.sha256()
    for p in sorted(directory.iterdir()):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()


def test_default_seeds_on_window_boundary():
    seeds = default_seeds(2, (-4, 4, -4, 4))
    assert len(seeds) == 12
    for x, y in seeds:
        assert max(abs(x), abs(y)) == pytest.approx(4)
    assert len({tuple(s) for s in seeds}) == 12
    assert all(len(s) == 3 and s[2] == 0 for s in default_seeds(3, (-1, 1, -1, 1)))


def test_portrait_without_initial_conditions(tmp_path, capsys):
    code = main(["portrait", str(FIXTURES / "global_fenichel.json"), str(tmp_path)])
    data = json.loads(capsys.readouterr().out)
    assert code == 0
    assert len(data["seeds"]) == 12
    files = sorted(p.name for p in tmp_path.iterdir())
    assert "portrait.svg" in files
    csvs = [f for f in files if f.endswith(".csv")]
    assert len(csvs) == 12 - len(data["warnings"])
    with open(tmp_path / csvs[0]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "chart", "x1", "x2", "ball_1", "ball_2"]
    for row in rows[1:]:
        assert sum(float(b) ** 2 for b in row[4:]) <= 1 + 1e-12


def test_portrait_is_deterministic(tmp_path, capsys):
    digests = []
    for k, jobs in enumerate(("1", "3", "1")):
        out = tmp_path / str(k)
        out.mkdir()
        assert main(["--seed", "7", "--jobs", jobs, "portrait",
                     str(FIXTURES / "global_fenichel.json"), str(out)]) == 0
        digests.append(_digest(out))
    capsys.readouterr()
    assert len(set(digests)) == 1


def test_van_der_pol_portrait_has_closed_orbit(tmp_path, capsys):
    code = main(["portrait", str(FIXTURES / "van_der_pol_infinity.json"), str(tmp_path)])
    data = json.loads(capsys.readouterr().out)
    assert code == 0
    assert data["closed_orbit"]["found"] is True
    assert data["closed_orbit"]["u_min"] <= -1 and data["closed_orbit"]["u_max"] >= 0
    svg = (tmp_path / "portrait.svg").read_text()
    assert 'class="closed-orbit"' in svg


def test_invalid_out_dir(tmp_path, capsys):
    code = main(["portrait", str(FIXTURES / "global_fenichel.json"),
                 str(tmp_path / "missing" / "dir")])
    capsys.readouterr()
    assert code == 4


def test_failures_are_collected(tmp_path, monkeypatch, capsys):
    import slowfast.portrait as portrait
    from slowfast.sim import StepUnderflow

    real = portrait.integrate_global

    def flaky(sys, w, x0, eps, cfg, **kw):
        if x0[0] > 0:
            raise StepUnderflow(0.5, x0, 1e-15)
        return real(sys, w, x0, eps, cfg, **kw)

    monkeypatch.setattr(portrait, "integrate_global", flaky)
    spec = parse_system(json.dumps({
        "variables": ["x", "y"], "fast": "x", "P": "-x", "Q": {"y": "1"},
        "weights": [1, 1], "eps": [0.1], "initial_conditions": [[0.5, 0], [-0.5, 0]],
        "integration": {"t_max": 2}}))
    res = run_portrait(spec, PortraitConfig.from_spec(spec))
    # failed seeds keep their slot so file numbering follows the seed list
    assert res.trajectories[0] is None and res.trajectories[1] is not None
    assert len(res.failures) == 1
    files = write_portrait(res, PortraitConfig.from_spec(spec), tmp_path)
    assert sum(str(f).endswith(".csv") for f in files) == 1

    # every seed failing is an error
    monkeypatch.setattr(portrait, "integrate_global",
                        lambda *a, **k: (_ for _ in ()).throw(StepUnderflow(0.0, a[2], 1e-15)))
    path = tmp_path / "sys.json"
    path.write_text(json.dumps({"variables": ["x", "y"], "fast": "x", "P": "-x",
                                "Q": {"y": "1"}, "weights": [1, 1], "eps": [0.1],
                                "initial_conditions": [[1, 0]]}))
    out = tmp_path / "out"
    out.mkdir()
    assert main(["portrait", str(path), str(out)]) == 3
    capsys.readouterr()


def test_config_from_spec():
    cfg = PortraitConfig.from_spec(fixture_spec("van_der_pol_infinity"))
    assert cfg.layout == "plane" and cfg.plane_restrict == {"w": 0}
    assert cfg.eps == 0.01 and cfg.closed_orbit["level"] == 0.25
