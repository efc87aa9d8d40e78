import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowfast.compactify import ChartId, compactify_chart
from slowfast.parse import parse_polynomial
from slowfast.sim import (IntegratorConfig, StepUnderflow, chart_to_ball, compile_polys,
                          critical_curve_samples, distance_to_zero_set, dopri,
                          find_closed_orbit, integrate_chart, integrate_global,
                          marching_squares, pl_project, quasi_radius)

from conftest import fixture_spec, make_system
from generators import handoff_mismatches


def test_exponential_decay():
    s = make_system("-x", "0")
    cf = compactify_chart(s, (1, 1), ChartId("U", 3))
    tr = integrate_chart(cf, [1.0, 0.0], 0.0, IntegratorConfig(t_max=1.0))
    assert tr.final.t == pytest.approx(1.0)
    assert abs(tr.final.state[0] - math.exp(-1)) < 1e-6
    assert np.all(np.diff(tr.times()) > 0)


def test_dopri_accuracy_scales_with_tolerance():
    f = compile_polys([parse_polynomial("y", ("x", "y")), parse_polynomial("-x", ("x", "y"))])
    errs = []
    for tol in (1e-6, 1e-9):
        seg = dopri(f, [1.0, 0.0], 0.0, 2 * math.pi, 0.0,
                    IntegratorConfig(rel_tol=tol, abs_tol=tol * 1e-2))
        errs.append(np.abs(np.asarray(seg.ys[-1]) - [1.0, 0.0]).max())
    assert errs[1] < errs[0] and errs[1] < 1e-7


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0)
    with pytest.raises(ValueError):
        IntegratorConfig(switch_threshold=1)
    cfg = IntegratorConfig.from_dict({"t_max": 3, "unknown": 1})
    assert cfg.t_max == 3


def test_step_underflow_reported():
    s = make_system("x^3", "0")
    cf = compactify_chart(s, (1, 1), ChartId("U", 3))
    with pytest.raises(StepUnderflow) as info:
        integrate_chart(cf, [10.0, 0.0], 0.0, IntegratorConfig(t_max=1.0, h_min=1e-8))
    assert info.value.state is not None


def test_equilibria_on_infinity_stay_fixed():
    s = make_system("x^2 + x*y - 1", "1 - y^2")
    cf = compactify_chart(s, (1, 1), ChartId("U", 2))
    for u in (0.0, -1.0):
        tr = integrate_chart(cf, [u, 0.0], 0.0, IntegratorConfig(t_max=10.0))
        assert np.abs(tr.states()[:, 0] - u).max() < 1e-6


def test_infinity_is_invariant_numerically():
    r = random.Random(50)
    cfg = IntegratorConfig(t_max=5.0, max_steps=20000)
    for name in ("global_fenichel", "slow_fast_infinity", "non_transversal"):
        spec = fixture_spec(name)
        s = spec.system()
        for label in ("U1", "U2", "V2"):
            cf = compactify_chart(s, spec.weights, ChartId.parse(label))
            for _ in range(3):
                x0 = [r.uniform(-1, 1) for _ in range(s.n - 1)] + [0.0]
                try:
                    tr = integrate_chart(cf, x0, 0.1, cfg, exit_when=lambda y: np.abs(y).max() > 1e6)
                except StepUnderflow:
                    continue
                assert np.abs(tr.states()[:, -1]).max() < 1e-10


def test_handoff_continuity():
    assert max(handoff_mismatches(50, seed=1)) < 1e-8


def test_constant_trajectory_at_zero():
    s = make_system("x*y", "x")
    tr = integrate_global(s, (1, 1), [0.0, 0.0], 0.1, IntegratorConfig(t_max=5.0))
    assert np.all(tr.states() == 0.0)
    assert tr.meta["handoffs"] == []


def test_tolerance_halving_convergence():
    s = make_system("x^2 + x*y - 1", "1 - y^2")
    ends = []
    for rel in (1e-8, 5e-9):
        cfg = IntegratorConfig(rel_tol=rel, abs_tol=rel * 1e-2, t_max=10.0)
        ends.append(integrate_global(s, (1, 1), [-1.2, 0.3], 0.1, cfg).final.state)
    scale = max(1.0, np.abs(ends[0]).max())
    assert np.abs(ends[0] - ends[1]).max() < 10 * 1e-8 * scale


def test_system_on_infinity_plane_w_decreases():
    spec = fixture_spec("slow_fast_infinity")
    s = spec.system()
    tr = integrate_global(s, spec.weights, [2.0, 1.0, 1.0], 0.05,
                          IntegratorConfig(rel_tol=1e-9, abs_tol=1e-12, t_max=30.0))
    u2 = [smp.state for smp in tr.samples if smp.chart == "U2"]
    assert len(u2) > 10
    w = np.array([st[-1] for st in u2])
    assert np.all(np.diff(w) <= 1e-15) and w[-1] < w[0]


# ---- disk map --------------------------------------------------------------------

def test_pl_project_origin():
    assert np.all(pl_project([0.0, 0.0], (2, 3)) == 0)


def test_pl_project_radial_reduction():
    r = np.random.default_rng(0)
    for _ in range(100):
        x = r.normal(size=3) * r.uniform(0.01, 100)
        want = x / (1 + np.linalg.norm(x))
        assert np.abs(pl_project(x, (1, 1, 1)) - want).max() < 1e-10


@given(st.lists(st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3), min_size=2, max_size=3),
       st.lists(st.integers(1, 3), min_size=3, max_size=3))
@settings(max_examples=100)
def test_quasi_radius_homogeneity(x, w):
    w = w[:len(x)]
    x = np.array(x)
    lam = 2.0
    scaled = lam ** np.array(w, dtype=float) * x
    assert abs(quasi_radius(scaled, w) - lam * quasi_radius(x, w)) < 1e-9 * max(1, quasi_radius(scaled, w))
    b = pl_project(x, w)
    assert np.linalg.norm(b) < 1


def test_pl_project_injective_on_grid():
    xs = np.linspace(-6, 6, 41)
    pts = np.array([[a, b] for a in xs for b in xs])
    for w in ((1, 1), (1, 2), (2, 3)):
        img = np.array([pl_project(p, w) for p in pts])
        d = np.sqrt(((img[:, None, :] - img[None, :, :]) ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        assert d.min() > 1e-4


def test_chart_to_ball_agrees_with_projection():
    r = random.Random(51)
    for _ in range(50):
        w = (r.randint(1, 3), r.randint(1, 3))
        label = r.choice(["U1", "V1", "U2", "V2"])
        ch = ChartId.parse(label)
        c = np.array([r.uniform(-1, 1), r.uniform(0.05, 1)])
        from slowfast.compactify import from_chart
        x = from_chart(c, w, ch)
        assert np.abs(chart_to_ball(c, w, ch) - pl_project(x, w)).max() < 1e-9
        # points at infinity land on the unit sphere
        assert abs(np.linalg.norm(chart_to_ball([c[0], 0.0], w, ch)) - 1) < 1e-9


# ---- critical curves -------------------------------------------------------------

def _sign_change_edges(V, xs, ys):
    pos = V >= 0
    edges = []
    for j in range(V.shape[0]):
        for i in range(V.shape[1] - 1):
            if pos[j, i] != pos[j, i + 1]:
                edges.append(("h", i, j))
    for j in range(V.shape[0] - 1):
        for i in range(V.shape[1]):
            if pos[j, i] != pos[j + 1, i]:
                edges.append(("v", i, j))
    return edges


@pytest.mark.parametrize("src", ["x^2 + x*y - 1", "x", "y + x^2", "x^2 - y^2"])
def test_marching_squares_against_sign_oracle(src):
    P = parse_polynomial(src, ("x", "y"))
    f = compile_polys([P])
    xs = np.linspace(-4, 4, 81)
    ys = np.linspace(-4, 4, 81)
    X, Y = np.meshgrid(xs, ys)
    V = np.broadcast_to(f.raw([X, Y], 0.0)[0], X.shape)
    lines = marching_squares(V, xs, ys)
    pts = np.vstack(lines)
    edges = _sign_change_edges(V, xs, ys)
    assert edges
    # every sign-changing grid edge carries a contour point, and vice versa
    hx = xs[1] - xs[0]
    for kind, i, j in edges:
        if kind == "h":
            mask = (np.abs(pts[:, 1] - ys[j]) < 1e-12) & (pts[:, 0] >= xs[i] - 1e-12) \
                & (pts[:, 0] <= xs[i + 1] + 1e-12)
        else:
            mask = (np.abs(pts[:, 0] - xs[i]) < 1e-12) & (pts[:, 1] >= ys[j] - 1e-12) \
                & (pts[:, 1] <= ys[j + 1] + 1e-12)
        assert mask.any()
    on_grid = np.minimum(np.abs((pts[:, 0] - xs[0]) / hx - np.round((pts[:, 0] - xs[0]) / hx)),
                         np.abs((pts[:, 1] - ys[0]) / hx - np.round((pts[:, 1] - ys[0]) / hx)))
    assert on_grid.max() < 1e-9


def test_critical_curve_examples():
    curves = critical_curve_samples(make_system("x^2 + x*y - 1", "1"), (1, 1),
                                    resolution=400)
    assert len(curves) == 2
    for c in curves:
        vals = [abs(x * x + x * y - 1) for x, y in c["xy"]]
        assert max(vals) < 0.05
        assert np.all(np.linalg.norm(c["ball"], axis=1) < 1)
    (line,) = critical_curve_samples(make_system("x", "1"), (1, 1), resolution=50)
    assert np.abs(line["xy"][:, 0]).max() < 1e-12
    (par,) = critical_curve_samples(make_system("y + x^2", "1"), (1, 1), resolution=200)
    assert np.abs(par["xy"][:, 1] + par["xy"][:, 0] ** 2).max() < 0.02


def test_distance_to_zero_set():
    P = parse_polynomial("x^2 + y^2 - 1", ("x", "y"))
    assert distance_to_zero_set(P, [2.0, 0.0]) == pytest.approx(1.0, abs=1e-9)
    assert distance_to_zero_set(P, [0.3, 0.4]) == pytest.approx(0.5, abs=1e-9)


# ---- closed orbits ---------------------------------------------------------------

def test_van_der_pol_closed_orbit():
    s = fixture_spec("van_der_pol_infinity").system()
    cf = compactify_chart(s, (1, 1, 1), ChartId("U", 2)).restrict({"w": 0})
    cfg = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-12, t_max=2000.0, max_steps=2_000_000)
    tr = integrate_chart(cf, [1.0, 1.0], 0.01, cfg)
    orbit = find_closed_orbit(tr, 0, 0.25, -1, tol=1e-4)
    assert orbit.found
    lo, hi = orbit.extent(0)
    assert lo <= -1 and hi >= 0


def test_no_orbit_for_decaying_flow():
    s = make_system("-x", "-y")
    cf = compactify_chart(s, (1, 1), ChartId("U", 3))
    tr = integrate_chart(cf, [1.0, 1.0], 1.0, IntegratorConfig(t_max=20.0))
    assert not find_closed_orbit(tr, 0, 0.5).found
