"""Phase portraits: batches of trajectories, CSV dumps and SVG drawings.

Two layouts are supported.  ``disk`` draws the PL-disk (for ``n = 3`` the
first two ball coordinates, i.e. the ball seen from above).  ``plane`` draws a
chart field restricted to an invariant plane (for example infinity of a
3-dimensional system) in its own coordinates on a rectangular window.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .compactify import ChartId, compactify_chart
from .parse import SystemSpec
from .poly import EPS, specialize
from .sim import (ClosedOrbit, IntegratorConfig, StepUnderflow, Trajectory, chart_to_ball,
                  critical_curve_samples, find_closed_orbit, integrate_chart, integrate_global,
                  marching_squares, compile_polys, pl_project)
from .system import SlowFastSystem


@dataclass
class PortraitConfig:
    window: tuple = (-4.0, 4.0, -4.0, 4.0)
    resolution: int = 200
    n_seeds: int = 12
    random_seeds: int = 0
    eps: float = 0.05
    size: int = 480
    layout: str = "disk"            # "disk" or "plane"
    plane_chart: str = "U2"
    plane_restrict: dict = field(default_factory=dict)
    closed_orbit: dict | None = None

    @classmethod
    def from_spec(cls, spec: SystemSpec) -> "PortraitConfig":
        opts = dict(spec.analysis_options.get("portrait", {}))
        cfg = cls()
        if "window" in opts:
            cfg.window = tuple(float(a) for a in opts["window"])
        for key in ("resolution", "n_seeds", "random_seeds", "size"):
            if key in opts:
                setattr(cfg, key, int(opts[key]))
        if spec.eps_values:
            cfg.eps = float(spec.eps_values[0])
        plane = opts.get("plane")
        if plane:
            cfg.layout = "plane"
            cfg.plane_chart = plane.get("chart", "U2")
            cfg.plane_restrict = {k: int(v) for k, v in plane.get("restrict", {}).items()}
        cfg.closed_orbit = opts.get("closed_orbit")
        return cfg


def default_seeds(n: int, window, count: int = 12) -> list:
    """``count`` points evenly spaced along the boundary of the window.

    For ``n = 3`` the square is the ``z = 0`` section of the cube with the
    same side.
    """
    x0, x1, y0, y1 = window
    per = 2 * (x1 - x0) + 2 * (y1 - y0)
    pts = []
    for k in range(count):
        s = per * (k + 0.5) / count
        if s < x1 - x0:
            p = (x0 + s, y0)
        elif s < (x1 - x0) + (y1 - y0):
            p = (x1, y0 + s - (x1 - x0))
        elif s < 2 * (x1 - x0) + (y1 - y0):
            p = (x1 - (s - (x1 - x0) - (y1 - y0)), y1)
        else:
            p = (x0, y1 - (s - 2 * (x1 - x0) - (y1 - y0)))
        pts.append(list(p) + [0.0] * (n - 2))
    return pts


@dataclass
class PortraitResult:
    trajectories: list
    failures: list
    curves: list
    orbit: ClosedOrbit | None
    layout: str
    weights: tuple
    seeds: list


def _run_one(args):
    """Worker: integrate one seed (top-level so it pickles)."""
    kind, payload, x0, eps, cfg = args
    try:
        if kind == "global":
            sys, w = payload
            return integrate_global(sys, w, x0, eps, cfg), None
        return integrate_chart(payload, x0, eps, cfg), None
    except (StepUnderflow, ValueError, FloatingPointError) as exc:
        return None, f"seed {list(map(float, x0))}: {exc}"


def _plane_field(sys: SlowFastSystem, w, cfg: PortraitConfig):
    cf = compactify_chart(sys, w, ChartId.parse(cfg.plane_chart))
    if cfg.plane_restrict:
        cf = cf.restrict(cfg.plane_restrict)
    return cf


def run_portrait(spec: SystemSpec, cfg: PortraitConfig | None = None, seed: int = 0,
                 jobs: int = 1) -> PortraitResult:
    cfg = cfg or PortraitConfig.from_spec(spec)
    sys = spec.system()
    w = spec.weight_vector()
    icfg = IntegratorConfig.from_dict(spec.integration)
    if cfg.layout == "plane":
        cf = _plane_field(sys, w, cfg)
        dim = cf.n
        payload, kind = cf, "chart"
    else:
        dim = sys.n
        payload, kind = (sys, w), "global"

    seeds = [list(map(float, ic)) for ic in spec.initial_conditions]
    if cfg.layout == "plane":
        seeds = [s[:dim] for s in seeds]
    if not seeds:
        seeds = default_seeds(dim, cfg.window, cfg.n_seeds)
    if cfg.random_seeds:
        rng = np.random.default_rng(seed)
        x0, x1, y0, y1 = cfg.window
        for _ in range(cfg.random_seeds):
            p = [rng.uniform(x0, x1), rng.uniform(y0, y1)] + [0.0] * (dim - 2)
            seeds.append([float(c) for c in p])

    tasks = [(kind, payload, s, cfg.eps, icfg) for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(t) for t in tasks]
    trajs = [r for r, _ in results]
    failures = [e for _, e in results if e]

    orbit = None
    if cfg.closed_orbit:
        co = cfg.closed_orbit
        start = co.get("start", seeds[0])
        ocfg = IntegratorConfig(rel_tol=float(co.get("rel_tol", 1e-10)),
                                abs_tol=float(co.get("abs_tol", 1e-12)),
                                t_max=float(co.get("t_max", 2000.0)),
                                max_steps=int(co.get("max_steps", 1_000_000)))
        if kind == "chart":
            tr = integrate_chart(payload, start, cfg.eps, ocfg)
        else:
            tr = integrate_global(sys, w, start, cfg.eps, ocfg)
        orbit = find_closed_orbit(tr, int(co.get("index", 0)), float(co.get("level", 0.0)),
                                  int(co.get("direction", -1)), float(co.get("tol", 1e-4)))

    if cfg.layout == "plane":
        curves = plane_critical_curves(payload, cfg.window, cfg.resolution)
    elif sys.n in (2, 3):
        curves = critical_curve_samples(sys, w, cfg.window, cfg.resolution)
    else:
        curves = []
    return PortraitResult(trajs, failures, curves, orbit, cfg.layout, tuple(w.weights), seeds)


def plane_critical_curves(cf, window, resolution) -> list:
    """Zero set of the fast equation of a planar chart field at ``eps = 0``."""
    if cf.n != 2:
        return []
    f = compile_polys([specialize(cf.equations[0], {EPS: 0})])
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    X, Y = np.meshgrid(xs, ys)
    vals = np.broadcast_to(f.raw([X, Y], 0.0)[0], X.shape)
    return [{"slice": None, "xy": line} for line in marching_squares(vals, xs, ys)]


# ----------------------------------------------------------------------------------
# output
# ----------------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def trajectory_rows(traj: Trajectory, weights, layout: str = "disk") -> list:
    n = len(traj.samples[0].state)
    rows = []
    for s in traj.samples:
        if layout == "disk":
            ball = chart_to_ball(s.state, weights, ChartId.parse(s.chart))
        else:
            # invariant-plane runs: radial compactification of the plane itself
            ball = pl_project(s.state, (1,) * n)
        rows.append([_fmt(s.t), s.chart] + [_fmt(c) for c in s.state] + [_fmt(b) for b in ball])
    return rows


def write_csv(path: Path, traj: Trajectory, weights, layout: str = "disk"):
    n = len(traj.samples[0].state)
    header = ["t", "chart"] + [f"x{i + 1}" for i in range(n)] + [f"ball_{i + 1}" for i in range(n)]
    lines = [",".join(header)] + [",".join(r) for r in trajectory_rows(traj, weights, layout)]
    path.write_text("\n".join(lines) + "\n")


_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _polyline(pts, to_px, color, width, extra=""):
    coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in (to_px(p) for p in pts))
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{extra}/>')


def render_svg(res: PortraitResult, cfg: PortraitConfig, title: str = "") -> str:
    S = cfg.size
    pad = 20
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{S}" height="{S}" '
           f'viewBox="0 0 {S} {S}">',
           f'<rect width="{S}" height="{S}" fill="white"/>']
    if title:
        out.append(f'<title>{title}</title>')
    if res.layout == "disk":
        R = S / 2 - pad

        def to_px(p):
            return S / 2 + R * p[0], S / 2 - R * p[1]

        out.append(f'<circle cx="{S / 2}" cy="{S / 2}" r="{R}" fill="none" '
                   f'stroke="black" stroke-width="1.5" class="infinity"/>')
        curve_pts = [c["ball"] for c in res.curves]
    else:
        x0, x1, y0, y1 = cfg.window

        def to_px(p):
            return (pad + (p[0] - x0) / (x1 - x0) * (S - 2 * pad),
                    S - pad - (p[1] - y0) / (y1 - y0) * (S - 2 * pad))

        out.append(f'<rect x="{pad}" y="{pad}" width="{S - 2 * pad}" height="{S - 2 * pad}" '
                   f'fill="none" stroke="black"/>')
        curve_pts = [c["xy"] for c in res.curves]

    for pts in curve_pts:
        if len(pts) > 1:
            out.append(_polyline(pts, to_px, "#2ca02c", 2, ' class="critical"'))

    for k, tr in enumerate(res.trajectories):
        if tr is None:
            continue
        if res.layout == "disk":
            pts = [chart_to_ball(s.state, res.weights, ChartId.parse(s.chart))
                   for s in tr.samples]
        else:
            x0, x1, y0, y1 = cfg.window
            pts = [s.state[:2] for s in tr.samples
                   if x0 - 1 <= s.state[0] <= x1 + 1 and y0 - 1 <= s.state[1] <= y1 + 1]
        if len(pts) > 1:
            out.append(_polyline(pts, to_px, _COLORS[k % len(_COLORS)], 1,
                                 ' class="trajectory"'))
            a, b = to_px(pts[-1])
            out.append(f'<circle cx="{a:.3f}" cy="{b:.3f}" r="2.5" fill="black" '
                       f'class="endpoint"/>')

    if res.orbit is not None and res.orbit.found:
        if res.layout == "disk":
            # closed orbits are searched in the finite chart of global runs
            pts = [chart_to_ball(p, res.weights, ChartId("U", len(p) + 1)) for p in res.orbit.loop]
        else:
            pts = res.orbit.loop[:, :2]
        out.append(_polyline(pts, to_px, "#e377c2", 3, ' class="closed-orbit"'))
        lo, hi = res.orbit.extent(0)
        out.append(f'<text x="{pad}" y="{S - 4}" font-size="11" class="closed-orbit-label">'
                   f'closed orbit: period {res.orbit.period:.6g}, '
                   f'u in [{lo:.4f}, {hi:.4f}], closure {res.orbit.closure:.2e}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_portrait(res: PortraitResult, cfg: PortraitConfig, out_dir, title: str = "") -> list:
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        raise FileNotFoundError(f"output directory {out_dir} does not exist")
    written = []
    for k, tr in enumerate(res.trajectories):
        if tr is None:
            continue
        p = out_dir / f"trajectory_{k:03d}.csv"
        write_csv(p, tr, res.weights, res.layout)
        written.append(p)
    svg = out_dir / "portrait.svg"
    svg.write_text(render_svg(res, cfg, title))
    written.append(svg)
    return written
