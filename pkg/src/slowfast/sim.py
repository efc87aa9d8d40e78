"""Numerical integration in charts, chart switching and the disk/ball picture.

Integration uses the Dormand-Prince 5(4) pair with a PI step-size controller.
Times in directional charts are rescaled ("portrait time"): the chart fields
carry the factor ``v^delta``, so clock time is not recovered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import fsolve

from .compactify import (ChartField, ChartId, all_charts, compactify_chart, from_chart,
                         to_chart)
from .poly import EPS, Polynomial, as_weights, partial, specialize
from .system import SlowFastSystem


class StepUnderflow(RuntimeError):
    def __init__(self, t, state, h):
        super().__init__(f"step size underflow (h = {h:.3g}) at t = {t:.17g}, "
                         f"state = {list(map(float, state))}")
        self.t = t
        self.state = np.array(state)
        self.h = h


# ----------------------------------------------------------------------------------
# compiled polynomial fields
# ----------------------------------------------------------------------------------

def _term_source(m, c, names):
    factors = [repr(float(c))]
    for k, a in enumerate(m.spatial):
        if a == 1:
            factors.append(f"y{k}")
        elif a:
            factors.append(f"y{k}**{a}")
    if m.eps == 1:
        factors.append("eps")
    elif m.eps:
        factors.append(f"eps**{m.eps}")
    return "*".join(factors)


def compile_polys(polys: Sequence[Polynomial]) -> Callable:
    """``f(y, eps) -> ndarray`` evaluating the polynomials in floating point.

    Works elementwise on numpy arrays too (``y`` is indexed by its first axis).
    """
    polys = list(polys)
    n = polys[0].n
    exprs = []
    for p in polys:
        terms = [_term_source(m, c, p.names) for m, c in p.items()]
        exprs.append(" + ".join(terms) if terms else "0.0 * y0")
    unpack = ", ".join(f"y{k}" for k in range(n)) + ("," if n == 1 else "")
    src = (f"def _f(y, eps):\n"
           f"    {unpack} = y\n"
           f"    return [{', '.join(exprs)}]\n")
    scope: dict = {}
    exec(compile(src, "<polynomial field>", "exec"), scope)
    raw = scope["_f"]

    def f(y, eps):
        return np.array(raw(y, eps), dtype=float)

    f.source = src
    f.raw = raw
    return f


# ----------------------------------------------------------------------------------
# Dormand-Prince 5(4)
# ----------------------------------------------------------------------------------

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class IntegratorConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_steps: int = 200_000
    t_max: float = 10.0
    switch_threshold: float = 5.0
    h0: float | None = None
    h_min: float = 1e-14
    beta: float = 0.04           # PI controller memory
    safety: float = 0.9

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.switch_threshold <= 1:
            raise ValueError("switch threshold must exceed 1")

    @classmethod
    def from_dict(cls, d: dict) -> "IntegratorConfig":
        keys = {"rel_tol", "abs_tol", "max_steps", "t_max", "switch_threshold", "h0"}
        return cls(**{k: v for k, v in d.items() if k in keys})


@dataclass
class SegmentResult:
    ts: list
    ys: list
    status: str          # "t_max", "max_steps", "exit"
    steps: int
    rejected: int


def dopri(f: Callable, y0, t0: float, t_end: float, eps: float, cfg: IntegratorConfig,
          exit_when: Callable | None = None, max_steps: int | None = None) -> SegmentResult:
    """Adaptive integration of ``y' = f(y, eps)`` from ``t0`` to ``t_end``.

    ``exit_when(y)`` is checked after every accepted step; the first step for
    which it returns True ends the segment with status ``"exit"``.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    ts, ys = [t], [y.copy()]
    max_steps = cfg.max_steps if max_steps is None else max_steps
    if t_end <= t:
        return SegmentResult(ts, ys, "t_max", 0, 0)
    alpha = 0.2 - 0.75 * cfg.beta
    k1 = f(y, eps)
    if cfg.h0:
        h = cfg.h0
    else:
        scale = cfg.abs_tol + cfg.rel_tol * np.abs(y)
        d0 = np.max(np.abs(y) / scale)
        d1 = np.max(np.abs(k1) / scale)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, t_end - t)
    err_prev = 1.0
    steps = rejected = 0
    K = np.empty((7, len(y)))
    while t < t_end:
        if steps >= max_steps:
            return SegmentResult(ts, ys, "max_steps", steps, rejected)
        h = min(h, t_end - t)
        if h < cfg.h_min * max(1.0, abs(t)):
            raise StepUnderflow(t, y, h)
        K[0] = k1
        for s in range(1, 7):
            K[s] = f(y + h * (np.dot(_A[s], K[:s])), eps)
        y_new = y + h * np.dot(_B5, K)
        err_vec = h * np.dot(_E, K)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(invalid="ignore", over="ignore"):
            err = float(np.max(np.abs(err_vec) / scale))
        if not np.isfinite(err) or not np.all(np.isfinite(y_new)):
            h *= 0.2
            rejected += 1
            continue
        if err <= 1.0:
            steps += 1
            t = t + h if t_end - t > h else t_end
            y = y_new
            k1 = K[6].copy()
            ts.append(t)
            ys.append(y.copy())
            err = max(err, 1e-10)
            fac = cfg.safety * err ** (-alpha) * err_prev ** cfg.beta
            h *= min(5.0, max(0.2, fac))
            err_prev = err
            if exit_when is not None and exit_when(y):
                return SegmentResult(ts, ys, "exit", steps, rejected)
        else:
            rejected += 1
            h *= max(0.2, cfg.safety * err ** (-alpha))
    return SegmentResult(ts, ys, "t_max", steps, rejected)


# ----------------------------------------------------------------------------------
# trajectories
# ----------------------------------------------------------------------------------

@dataclass
class Sample:
    t: float
    state: np.ndarray
    chart: str


@dataclass
class Trajectory:
    samples: list
    eps: float
    meta: dict = field(default_factory=dict)

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def states(self) -> np.ndarray:
        return np.array([s.state for s in self.samples])

    def charts(self) -> list:
        return [s.chart for s in self.samples]

    @property
    def final(self) -> Sample:
        return self.samples[-1]


def integrate_chart(cf: ChartField, x0, eps: float, cfg: IntegratorConfig,
                    exit_when: Callable | None = None) -> Trajectory:
    f = compile_polys(cf.equations)
    x0 = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial state must be finite")
    # the v_n >= 0 validity check only applies while v_n is still a coordinate
    directional = cf.direction != "identity" and (
        not cf.source_names or cf.n == len(cf.source_names))

    def leave(y):
        if directional and y[-1] < 0:
            return True
        return exit_when(y) if exit_when is not None else False

    seg = dopri(f, x0, 0.0, cfg.t_max, eps, cfg, leave)
    label = str(cf.chart)
    samples = [Sample(t, y, label) for t, y in zip(seg.ts, seg.ys)]
    return Trajectory(samples, eps, {"steps": seg.steps, "rejected": seg.rejected,
                                     "status": seg.status, "handoffs": []})


# ----------------------------------------------------------------------------------
# quasi-radius and the ball picture
# ----------------------------------------------------------------------------------

def quasi_radius(x, weights, tol: float = 1e-12) -> float:
    """Unique ``r >= 0`` with ``sum (x_i / r^w_i)^2 = 1`` (monotone bisection)."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(as_weights(weights).weights, dtype=float)
    if not np.any(x):
        return 0.0
    m = float(np.max(np.abs(x) ** (1.0 / w)))
    lo, hi = m, m * math.sqrt(len(x))

    def g(r):
        return float(np.sum((x / r ** w) ** 2)) - 1.0

    # g(lo) >= 0 >= g(hi): at r = m one term is already 1, at m*sqrt(n) each is <= 1/n
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pl_project(x, weights) -> np.ndarray:
    """Map a finite point into the open unit ball: ``(r/(1+r)) * x/r^w``."""
    x = np.asarray(x, dtype=float)
    r = quasi_radius(x, weights)
    if r == 0.0:
        return np.zeros_like(x)
    w = np.asarray(as_weights(weights).weights, dtype=float)
    theta = x / r ** w
    return (r / (1.0 + r)) * theta


def _slice_point(c, chart: ChartId, n: int) -> np.ndarray:
    """``z`` with ``x = z / v^w``: the chart's sign in slot ``i``, ``u_k`` elsewhere."""
    i = chart.index - 1
    z = np.empty(n)
    z[i] = chart.sign
    others = [j for j in range(n) if j != i]
    z[others] = c[:-1]
    return z


def chart_to_ball(c, weights, chart: ChartId) -> np.ndarray:
    """Ball coordinates of a chart point; valid on infinity (``v = 0``) too."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    if chart.index == n + 1:
        return pl_project(c, weights)
    w = np.asarray(as_weights(weights).weights, dtype=float)
    z = _slice_point(c, chart, n)
    mu = quasi_radius(z, weights)
    theta = z / mu ** w
    v = max(c[-1], 0.0)
    return (mu / (v + mu)) * theta


def chart_transition(c, weights, src: ChartId, dst: ChartId) -> np.ndarray:
    """Directional chart to directional chart, valid on infinity as well."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    w = as_weights(weights)
    z = _slice_point(c, src, n)
    j = dst.index - 1
    a = dst.sign * z[j]
    if a <= 0:
        raise ValueError(f"point is not in chart {dst}")
    v_new = c[-1] * a ** (-1.0 / w[j])
    out = [z[m] * a ** (-w[m] / w[j]) for m in range(n) if m != j]
    out.append(v_new)
    return np.array(out)


def _dominant_chart(x, weights) -> ChartId:
    w = as_weights(weights)
    scores = [abs(xi) ** (1.0 / wi) for xi, wi in zip(x, w)]
    i = int(np.argmax(scores))
    return ChartId("U" if x[i] >= 0 else "V", i + 1)


def integrate_global(sys: SlowFastSystem, weights, x0, eps: float, cfg: IntegratorConfig,
                     atlas: dict | None = None, max_handoffs: int = 1000) -> Trajectory:
    """Integrate through the atlas, starting in the finite chart.

    The finite chart is left when the quasi-radius exceeds ``switch_threshold``
    (for the directional chart of the dominant coordinate) and re-entered below
    ``switch_threshold - 1``.  Inside directional charts the chart is changed
    when another coordinate dominates by the factor 1.5.
    """
    w = as_weights(weights)
    n = sys.n
    if atlas is None:
        atlas = {str(cf.chart): cf for cf in all_charts(sys, w)}
    funcs = {k: compile_polys(cf.equations) for k, cf in atlas.items()}
    finite = f"U{n + 1}"
    hi, lo_ = cfg.switch_threshold, cfg.switch_threshold - 1.0

    x = np.asarray(x0, dtype=float)
    if quasi_radius(x, w) > hi:
        chart = _dominant_chart(x, w)
        state = to_chart(x, w, chart)
    else:
        chart = ChartId("U", n + 1)
        state = x.copy()
    t = 0.0
    samples = [Sample(t, state.copy(), str(chart))]
    handoffs = []
    steps = rejected = 0
    status = "t_max"
    wv = np.asarray(w.weights, dtype=float)

    def finite_exit(y):
        return quasi_radius(y, w) > hi

    def directional_exit_factory(ch):
        i = ch.index - 1

        def ex(y):
            if y[-1] < 0:
                return True
            z = _slice_point(y, ch, n)
            mu = quasi_radius(z, w)
            if y[-1] > 0 and mu / y[-1] < lo_:
                return True
            others = [m for m in range(n) if m != i]
            return any(abs(z[m]) ** (1.0 / wv[m]) > 1.5 for m in others)
        return ex

    for _ in range(max_handoffs + 1):
        label = str(chart)
        ex = finite_exit if label == finite else directional_exit_factory(chart)
        seg = dopri(funcs[label], state, t, cfg.t_max, eps, cfg, ex,
                    max_steps=cfg.max_steps - steps)
        steps += seg.steps
        rejected += seg.rejected
        samples.extend(Sample(tt, yy, label) for tt, yy in zip(seg.ts[1:], seg.ys[1:]))
        t, state = seg.ts[-1], seg.ys[-1]
        if seg.status != "exit":
            status = seg.status
            break
        new_chart, new_state = _next_chart(chart, state, w, n, hi, lo_)
        if new_chart is None:
            status = "exit"
            break
        handoffs.append({"t": float(t), "from": label, "to": str(new_chart),
                         "index": len(samples) - 1})
        chart, state = new_chart, new_state
        samples.append(Sample(t, state.copy(), str(chart)))
    else:
        status = "max_handoffs"
    return Trajectory(samples, eps, {"steps": steps, "rejected": rejected,
                                     "status": status, "handoffs": handoffs,
                                     "weights": tuple(w.weights)})


def _next_chart(chart: ChartId, state, w, n, hi, lo_):
    if chart.index == n + 1:
        new = _dominant_chart(state, w)
        return new, to_chart(state, w, new)
    if state[-1] < 0:
        return None, None
    z = _slice_point(state, chart, n)
    mu = quasi_radius(z, w)
    if state[-1] > 0 and mu / state[-1] < lo_:
        finite = ChartId("U", n + 1)
        return finite, from_chart(state, w, chart)
    new = _dominant_chart(z, w)
    if new == chart:
        return None, None
    return new, chart_transition(state, w, chart, new)


def sample_to_ball(s: Sample, weights) -> np.ndarray:
    return chart_to_ball(s.state, weights, ChartId.parse(s.chart))


def trajectory_ball(traj: Trajectory, weights) -> np.ndarray:
    return np.array([sample_to_ball(s, weights) for s in traj.samples])


# ----------------------------------------------------------------------------------
# critical curves
# ----------------------------------------------------------------------------------

def marching_squares(values: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> list:
    """Zero contour of ``values[j, i]`` sampled at ``(xs[i], ys[j])`` as polylines."""
    V = np.asarray(values, dtype=float)
    ny, nx = V.shape
    pos = V >= 0

    def edge_point(edge):
        (i0, j0), (i1, j1) = edge
        a, b = V[j0, i0], V[j1, i1]
        s = a / (a - b) if a != b else 0.5
        return (xs[i0] + s * (xs[i1] - xs[i0]), ys[j0] + s * (ys[j1] - ys[j0]))

    segments = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            flags = [pos[c[1], c[0]] for c in corners]
            if all(flags) or not any(flags):
                continue
            edges = [(corners[k], corners[(k + 1) % 4]) for k in range(4)
                     if flags[k] != flags[(k + 1) % 4]]
            if len(edges) == 2:
                segments.append((edges[0], edges[1]))
            else:
                # saddle cell: decide the pairing from the cell centre
                centre = V[j:j + 2, i:i + 2].mean() >= 0
                e = [(corners[k], corners[(k + 1) % 4]) for k in range(4)]
                if centre == flags[0]:
                    segments += [(e[0], e[1]), (e[2], e[3])]
                else:
                    segments += [(e[3], e[0]), (e[1], e[2])]

    def key(edge):
        return tuple(sorted(edge))

    adj: dict = {}
    for a, b in segments:
        adj.setdefault(key(a), []).append(key(b))
        adj.setdefault(key(b), []).append(key(a))
    seen = set()
    lines = []
    for start in sorted(adj, key=lambda k: (len(adj[k]) != 1, k)):
        if start in seen:
            continue
        path = [start]
        seen.add(start)
        cur = start
        while True:
            nxt = [k for k in adj[cur] if k not in seen]
            if not nxt:
                if len(path) > 2 and start in adj[cur]:
                    path.append(start)
                break
            cur = nxt[0]
            seen.add(cur)
            path.append(cur)
        lines.append(np.array([edge_point(k) for k in path]))
    return lines


def critical_curve_samples(sys: SlowFastSystem, weights, window=(-4.0, 4.0, -4.0, 4.0),
                           resolution: int = 400, slices: Sequence[float] | None = None,
                           project: bool = True) -> list:
    """Polylines of ``{P(., ., 0) = 0}`` on a window (and their disk images).

    For ``n = 3`` the curve is contoured on each slice ``z = const`` of
    ``slices``.  Returns dicts with ``xy`` (window coordinates) and ``ball``.
    """
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    X, Y = np.meshgrid(xs, ys)
    f = compile_polys([sys.P])
    out = []
    if sys.n == 2:
        levels = [None]
    elif sys.n == 3:
        levels = list(slices) if slices is not None else [0.0]
    else:
        raise ValueError("critical curves are drawn for n = 2 or 3")
    for z in levels:
        grid = [X, Y] if z is None else [X, Y, np.full_like(X, z)]
        vals = f.raw(grid, 0.0)[0]
        vals = np.broadcast_to(vals, X.shape)
        for line in marching_squares(vals, xs, ys):
            pts = line if z is None else np.column_stack([line, np.full(len(line), z)])
            entry = {"slice": z, "xy": pts}
            if project:
                entry["ball"] = np.array([pl_project(p, weights) for p in pts])
            out.append(entry)
    return out


# ----------------------------------------------------------------------------------
# distances and persistence evidence
# ----------------------------------------------------------------------------------

def distance_to_zero_set(P: Polynomial, point, eps_value: float = 0.0) -> float:
    """Euclidean distance from ``point`` to ``{P(., eps) = 0}`` near the point.

    Newton projection onto the zero set followed by the Lagrange conditions
    ``q - p = lam * grad P(q)``, ``P(q) = 0``.
    """
    p = np.asarray(point, dtype=float)
    n = len(p)
    f = compile_polys([P])
    grad = compile_polys([partial(P, name) for name in P.names])
    q = p.copy()
    for _ in range(50):
        val = f(q, eps_value)[0]
        g = grad(q, eps_value)
        gg = float(g @ g)
        if gg == 0:
            break
        q = q - val * g / gg
        if abs(val) < 1e-15:
            break

    def eqs(z):
        qq, lam = z[:n], z[n]
        return np.concatenate([qq - p - lam * grad(qq, eps_value), [f(qq, eps_value)[0]]])

    g0 = grad(q, eps_value)
    lam0 = float((q - p) @ g0 / max(float(g0 @ g0), 1e-300))
    sol, info, ier, _ = fsolve(eqs, np.concatenate([q, [lam0]]), full_output=True,
                               xtol=1e-13)
    cand = [q]
    if ier == 1 and abs(f(sol[:n], eps_value)[0]) < 1e-9:
        cand.append(sol[:n])
    return float(min(np.linalg.norm(c - p) for c in cand))


def persistence_distances(sys: SlowFastSystem, weights, starts, eps_values, t_end=10.0,
                          cfg: IntegratorConfig | None = None, chart: ChartId | None = None
                          ) -> dict:
    """End-time distance to the critical set for every ``eps`` (max over starts).

    With ``chart`` given, integration and distances use that chart's field and
    critical function; otherwise the original coordinates.
    """
    cfg = cfg or IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, t_max=t_end)
    cfg = IntegratorConfig(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_steps=cfg.max_steps,
                           t_max=t_end, switch_threshold=cfg.switch_threshold)
    cf = compactify_chart(sys, weights, chart or ChartId("U", sys.n + 1))
    crit0 = specialize(cf.equations[0], {EPS: 0})
    out = {}
    for e in eps_values:
        d = 0.0
        for s in starts:
            tr = integrate_chart(cf, s, e, cfg)
            d = max(d, distance_to_zero_set(crit0, tr.final.state))
        out[e] = d
    return out


# ----------------------------------------------------------------------------------
# closed orbits
# ----------------------------------------------------------------------------------

def section_crossings(traj: Trajectory, index: int, level: float, direction: int = -1) -> list:
    """Crossings of ``state[index] = level`` in the given direction (linear interpolation)."""
    S = traj.states()
    T = traj.times()
    out = []
    for k in range(len(S) - 1):
        a, b = S[k, index] - level, S[k + 1, index] - level
        if direction < 0 and a > 0 >= b or direction > 0 and a < 0 <= b:
            s = a / (a - b)
            out.append((T[k] + s * (T[k + 1] - T[k]), S[k] + s * (S[k + 1] - S[k])))
    return out


@dataclass
class ClosedOrbit:
    found: bool
    closure: float
    period: float
    loop: np.ndarray
    crossings: list

    def extent(self, index: int):
        return float(self.loop[:, index].min()), float(self.loop[:, index].max())


def find_closed_orbit(traj: Trajectory, index: int, level: float, direction: int = -1,
                      tol: float = 1e-4, min_returns: int = 3) -> ClosedOrbit:
    """Detect convergence of the return map on a section and extract the last loop."""
    cr = section_crossings(traj, index, level, direction)
    if len(cr) < min_returns:
        return ClosedOrbit(False, math.inf, math.nan, np.empty((0, len(traj.samples[0].state))), cr)
    (t0, p0), (t1, p1) = cr[-2], cr[-1]
    closure = float(np.linalg.norm(p1 - p0))
    T = traj.times()
    S = traj.states()
    mask = (T >= t0) & (T <= t1)
    loop = np.vstack([p0, S[mask], p1])
    return ClosedOrbit(closure < tol, closure, float(t1 - t0), loop, cr)
