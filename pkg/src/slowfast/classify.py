"""Normal hyperbolicity at infinity and global checks for planar systems.

In a slow chart ``U_l`` (``2 <= l <= n``) the fast coordinate is ``u`` and the
critical function is the ``u``-equation at ``eps = 0``.  Its restriction to
infinity ``{v_n = 0}`` is ``P_delta`` with ``1`` in slot ``l``; it vanishes
identically exactly when the fast equation has lower degree than the field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import univariate as U
from .compactify import ChartField, ChartId, compactify_chart
from .elimination import finite_critical_nonNH
from .poly import (EPS, Polynomial, as_weights, evaluate, partial, specialize, substitute,
                   to_univariate)
from .system import SlowFastSystem


class DegenerateInfinity(ValueError):
    """The whole infinity is critical; pointwise analysis does not apply."""


WHOLE_INFINITY = ("degenerate: the whole infinity is critical "
                  "(fast equation has lower degree than the field)")


def _num(x):
    """JSON-friendly view of an exact or algebraic number."""
    if isinstance(x, U.RealAlgebraic):
        if x.is_rational:
            return _num(x.exact)
        return float(x)
    if isinstance(x, Fraction):
        return float(x)
    return float(x)


def _exact(x):
    if isinstance(x, U.RealAlgebraic):
        return str(x.exact) if x.is_rational else None
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return None


@dataclass
class InfinityPoint:
    chart: ChartId
    coords: list

    def __post_init__(self):
        last = self.coords[-1]
        if not (last == 0 or (isinstance(last, U.RealAlgebraic) and last.exact == 0)):
            raise ValueError("a point at infinity has last coordinate 0")

    def as_dict(self):
        return {"chart": str(self.chart),
                "coords": [_num(c) for c in self.coords],
                "exact": [_exact(c) for c in self.coords]}


@dataclass
class NHVerdict:
    point: InfinityPoint
    on_critical_set: bool
    normally_hyperbolic: bool
    stability: str
    transversal: bool
    method: str = "exact"

    def __post_init__(self):
        if self.normally_hyperbolic and not self.on_critical_set:
            raise ValueError("normal hyperbolicity requires a critical point")
        if (self.stability != "none") != self.normally_hyperbolic:
            raise ValueError("stability is reported exactly for normally hyperbolic points")

    def as_dict(self):
        return {"point": self.point.as_dict(), "on_critical_set": self.on_critical_set,
                "normally_hyperbolic": self.normally_hyperbolic,
                "stability": self.stability, "transversal": self.transversal,
                "method": self.method}


def _stability(sign: int) -> str:
    return {-1: "attracting", 1: "repelling", 0: "none"}[sign]


# ----------------------------------------------------------------------------------
# critical sets in slow charts
# ----------------------------------------------------------------------------------

def critical_function(cf: ChartField) -> Polynomial:
    """``u``-equation at ``eps = 0`` (the layer problem's right-hand side)."""
    if cf.direction != "slow":
        raise ValueError(f"chart {cf.chart} is not a slow direction: "
                         "the compactified field is not slow-fast there")
    return specialize(cf.equations[0], {EPS: 0})


def critical_set_at_infinity(cf: ChartField) -> Polynomial:
    """Critical function restricted to ``{v_n = 0}``; zero when all of infinity is critical."""
    return specialize(critical_function(cf), {cf.names[-1]: 0})


def whole_infinity_critical(sys: SlowFastSystem, weights) -> bool:
    d = sys.deltas(weights)
    return d[0] is None or d[0] < sys.delta(weights)


def _gradient_at(F: Polynomial, point) -> list:
    pt = list(point) + [0]
    return [evaluate(partial(F, name), pt) for name in F.names]


def nh_at(cf: ChartField, point: Sequence) -> NHVerdict:
    """Exact verdict at a rational point of infinity in a slow chart."""
    point = [Fraction(c) for c in point]
    F = critical_function(cf)
    on = evaluate(F, point + [0]) == 0
    grad = _gradient_at(F, point)
    nh = on and grad[0] != 0
    transversal = on and any(grad[:-1])
    stab = _stability(U.sign(grad[0])) if nh else "none"
    return NHVerdict(InfinityPoint(cf.chart, point), on, nh, stab, transversal)


def transversality_at(point: Sequence, cf: ChartField) -> bool:
    """The critical set meets infinity transversally at ``point``.

    True iff the gradient of the critical function has a nonzero component
    other than the infinity coordinate, i.e. it is independent of the normal
    ``(0, ..., 0, 1)`` of the infinity hyperplane.
    """
    point = [Fraction(c) for c in point]
    F = critical_function(cf)
    if evaluate(F, point + [0]) != 0:
        raise ValueError("point is not on the critical set")
    return any(_gradient_at(F, point)[:-1])


# ----------------------------------------------------------------------------------
# planar systems
# ----------------------------------------------------------------------------------

def _require_planar(sys):
    if sys.n != 2:
        raise ValueError(f"planar analysis needs n = 2, got n = {sys.n}")


def infinity_polynomial(sys: SlowFastSystem, weights, hemisphere: int = 1) -> list:
    """``P_delta(u, s, 0)`` as a dense univariate list (``s`` = hemisphere sign)."""
    _require_planar(sys)
    top = specialize(sys.top_fast_component(weights), {EPS: 0})
    u = Polynomial.var(sys.names, sys.names[0])
    g = substitute(top, {sys.names[0]: u, sys.names[1]: Fraction(hemisphere)}, sys.names)
    return to_univariate(g, sys.names[0])


@dataclass
class InfinityRoot:
    root: U.RealAlgebraic
    multiplicity: int
    verdict: NHVerdict

    def as_dict(self):
        return {"u": _num(self.root), "exact": _exact(self.root),
                "multiplicity": self.multiplicity, "simple": self.multiplicity == 1,
                "verdict": self.verdict.as_dict()}


def _chart_u_derivative(cf: ChartField) -> list:
    """``d/du`` of the critical function on infinity, as a univariate list in ``u``."""
    F = critical_set_at_infinity(cf)
    return to_univariate(partial(F, cf.names[0]), cf.names[0])


def planar_equilibria_at_infinity(sys: SlowFastSystem, weights, hemisphere: int = 1) -> list:
    """Real roots of ``P_delta(u, +-1, 0)`` with multiplicities and exact NH verdicts."""
    _require_planar(sys)
    f = infinity_polynomial(sys, weights, hemisphere)
    if not f:
        raise DegenerateInfinity(WHOLE_INFINITY)
    chart = ChartId("U" if hemisphere > 0 else "V", 2)
    cf = compactify_chart(sys, weights, chart)
    Fu = _chart_u_derivative(cf)
    out = []
    for r, mult in U.real_roots_with_multiplicity(f):
        s = r.sign_of(Fu)
        nh = s != 0
        transversal = nh  # planar: independent of (0, 1) iff the u-partial is nonzero
        pt = InfinityPoint(chart, [r, Fraction(0)])
        v = NHVerdict(pt, True, nh, _stability(s) if nh else "none", transversal)
        out.append(InfinityRoot(r, mult, v))
    return out


@dataclass
class EquivalenceReport:
    chart_nh: bool
    layer_hyperbolic: bool
    simple_root: bool
    transversal: bool

    def values(self):
        return (self.chart_nh, self.layer_hyperbolic, self.simple_root, self.transversal)

    def agree(self) -> bool:
        return len(set(self.values())) == 1


def planar_equivalence_report(sys: SlowFastSystem, weights, root, hemisphere: int = 1
                              ) -> EquivalenceReport:
    """Four independent evaluations of normal hyperbolicity at a root at infinity.

    (a) the ``u``-partial of the compactified critical function, (b) the
    derivative of the layer equation ``u' = P_delta(u, +-1, 0)``, (c) the
    Yun multiplicity of the root, (d) independence of the chart gradient from
    the infinity normal.
    """
    _require_planar(sys)
    if not isinstance(root, U.RealAlgebraic):
        root = U.RealAlgebraic.rational(root)
    f = infinity_polynomial(sys, weights, hemisphere)
    if not f:
        raise DegenerateInfinity(WHOLE_INFINITY)
    if not root.is_root_of(f):
        raise ValueError("not a root of the infinity polynomial")
    chart = ChartId("U" if hemisphere > 0 else "V", 2)
    cf = compactify_chart(sys, weights, chart)

    # (a)
    a = root.sign_of(_chart_u_derivative(cf)) != 0
    # (b)
    b = root.sign_of(U.derivative(f)) != 0
    # (c)
    mult = next(m for fac, m in U.squarefree_factorization(f) if root.is_root_of(fac))
    c = mult == 1
    # (d) det [[F_u, F_v], [0, 1]] at (u*, 0)
    F = critical_function(cf)
    u, v = cf.names
    Fu = to_univariate(specialize(partial(F, u), {v: 0}), u)
    Fv = to_univariate(specialize(partial(F, v), {v: 0}), u)
    det = U.sub(U.scale(Fu, 1), U.scale(Fv, 0))  # rows (F_u, F_v) and (0, 1)
    d = root.sign_of(det) != 0
    return EquivalenceReport(a, b, c, d)


def _jacobian_at_origin(cf: ChartField):
    pt = [Fraction(0)] * (cf.n + 1)
    return [[evaluate(partial(e, name), pt) for name in cf.names] for e in cf.equations]


@dataclass
class OriginReport:
    chart: str
    on_C0: bool
    hyperbolic_node: bool
    eigenvalues: list
    jacobian: list
    degenerate: bool = False
    note: str = ""

    def as_dict(self):
        return {"chart": self.chart, "on_C0": self.on_C0,
                "hyperbolic_node": self.hyperbolic_node,
                "eigenvalues": self.eigenvalues,
                "jacobian": [[str(x) for x in row] for row in self.jacobian],
                "degenerate": self.degenerate, "note": self.note}


def _eigen2(J):
    (a, b), (c, d) = J
    tr, det = a + d, a * d - b * c
    disc = tr * tr - 4 * det
    if disc >= 0:
        r = _rational_sqrt(disc)
        if r is not None:
            eig = [str((tr - r) / 2), str((tr + r) / 2)]
        else:
            s = float(disc) ** 0.5
            eig = [(float(tr) - s) / 2, (float(tr) + s) / 2]
    else:
        s = float(-disc) ** 0.5
        eig = [f"{float(tr) / 2!r}-{s / 2!r}i", f"{float(tr) / 2!r}+{s / 2!r}i"]
    node = det > 0 and disc >= 0
    return node, eig


def _rational_sqrt(q: Fraction):
    from math import isqrt
    q = Fraction(q)
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def origin_fast_chart(sys: SlowFastSystem, weights, hemisphere: int = 1) -> OriginReport:
    """Whether the origin of ``U_1`` (``V_1``) lies on the critical set and is a node."""
    w = as_weights(weights)
    chart = ChartId("U" if hemisphere > 0 else "V", 1)
    top = specialize(sys.top_fast_component(w), {EPS: 0})
    pt = [Fraction(hemisphere)] + [Fraction(0)] * (sys.n - 1) + [Fraction(0)]
    c = evaluate(top, pt)
    cf = compactify_chart(sys, w, chart)
    ecf = ChartField(cf.chart, cf.names,
                     tuple(specialize(e, {EPS: 0}) for e in cf.equations),
                     cf.rescale_power, cf.direction, cf.weights, cf.source_names)
    J = _jacobian_at_origin(ecf)
    if sys.n == 2:
        node, eig = _eigen2(J)
    else:
        ev = np.linalg.eigvals(np.array(J, dtype=float))
        node = bool(np.all(np.abs(ev.imag) < 1e-12)
                    and (np.all(ev.real > 0) or np.all(ev.real < 0)))
        eig = [complex(e).real if abs(complex(e).imag) < 1e-12 else str(complex(e))
               for e in ev]
    degenerate = whole_infinity_critical(sys, w)
    return OriginReport(str(chart), c == 0, node, eig, J, degenerate,
                        WHOLE_INFINITY if degenerate else "")


def necessary_coefficient_check(sys: SlowFastSystem, weights) -> bool:
    """``P_delta`` contains ``y^((delta+w1)/w2)`` or ``x*y^(delta/w2)``."""
    _require_planar(sys)
    w = as_weights(weights)
    delta = sys.delta(w)
    top = sys.top_fast_component(w)
    found = False
    if (delta + w[0]) % w[1] == 0:
        found |= any(top.coefficient((0, (delta + w[0]) // w[1]), e) != 0
                     for e in range(top.degree_in(EPS) + 1))
    if delta % w[1] == 0 and delta >= 0:
        found |= any(top.coefficient((1, delta // w[1]), e) != 0
                     for e in range(top.degree_in(EPS) + 1))
    return found


@dataclass
class FenichelCertificate:
    finite_NH: bool
    infinity_NH: bool
    avoids_U1_origin: bool
    verdict: bool
    certificate: dict = field(default_factory=dict)

    def as_dict(self):
        return {"finite_NH": self.finite_NH, "infinity_NH": self.infinity_NH,
                "avoids_U1_origin": self.avoids_U1_origin, "verdict": self.verdict,
                "certificate": self.certificate}


def global_fenichel_check(sys: SlowFastSystem, weights) -> FenichelCertificate:
    """Hypotheses for persistence of the whole planar critical manifold.

    Finite part: no real point with ``P = P_x = 0`` (decided by elimination).
    Infinity: every root of ``P_delta(u, +-1, 0)`` is simple, and the origins
    of ``U_1``/``V_1`` are off the critical set.
    """
    _require_planar(sys)
    w = as_weights(weights)
    P0 = specialize(sys.P, {EPS: 0})
    if P0.is_zero():
        raise ValueError("P vanishes identically at eps = 0")
    x, y = sys.names
    witness = finite_critical_nonNH(P0, x, y)
    cert: dict = {"finite_witness": witness}
    finite_nh = witness is None

    if whole_infinity_critical(sys, w):
        cert["infinity"] = WHOLE_INFINITY
        inf_nh = False
    else:
        inf_nh = True
        for s, label in ((1, "U2"), (-1, "V2")):
            roots = planar_equilibria_at_infinity(sys, w, s)
            cert[label] = [r.as_dict() for r in roots]
            inf_nh &= all(r.multiplicity == 1 for r in roots)

    origins = [origin_fast_chart(sys, w, s) for s in (1, -1)]
    avoids = not any(o.on_C0 for o in origins) and not whole_infinity_critical(sys, w)
    cert["U1_origin"] = origins[0].as_dict()
    cert["V1_origin"] = origins[1].as_dict()
    return FenichelCertificate(finite_nh, inf_nh, avoids,
                               finite_nh and inf_nh and avoids, cert)


# ----------------------------------------------------------------------------------
# higher dimensions: sampling
# ----------------------------------------------------------------------------------

def sample_infinity(cf: ChartField, grid: Sequence = (-2, -1, Fraction(-1, 2), 0,
                                                      Fraction(1, 2), 1, 2)) -> list:
    """NH verdicts at critical points of infinity found on a rational grid.

    The coordinates other than ``u`` and ``v_n`` are fixed on ``grid``; the
    critical points on each line are the real roots in ``u``.  This is a
    semi-decision: points off the grid lines are not examined.
    """
    F = critical_set_at_infinity(cf)
    if F.is_zero():
        raise DegenerateInfinity(WHOLE_INFINITY)
    names = cf.names
    u = names[0]
    mids = names[1:-1]
    Fu = partial(F, u)
    G = critical_function(cf)
    grads = [partial(G, name) for name in names]
    out = []
    for vals in itertools.product(grid, repeat=len(mids)):
        fix = dict(zip(mids, (Fraction(v) for v in vals)))
        fix[names[-1]] = 0
        line = to_univariate(specialize(F, fix), u)
        if not line:
            # the whole line is critical: examine grid points on it
            for a in grid:
                p = [Fraction(a)] + [fix[m] for m in mids] + [Fraction(0)]
                v = nh_at(cf, p)
                v.method = "sampling"
                out.append(v)
            continue
        du = to_univariate(specialize(Fu, fix), u)
        for r in U.isolate_real_roots(line):
            s = r.sign_of(du)
            others = [to_univariate(specialize(g, fix), u) for g in grads[:-1]]
            transversal = any(r.sign_of(g) != 0 for g in others)
            pt = InfinityPoint(cf.chart, [r] + [fix[m] for m in mids] + [Fraction(0)])
            out.append(NHVerdict(pt, True, s != 0, _stability(s) if s else "none",
                                 transversal, method="sampling"))
    return out
