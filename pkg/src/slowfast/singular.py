"""Fold, transcritical and pitchfork points of planar critical curves.

Finite points are classified from exact derivatives of ``f`` (fast) and the
value of ``g`` (slow).  At infinity of a 3-dimensional system the origin of
``U_2`` is classified either from the monomial shape of the top fast
component (``pattern``) or by restricting the chart field to the invariant
plane ``{w = 0}`` (``chart``).  Both paths classify the singularity of the
critical curve; whether the slow flow is nondegenerate there (``g != 0``) is
recorded but does not change the kind.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import elimination as E
from . import univariate as U
from .compactify import ChartId, compactify_chart, structure_report
from .poly import EPS, Polynomial, as_weights, evaluate, partial, specialize
from .system import SlowFastSystem

KINDS = ("fold", "transcritical", "pitchfork")


class PatternNotRecognized(ValueError):
    pass


class NotSlowFast(ValueError):
    pass


@dataclass
class SingularityVerdict:
    kind: str
    location: dict
    conditions: dict
    degenerate_failures: list = field(default_factory=list)
    method: str = "finite"
    lam: Fraction | None = None
    notes: list = field(default_factory=list)

    def as_dict(self):
        out = {"kind": self.kind, "location": self.location,
               "conditions": {k: str(v) for k, v in self.conditions.items()},
               "degenerate_failures": list(self.degenerate_failures),
               "method": self.method, "notes": list(self.notes)}
        if self.lam is not None:
            out["lambda"] = str(self.lam)
        return out


def _checks(v: dict, slow: bool) -> dict:
    """Named strict/equality conditions per kind, in the order they are tried."""
    g = [("g != 0", v["g"] != 0)] if slow else []
    return {
        "fold": [("f = 0", v["f"] == 0), ("f_x = 0", v["f_x"] == 0),
                 ("f_xx != 0", v["f_xx"] != 0), ("f_y != 0", v["f_y"] != 0)] + g,
        "transcritical": [("f = 0", v["f"] == 0), ("f_x = 0", v["f_x"] == 0),
                          ("f_y = 0", v["f_y"] == 0), ("det Hes < 0", v["det_hes"] < 0),
                          ("f_xx != 0", v["f_xx"] != 0)] + g,
        "pitchfork": [("f = 0", v["f"] == 0), ("f_x = 0", v["f_x"] == 0),
                      ("f_xx = 0", v["f_xx"] == 0), ("f_y = 0", v["f_y"] == 0),
                      ("f_xxx != 0", v["f_xxx"] != 0), ("f_xy != 0", v["f_xy"] != 0)] + g,
    }


def classify_finite_planar(f: Polynomial, g: Polynomial, p, require_slow: bool = True,
                           location: dict | None = None) -> SingularityVerdict:
    """Classify ``p`` for ``x' = f``, ``y' = eps*g`` (both evaluated at ``eps = 0``).

    ``require_slow=False`` drops ``g != 0`` from the conditions (the value is
    still reported); used when only the critical curve is being classified.
    """
    if f.n != 2:
        raise ValueError("planar classification needs two variables")
    x, y = f.names
    pt = [Fraction(c) for c in p] + [Fraction(0)]
    f0 = specialize(f, {EPS: 0})
    g0 = specialize(g, {EPS: 0})
    fx, fy = partial(f0, x), partial(f0, y)
    fxx, fxy, fyy = partial(fx, x), partial(fx, y), partial(fy, y)
    v = {
        "f": evaluate(f0, pt), "f_x": evaluate(fx, pt), "f_y": evaluate(fy, pt),
        "f_xx": evaluate(fxx, pt), "f_xy": evaluate(fxy, pt), "f_yy": evaluate(fyy, pt),
        "f_xxx": evaluate(partial(fxx, x), pt), "g": evaluate(g0, pt),
    }
    v["det_hes"] = v["f_xx"] * v["f_yy"] - v["f_xy"] ** 2
    lam = evaluate(partial(f, EPS), pt) if f.degree_in(EPS) >= 1 else None
    failures = []
    kind = "none"
    for k, conds in _checks(v, require_slow).items():
        bad = [name for name, ok in conds if not ok]
        if not bad and kind == "none":
            kind = k
        failures.extend(f"{k}: {name}" for name in bad)
    loc = location or {"finite": [str(c) for c in pt[:-1]]}
    notes = []
    if not require_slow and v["g"] == 0:
        notes.append("slow equation vanishes at the point (g = 0)")
    return SingularityVerdict(kind, loc, v, failures if kind == "none" else [],
                              "finite", lam if kind != "none" else None, notes)


# ----------------------------------------------------------------------------------
# exponent relations
# ----------------------------------------------------------------------------------

def _relation_targets(kind, w, delta):
    """Right-hand sides ``(k1*w2, k2*w2)`` for each kind."""
    w1, w2, w3 = w
    if kind == "fold":
        return delta - w1, delta + w1 - w3
    if kind == "transcritical":
        return delta - w1, delta + w1 - 2 * w3
    if kind == "pitchfork":
        return delta - w3, delta - 2 * w1
    raise ValueError(f"unknown kind {kind!r}")


def admissible_exponents(kind: str, weights, delta: int) -> list:
    """Positive integer ``(k1, k2)`` satisfying the weight relations of ``kind``."""
    w = as_weights(weights)
    if len(w) != 3:
        raise ValueError("exponent relations are for 3-dimensional systems")
    a, b = _relation_targets(kind, tuple(w), delta)
    if a % w[1] or b % w[1]:
        return []
    k1, k2 = a // w[1], b // w[1]
    return [(k1, k2)] if k1 >= 1 and k2 >= 1 else []


def pattern_polynomial(kind: str, k1: int, k2: int, names=("x", "y", "z")) -> Polynomial:
    X = [Polynomial.var(names, s) for s in names]
    x, y, z = X
    if kind == "fold":
        return x ** 2 * y ** k1 - y ** k2 * z
    if kind == "transcritical":
        return x ** 2 * y ** k1 - y ** k2 * z ** 2
    if kind == "pitchfork":
        return x * y ** k1 * z - x ** 3 * y ** k2
    raise ValueError(f"unknown kind {kind!r}")


_SHAPES = {  # (x, z) exponents of the positive and the negative term
    "fold": ((2, 0), (0, 1)),
    "transcritical": ((2, 0), (0, 2)),
    "pitchfork": ((1, 1), (3, 0)),
}


def match_pattern(top: Polynomial):
    """``(kind, k1, k2, scalar)`` if ``top = scalar * pattern``; else raise."""
    terms = list(top.terms.items())
    if len(terms) == 2 and not any(m.eps for m, _ in terms):
        for (m1, c1), (m2, c2) in (terms, terms[::-1]):
            if c2 != -c1:
                continue
            for kind, (s1, s2) in _SHAPES.items():
                e1, e2 = m1.spatial, m2.spatial
                if (e1[0], e1[2]) == s1 and (e2[0], e2[2]) == s2:
                    k1, k2 = e1[1], e2[1]
                    if k1 < 1 or k2 < 1:
                        raise PatternNotRecognized(
                            f"pattern not recognized: exponents ({k1}, {k2}) must be positive")
                    return kind, k1, k2, c1
    raise PatternNotRecognized(f"pattern not recognized: {top}")


def _origin_location():
    return {"chart": "U2", "coords": ["0", "0", "0"]}


def classify_by_pattern(sys: SlowFastSystem, weights) -> SingularityVerdict:
    """Classify the origin of ``U_2`` from the monomial pattern of ``P``'s top part."""
    if sys.n != 3:
        raise ValueError("pattern classification needs n = 3")
    w = as_weights(weights)
    dec = sys.decompositions(w)[0]
    if dec.delta is None:
        raise PatternNotRecognized("pattern not recognized: P vanishes")
    top = specialize(dec.top(), {EPS: 0})
    kind, k1, k2, c = match_pattern(top)
    delta = sys.delta(w)
    a, b = _relation_targets(kind, tuple(w), delta)
    conds = {"k1": k1, "k2": k2, "delta": delta, "k1*w2": k1 * w[1], "k2*w2": k2 * w[1],
             "required k1*w2": a, "required k2*w2": b, "scalar": c}
    failures = []
    if k1 * w[1] != a:
        failures.append(f"{kind}: k1*w2 = {k1 * w[1]} != {a}")
    if k2 * w[1] != b:
        failures.append(f"{kind}: k2*w2 = {k2 * w[1]} != {b}")
    if failures:
        return SingularityVerdict("none", _origin_location(), conds, failures, "pattern")
    return SingularityVerdict(kind, _origin_location(), conds, [], "pattern")


def infinity_plane_system(sys: SlowFastSystem, weights):
    """``(f, g)`` on ``{w = 0}`` of chart ``U_2``: ``u' = f``, ``v' = eps*g``."""
    if sys.n != 3:
        raise ValueError("the infinity plane system is defined for n = 3")
    rep = structure_report(sys, weights)
    if not rep.infinity_dynamics_is_slow_fast:
        raise NotSlowFast("infinity is not a slow-fast system in U2 "
                          f"(delta = {rep.delta}, delta_1 = {rep.delta_1}, "
                          f"delta_j = {rep.delta_j})")
    cf = compactify_chart(sys, weights, ChartId("U", 2)).restrict({"w": 0})
    f, h = cf.equations
    # h is eps * g exactly (every slow term carries eps)
    if not h.divisible_by(EPS):
        raise NotSlowFast("slow equation on the infinity plane is not O(eps)")
    g = h.shift(EPS, -1)
    return f, g


def classify_via_chart(sys: SlowFastSystem, weights) -> SingularityVerdict:
    f, g = infinity_plane_system(sys, weights)
    v = classify_finite_planar(f, g, (0, 0), require_slow=False,
                               location=_origin_location())
    v.method = "chart"
    return v


def classify_at_infinity(sys: SlowFastSystem, weights) -> SingularityVerdict:
    """Pattern classification when it applies, otherwise the chart computation.

    When both apply they are both run and any disagreement raises.
    """
    try:
        pv = classify_by_pattern(sys, weights)
    except PatternNotRecognized as exc:
        cv = classify_via_chart(sys, weights)
        cv.notes.append(str(exc))
        return cv
    try:
        cv = classify_via_chart(sys, weights)
    except NotSlowFast as exc:
        pv.notes.append(f"chart check skipped: {exc}")
        return pv
    if pv.kind != cv.kind:
        raise AssertionError(f"pattern says {pv.kind}, chart says {cv.kind}")
    pv.notes.append("chart computation agrees")
    pv.lam = cv.lam
    return pv


# ----------------------------------------------------------------------------------
# van der Pol at infinity
# ----------------------------------------------------------------------------------

@dataclass
class VdpExponents:
    feasible: bool
    ks: tuple
    boundary: list
    system: SlowFastSystem | None = None

    def as_dict(self):
        return {"feasible": self.feasible,
                "k": [str(k) for k in self.ks], "boundary": self.boundary,
                "system": None if self.system is None else {
                    "P": str(self.system.P), "Q": [str(q) for q in self.system.Q]}}


def vdp_exponents(weights, delta: int, a=Fraction(-1, 2)) -> VdpExponents:
    """Exponents making ``x' = y^k1 z - x^2 y^k2/2 - x^3 y^k3/3``,
    ``y' = 0``, ``z' = eps (a y^k4 - x y^k5)`` a van der Pol system on the
    infinity plane of ``U_2``."""
    w1, w2, w3 = as_weights(weights)
    nums = (delta + w1 - w3, delta - w1, delta - 2 * w1, delta + w3, delta - w1 + w3)
    ks = tuple(Fraction(n, w2) for n in nums)
    boundary = [f"k{i + 1} = 0" for i, k in enumerate(ks) if k == 0]
    ok = all(k.denominator == 1 and k >= 1 for k in ks)
    if not ok:
        return VdpExponents(False, ks, boundary)
    k1, k2, k3, k4, k5 = (int(k) for k in ks)
    names = ("x", "y", "z")
    x, y, z = (Polynomial.var(names, s) for s in names)
    P = y ** k1 * z - Fraction(1, 2) * x ** 2 * y ** k2 - Fraction(1, 3) * x ** 3 * y ** k3
    R = Fraction(a) * y ** k4 - x * y ** k5
    return VdpExponents(True, (k1, k2, k3, k4, k5), boundary,
                        SlowFastSystem(names, P, [Polynomial.zero(names), R]))


# ----------------------------------------------------------------------------------
# finite non-normally-hyperbolic points of planar systems
# ----------------------------------------------------------------------------------

def finite_singular_points(sys: SlowFastSystem, limit: int = 32) -> list:
    """Classify the real points with ``P = P_x = 0`` (at ``eps = 0``).

    Candidates come from the real roots of ``Res_x(P, P_x)``.  Points with
    rational coordinates are classified exactly; irrational ones are listed
    with a float location and kind ``"unclassified"``.  Curves of non-NH
    points (a common factor) raise ``ValueError``.
    """

    if sys.n != 2:
        raise ValueError("finite singular points are computed for planar systems")
    x, y = sys.names
    f0 = specialize(sys.P, {EPS: 0})
    g0 = specialize(sys.Q[0], {EPS: 0})
    F = E.from_polynomial(f0, x, y)
    Fx = E.bderiv_x(F)
    if not Fx:
        raise ValueError("P does not depend on the fast variable")
    if E.bdeg(E.bgcd(F, Fx)) >= 1 or U.deg(U.gcd(E.content(F), E.content(Fx))) >= 1:
        raise ValueError("P and P_x share a factor: a whole curve is not normally hyperbolic")
    R = E.resultant_x(F, Fx)
    out = []
    for r in (U.isolate_real_roots(R) if U.deg(R) >= 1 else []):
        if r.is_rational:
            fx = E.at_y(F, r.exact)
            h = U.gcd(fx, U.derivative(fx))
            for xr in U.isolate_real_roots(h) if U.deg(h) >= 1 else []:
                if xr.is_rational:
                    out.append(classify_finite_planar(f0, g0, (xr.exact, r.exact)))
                else:
                    out.append(_unclassified(float(xr), float(r)))
        else:
            K = E.AlgebraicPoint(r)
            H = K.gcd(K.normalize(F), K.normalize(Fx))
            if len(H) >= 2:
                xs = _float_common_roots(F, Fx, float(r))
                out.extend(_unclassified(xv, float(r)) for xv in xs)
        if len(out) >= limit:
            break
    return out


def _unclassified(xv: float, yv: float) -> SingularityVerdict:
    return SingularityVerdict("unclassified", {"finite": [repr(xv), repr(yv)]}, {}, [],
                              "finite", None, ["irrational point; exact tests not run"])


def _float_common_roots(F, Fx, yv: float) -> list:
    cf = [U.evaluate_float(c, yv) for c in F]
    roots = np.roots(cf[::-1]) if len(cf) > 1 else []
    out = []
    for z in roots:
        if abs(z.imag) < 1e-7:
            d = sum(k * c * z.real ** (k - 1) for k, c in enumerate(cf) if k)
            if abs(d) < 1e-6 * max(1.0, max(abs(c) for c in cf)):
                out.append(float(z.real))
    return sorted(set(round(v, 12) for v in out))
