"""Supports and Newton polytopes of polynomial vector fields (exact integers).

The support of component ``i`` shifts every exponent vector by ``-1`` in slot
``i``, so a point ``a`` of the support satisfies ``w . a = d`` where ``d`` is
the degree index of the quasi-homogeneous part the monomial belongs to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .poly import Polynomial, as_weights
from .system import SlowFastSystem


class UnsupportedDimension(ValueError):
    pass


def support(field_: Sequence[Polynomial] | SlowFastSystem) -> list:
    """Sorted list of shifted exponent vectors; eps exponents are ignored."""
    comps = field_.vector_field() if isinstance(field_, SlowFastSystem) else field_
    pts = set()
    for i, p in enumerate(comps):
        for m in p.terms:
            a = list(m.spatial)
            a[i] -= 1
            pts.add(tuple(a))
    return sorted(pts)


# ----------------------------------------------------------------------------------
# integer geometry helpers
# ----------------------------------------------------------------------------------

def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return tuple(x // g for x in v) if g else tuple(v)


def rank(vectors: Iterable[Sequence[int]]) -> int:
    """Exact rank by fraction-free Gaussian elimination."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return 0
    r = 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = next((k for k in range(r, len(rows)) if rows[k][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for k in range(len(rows)):
            if k != r and rows[k][c]:
                f = rows[k][c] / rows[r][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        r += 1
    return r


def affine_dimension(points) -> int:
    pts = list(points)
    if not pts:
        return -1
    return rank(_sub(p, pts[0]) for p in pts[1:])


@dataclass
class Polytope:
    """Convex hull as vertices plus half-spaces ``normal . p <= offset``.

    Affine equalities of a lower-dimensional hull appear as pairs of opposite
    half-spaces, so every point satisfies every facet inequality regardless of
    dimension.
    """

    vertices: list
    facets: list
    dimension: int
    ambient: int
    points: list = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return self.dimension < self.ambient

    def contains(self, p) -> bool:
        return all(_dot(nrm, p) <= off for nrm, off in self.facets)

    def saturated(self, p) -> list:
        return [(nrm, off) for nrm, off in self.facets if _dot(nrm, p) == off]

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "degenerate": self.degenerate,
            "vertices": [list(v) for v in self.vertices],
            "facets": [{"normal": list(nrm), "offset": off} for nrm, off in self.facets],
        }


def _hull2(pts) -> list:
    """Counter-clockwise vertex cycle of points in the plane (monotone chain)."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _complement_basis(dirs, n):
    """Integer vectors spanning the orthogonal complement of ``dirs`` in Z^n."""
    basis = []
    cands = []
    if n == 2:
        cands = [(1, 0), (0, 1)]
    else:
        units = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        if len(dirs) == 1:
            cands = [_cross(dirs[0], e) for e in units]
        elif len(dirs) == 2:
            cands = [_cross(dirs[0], dirs[1])]
        else:
            cands = units
    if n == 2 and len(dirs) == 1:
        d = dirs[0]
        cands = [(-d[1], d[0])]
    for c in cands:
        c = _primitive(c)
        if any(c) and all(_dot(c, d) == 0 for d in dirs) and rank(basis + [c]) > len(basis):
            basis.append(c)
    return basis


def _equalities(basis, p0):
    out = []
    for nrm in basis:
        off = _dot(nrm, p0)
        out.append((nrm, off))
        out.append((tuple(-x for x in nrm), -off))
    return out


def hull(points) -> Polytope:
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if not pts:
        raise ValueError("convex hull of an empty set")
    n = len(pts[0])
    if n not in (2, 3):
        raise UnsupportedDimension(f"convex hulls are implemented for n = 2, 3 (got n = {n})")
    dim = affine_dimension(pts)
    p0 = pts[0]

    if dim == 0:
        facets = _equalities(_complement_basis([], n), p0)
        return Polytope([p0], facets, 0, n, pts)

    if dim == 1:
        d = _primitive(next(_sub(p, p0) for p in pts if p != p0))
        proj = sorted(pts, key=lambda p: _dot(d, p))
        lo, hi = proj[0], proj[-1]
        facets = _equalities(_complement_basis([d], n), p0)
        facets += [(d, _dot(d, hi)), (tuple(-x for x in d), -_dot(d, lo))]
        return Polytope(sorted([lo, hi]), facets, 1, n, pts)

    if n == 2:
        cyc = _hull2(pts)
        facets = []
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            e = _sub(b, a)
            nrm = _primitive((e[1], -e[0]))  # outward for a ccw cycle
            facets.append((nrm, _dot(nrm, a)))
        return Polytope(sorted(cyc), facets, 2, 2, pts)

    if dim == 2:
        # coplanar points in space: project along an axis the plane is not parallel to
        nrm = None
        for a, b in combinations(pts[1:], 2):
            c = _cross(_sub(a, p0), _sub(b, p0))
            if any(c):
                nrm = _primitive(c)
                break
        drop = next(k for k in range(3) if nrm[k])
        keep = [k for k in range(3) if k != drop]
        flat = {tuple(p[k] for k in keep): p for p in pts}
        cyc = _hull2(flat)
        facets = _equalities([nrm], p0)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            e = _sub(b, a)
            n2 = _primitive((e[1], -e[0]))
            lifted = [0, 0, 0]
            lifted[keep[0]], lifted[keep[1]] = n2
            facets.append((tuple(lifted), _dot(n2, a)))
        return Polytope(sorted(flat[q] for q in cyc), facets, 2, 3, pts)

    # full-dimensional in space: every supporting plane through three points
    facets = {}
    for a, b, c in combinations(pts, 3):
        nrm = _cross(_sub(b, a), _sub(c, a))
        if not any(nrm):
            continue
        nrm = _primitive(nrm)
        off = _dot(nrm, a)
        vals = [_dot(nrm, p) - off for p in pts]
        if all(x <= 0 for x in vals):
            facets[nrm] = off
        elif all(x >= 0 for x in vals):
            facets[tuple(-x for x in nrm)] = -off
    flist = sorted(facets.items())
    verts = [p for p in pts
             if rank([nrm for nrm, off in flist if _dot(nrm, p) == off]) == 3]
    return Polytope(verts, flist, 3, 3, pts)


def in_convex_hull(p, others) -> bool:
    """Brute-force membership: ``p`` is a convex combination of ``others``.

    Enumerates affinely independent subsets (Caratheodory) and solves the
    barycentric system exactly.  Meant as a test oracle for small sets.
    """
    p = tuple(p)
    others = [tuple(q) for q in others]
    if p in others:
        return True
    n = len(p)
    for k in range(1, n + 2):
        for sub in combinations(others, k):
            lam = _barycentric(p, sub)
            if lam is not None and all(x >= 0 for x in lam):
                return True
    return False


def _barycentric(p, sub):
    n = len(p)
    k = len(sub)
    # unknowns lam_1..lam_k; rows: coordinates and sum = 1
    rows = [[Fraction(q[r]) for q in sub] + [Fraction(p[r])] for r in range(n)]
    rows.append([Fraction(1)] * k + [Fraction(1)])
    m = len(rows)
    r = 0
    pivots = []
    for c in range(k):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            return None  # dependent subset; a smaller one covers it
        rows[r], rows[piv] = rows[piv], rows[r]
        rows[r] = [x / rows[r][c] for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][k] for i in range(r, m)):
        return None
    return [rows[i][k] for i in range(k)]


def brute_force_vertices(points) -> list:
    pts = sorted(set(tuple(p) for p in points))
    return [p for p in pts if not in_convex_hull(p, [q for q in pts if q != p])]


# ----------------------------------------------------------------------------------
# face condition at infinity
# ----------------------------------------------------------------------------------

def _exact_quotient(a, b):
    return a // b if a % b == 0 and a // b >= 0 else None


@dataclass
class ChartOriginVerdict:
    chart: str
    passes: bool
    reason: str
    witnesses: dict

    def as_dict(self):
        return {"chart": self.chart, "passes": self.passes, "reason": self.reason,
                "witnesses": self.witnesses}


@dataclass
class FaceReport:
    applicable: bool
    delta: int
    verdicts: list
    support_below_hyperplane: bool
    face_points: list
    note: str = ""

    def as_dict(self):
        return {
            "applicable": self.applicable,
            "delta": self.delta,
            "verdicts": [v.as_dict() for v in self.verdicts],
            "support_below_hyperplane": self.support_below_hyperplane,
            "face_points": [list(p) for p in self.face_points],
            "note": self.note,
        }


def face_condition(sys: SlowFastSystem, weights) -> FaceReport:
    """Check for the top-degree monomials that make each chart origin at infinity benign.

    Chart ``U_1``: a pure power ``x^(r+1)`` makes the origin a hyperbolic node.
    Chart ``U_l``: ``x*y_l^r`` (normally hyperbolic there) or ``y_l^s`` (origin
    not on the critical set).
    """
    w = as_weights(weights)
    n = sys.n
    d1 = sys.deltas(w)[0]
    delta = sys.delta(w)
    pts = support(sys)
    levels = [_dot(w, p) for p in pts]
    below = all(x <= delta for x in levels)
    face = [p for p, x in zip(pts, levels) if x == delta]
    if d1 != delta:
        return FaceReport(False, delta, [], below, face,
                          "not applicable: infinity is a non normally hyperbolic "
                          "component (fast equation has lower degree than the field)")
    top = sys.top_fast_component(w)
    verdicts = []

    e = _exact_quotient(delta + w[0], w[0])
    c1 = Fraction(0)
    mono = None
    if e is not None:
        mono = [0] * n
        mono[0] = e
        c1 = top.coefficient(mono)
    verdicts.append(ChartOriginVerdict(
        "U1", c1 != 0,
        "hyperbolic node" if c1 else "no pure power of the fast variable at top degree",
        {"c": str(c1), "monomial": mono}))

    for l in range(1, n):
        r = _exact_quotient(delta, w[l])
        s = _exact_quotient(delta + w[0], w[l])
        c = d = Fraction(0)
        mc = md = None
        if r is not None:
            mc = [0] * n
            mc[0], mc[l] = 1, r
            c = top.coefficient(mc)
        if s is not None:
            md = [0] * n
            md[l] = s
            d = top.coefficient(md)
        if d:
            reason = "origin is not on the critical set"
        elif c:
            reason = "normally hyperbolic"
        else:
            reason = "no admissible monomial: origin is a non normally hyperbolic point"
        verdicts.append(ChartOriginVerdict(
            f"U{l + 1}", bool(c or d), reason,
            {"c": str(c), "d": str(d), "monomial_c": mc, "monomial_d": md}))
    return FaceReport(True, delta, verdicts, below, face)
