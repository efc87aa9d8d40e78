"""Exact real common zeros of bivariate polynomials.

A bivariate polynomial is a list indexed by the degree in ``x`` whose entries
are dense univariate polynomials in ``y`` (see :mod:`univariate`).  The main
entry point, :func:`real_common_zero`, decides whether ``F = G = 0`` has a real
solution: candidate ``y`` values come from the resultant in ``x``; at each
real algebraic candidate a gcd in ``x`` is computed over ``Q[y]/(f)`` with
exact zero tests (dynamic evaluation), and its real roots are counted with a
Sturm sequence whose signs are decided at the algebraic number.
"""

from __future__ import annotations

from fractions import Fraction

from . import univariate as U
from .poly import Polynomial

Bpoly = list


def bstrip(F) -> Bpoly:
    F = [U.strip(c) for c in F]
    while F and not F[-1]:
        F.pop()
    return F


def bdeg(F) -> int:
    return len(F) - 1


def ydeg(F) -> int:
    return max((U.deg(c) for c in F if c), default=-1)


def from_polynomial(p: Polynomial, x: str, y: str) -> Bpoly:
    """Bivariate view of a polynomial in ``x`` and ``y`` only (eps already removed)."""
    ix, iy = p.index(x), p.index(y)
    out: dict = {}
    for m, c in p.terms.items():
        e = list(m.spatial) + [m.eps]
        a, b = e[ix], e[iy]
        e[ix] = e[iy] = 0
        if any(e):
            raise ValueError(f"{p} depends on more than {x}, {y}")
        out.setdefault(a, {})[b] = c
    if not out:
        return []
    F = []
    for a in range(max(out) + 1):
        col = out.get(a, {})
        F.append(U.strip([col.get(b, 0) for b in range(max(col, default=-1) + 1)]))
    return bstrip(F)


def bderiv_x(F) -> Bpoly:
    return bstrip([U.scale(F[a], a) for a in range(1, len(F))])


def at_y(F, y) -> list:
    """Specialize ``y`` to a rational, giving a univariate polynomial in ``x``."""
    return U.strip([U.evaluate(c, y) for c in F])


def content(F) -> list:
    g: list = []
    for c in F:
        g = U.gcd(g, c)
    return g


def bdiv_scalar(F, c) -> Bpoly:
    """Exact division of every coefficient by a polynomial in ``y``."""
    out = []
    for a in F:
        q, r = U.divmod_(a, c)
        if r:
            raise ArithmeticError("inexact division by content")
        out.append(q)
    return bstrip(out)


def primitive(F) -> Bpoly:
    F = bstrip(F)
    if not F:
        return F
    c = content(F)
    F = bdiv_scalar(F, c)
    return F


def _smul(F, c):
    return bstrip([U.mul(a, c) for a in F])


def _bsub(F, G):
    n = max(len(F), len(G))
    return bstrip([U.sub(F[i] if i < len(F) else [], G[i] if i < len(G) else [])
                   for i in range(n)])


def pseudo_rem(F, G) -> Bpoly:
    """``lc(G)^k * F mod G`` in ``Q[y][x]``."""
    F, G = bstrip(F), bstrip(G)
    dg = bdeg(G)
    lg = G[-1]
    while F and bdeg(F) >= dg:
        shift = bdeg(F) - dg
        lf = F[-1]
        F = _bsub(_smul(F, lg), [[]] * shift + _smul(G, lf))
    return F


def bgcd(F, G) -> Bpoly:
    """Primitive gcd in ``x`` over ``Q[y]`` (primitive remainder sequence)."""
    A, B = primitive(F), primitive(G)
    if bdeg(A) < bdeg(B):
        A, B = B, A
    while B:
        R = pseudo_rem(A, B)
        A, B = B, primitive(R)
    if not A:
        return A
    # normalize: leading coefficient with positive leading rational
    s = A[-1][-1]
    return [U.scale(c, 1 / s) for c in A]


def bexact_div(F, G) -> Bpoly:
    """Exact quotient ``F / G`` in ``Q[y][x]`` (``G`` must divide ``F``)."""
    F, G = bstrip(F), bstrip(G)
    dg = bdeg(G)
    if bdeg(F) < dg:
        if F:
            raise ArithmeticError("inexact bivariate division")
        return []
    Q = [[] for _ in range(bdeg(F) - dg + 1)]
    while F and bdeg(F) >= dg:
        shift = bdeg(F) - dg
        q, r = U.divmod_(F[-1], G[-1])
        if r:
            raise ArithmeticError("inexact bivariate division")
        Q[shift] = q
        F = _bsub(F, [[]] * shift + _smul(G, q))
    if F:
        raise ArithmeticError("inexact bivariate division")
    return bstrip(Q)


def resultant_x(F, G) -> list:
    """``Res_x(F, G)`` as a polynomial in ``y`` (evaluation + interpolation).

    Formal degrees are the true ``x``-degrees, so the specialization of the
    result at any ``y`` is the Sylvester determinant of the specialized
    coefficient lists.
    """
    F, G = bstrip(F), bstrip(G)
    df, dg = bdeg(F), bdeg(G)
    if df < 0 or dg < 0:
        return []
    if df == 0 and dg == 0:
        return [Fraction(1)]
    bound = dg * ydeg(F) + df * ydeg(G)
    xs = list(range(-(bound // 2), bound - bound // 2 + 1))
    ys = [U.resultant(at_y_full(F, t, df), at_y_full(G, t, dg), df, dg) for t in xs]
    return U.interpolate(xs, ys)


def at_y_full(F, y, d):
    """Coefficient list of length ``d+1`` (keeps vanishing leading terms)."""
    out = [U.evaluate(c, y) for c in F]
    return out + [Fraction(0)] * (d + 1 - len(out))


# ----------------------------------------------------------------------------------
# arithmetic over Q[y]/(f) at a distinguished real root
# ----------------------------------------------------------------------------------

class AlgebraicPoint:
    """``Q(y*)`` for a real algebraic ``y*``, with lazily split defining polynomial."""

    def __init__(self, root: U.RealAlgebraic):
        self.root = root

    @property
    def f(self):
        return self.root.poly

    def reduce(self, c):
        return U.rem(U.strip(c), self.f) if U.deg(self.f) >= 1 else U.strip(c)

    def is_zero(self, c) -> bool:
        c = self.reduce(c)
        return not c or self.root.sign_of(c) == 0

    def sign(self, c) -> int:
        c = self.reduce(c)
        return self.root.sign_of(c) if c else 0

    def inverse(self, c):
        c = self.reduce(c)
        if self.root.is_rational:
            return [1 / U.evaluate(c, self.root.exact)]
        g = U.gcd(self.f, c)
        if U.deg(g) > 0:
            # y* is not a root of g (c(y*) != 0); drop those factors
            f2 = U.divmod_(self.f, g)[0]
            self.root = U.RealAlgebraic(f2, self.root.lo, self.root.hi)
            c = U.rem(c, self.f)
        s, t, g = U.gcdex(self.f, c)
        return self.reduce(t)

    def mul(self, a, b):
        return self.reduce(U.mul(a, b))

    def normalize(self, F) -> list:
        """Reduce coefficients and drop leading ones vanishing at ``y*``."""
        F = [self.reduce(c) for c in F]
        while F and self.is_zero(F[-1]):
            F.pop()
        return F

    def rem(self, A, B):
        A = self.normalize(A)
        B = self.normalize(B)
        inv = self.inverse(B[-1])
        db = len(B) - 1
        while A and len(A) - 1 >= db:
            k = len(A) - 1 - db
            q = self.mul(A[-1], inv)
            for j in range(db + 1):
                A[k + j] = U.sub(A[k + j], self.mul(q, B[j]))
            A.pop()
            A = self.normalize(A)
        return A

    def gcd(self, A, B):
        A, B = self.normalize(A), self.normalize(B)
        while B:
            A, B = B, self.rem(A, B)
        return A

    def count_real_roots(self, A) -> int:
        """Distinct real roots in ``x`` of ``A(x, y*)`` (``A`` not identically zero)."""
        A = self.normalize(A)
        if len(A) <= 1:
            return 0
        d = [U.scale(A[k], k) for k in range(1, len(A))]
        seq = [A, self.normalize(d)]
        while True:
            r = self.rem(seq[-2], seq[-1])
            if not r:
                break
            seq.append([U.neg(c) for c in r])

        def var(at_plus):
            signs = []
            for s in seq:
                sg = self.sign(s[-1])
                if not at_plus and (len(s) - 1) % 2:
                    sg = -sg
                signs.append(sg)
            return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

        return var(False) - var(True)


def _real_root_at(F, G, root: U.RealAlgebraic) -> bool:
    """Do ``F(x, y*)`` and ``G(x, y*)`` have a common real root (``G=None``: root of F)?"""
    K = AlgebraicPoint(root)
    A = K.normalize(F)
    if G is None:
        if not A:
            return True
        return K.count_real_roots(A) > 0
    B = K.normalize(G)
    if not A and not B:
        return True
    if not A:
        A, B = B, A
    if not B:
        return K.count_real_roots(A) > 0
    H = K.gcd(A, B)
    if len(H) <= 1:
        return False
    if len(H) == 2:
        return True
    return K.count_real_roots(H) > 0


def has_real_zero(F) -> dict | None:
    """A witness ``{"y": ...}`` if the real curve ``F = 0`` is nonempty, else ``None``."""
    F = bstrip(F)
    if not F:
        return {"y": 0.0, "reason": "identically zero"}
    c = content(F)
    roots = U.isolate_real_roots(c) if U.deg(c) >= 1 else []
    if roots:
        return {"y": float(roots[0]), "reason": "whole line in x"}
    F = primitive(F)
    if bdeg(F) == 0:
        return None
    while True:
        g = bgcd(F, bderiv_x(F))
        if bdeg(g) < 1:
            break
        F = bexact_div(F, g)
    D = U.mul(F[-1], resultant_x(F, bderiv_x(F)))
    rs = U.isolate_real_roots(D) if U.deg(D) >= 1 else []
    samples = _cell_samples(rs)
    for t in samples:
        f = at_y(F, t)
        if U.deg(f) >= 1 and U.count_roots(U.sturm_sequence(U.squarefree_part(f)),
                                           "-inf", "+inf") > 0:
            return {"y": float(t), "reason": "generic cell"}
    for r in rs:
        if _real_root_at(F, None, r):
            return {"y": float(r), "reason": "critical value"}
    return None


def _cell_samples(roots) -> list:
    if not roots:
        return [Fraction(0)]
    pts = [roots[0].lo - 1]
    for a, b in zip(roots, roots[1:]):
        pts.append((a.hi + b.lo) / 2)
    pts.append(roots[-1].hi + 1)
    return pts


def real_common_zero(F, G) -> dict | None:
    """Witness of a real solution of ``F = G = 0``, or ``None`` if there is none."""
    F, G = bstrip(F), bstrip(G)
    if not F:
        return has_real_zero(G)
    if not G:
        return has_real_zero(F)
    H = bgcd(F, G)
    if bdeg(H) >= 1:
        w = has_real_zero(H)
        if w:
            return dict(w, reason="common factor: " + w["reason"])
        F, G = bexact_div(F, H), bexact_div(G, H)
    # content-only common factors are handled by the candidate scan below
    if bdeg(F) == 0 and bdeg(G) == 0:
        g = U.gcd(F[0], G[0])
        rs = U.isolate_real_roots(g) if U.deg(g) >= 1 else []
        return {"y": float(rs[0]), "reason": "common line"} if rs else None
    R = resultant_x(F, G)
    if not R:  # cannot happen after removing the gcd, kept as a guard
        raise ArithmeticError("resultant vanished for coprime polynomials")
    for r in (U.isolate_real_roots(R) if U.deg(R) >= 1 else []):
        if _real_root_at(F, G, r):
            return {"y": float(r), "reason": "resultant root"}
    return None


def finite_critical_nonNH(P: Polynomial, x: str, y: str) -> dict | None:
    """Witness of a real point with ``P = P_x = 0`` (at eps = 0), else ``None``."""
    F = from_polynomial(P, x, y)
    if not F:
        raise ValueError("P vanishes identically")
    return real_common_zero(F, bderiv_x(F))
