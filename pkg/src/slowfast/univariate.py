"""Dense univariate polynomials over Q and exact real-root machinery.

Polynomials are lists of :class:`Fraction` coefficients, lowest degree first,
with no trailing zeros (the zero polynomial is ``[]``).  Real roots are
isolated with Sturm sequences and refined by bisection; an isolated root is a
:class:`RealAlgebraic`, which can decide the exact sign of any rational
polynomial at the root.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Upoly = list


def strip(p: Sequence) -> Upoly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def deg(p: Upoly) -> int:
    return len(p) - 1


def lc(p: Upoly) -> Fraction:
    return p[-1] if p else Fraction(0)


def add(p: Upoly, q: Upoly) -> Upoly:
    n = max(len(p), len(q))
    return strip([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                  for i in range(n)])


def neg(p: Upoly) -> Upoly:
    return [-c for c in p]


def sub(p: Upoly, q: Upoly) -> Upoly:
    return add(p, neg(q))


def scale(p: Upoly, c) -> Upoly:
    return strip([c * a for a in p])


def mul(p: Upoly, q: Upoly) -> Upoly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return strip(out)


def divmod_(p: Upoly, q: Upoly):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq, cq = deg(q), q[-1]
    if len(r) < len(q):
        return [], strip(r)
    quo = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1, dq - 1, -1):
        c = r[k] / cq
        if c:
            quo[k - dq] = c
            for j in range(dq + 1):
                r[k - dq + j] -= c * q[j]
    return strip(quo), strip(r[:dq])


def rem(p: Upoly, q: Upoly) -> Upoly:
    return divmod_(p, q)[1]


def monic(p: Upoly) -> Upoly:
    return [c / p[-1] for c in p] if p else []


def gcd(p: Upoly, q: Upoly) -> Upoly:
    a, b = strip(p), strip(q)
    while b:
        a, b = b, rem(a, b)
    return monic(a)


def gcdex(p: Upoly, q: Upoly):
    """Return ``(s, t, g)`` with ``s*p + t*q = g = gcd(p, q)`` monic."""
    r0, r1 = strip(p), strip(q)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        quo, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    if not r0:
        return [], [], []
    c = r0[-1]
    return scale(s0, 1 / c), scale(t0, 1 / c), monic(r0)


def derivative(p: Upoly) -> Upoly:
    return strip([i * p[i] for i in range(1, len(p))])


def evaluate(p: Upoly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def evaluate_float(p: Upoly, x: float) -> float:
    acc = 0.0
    for c in reversed(p):
        acc = acc * x + float(c)
    return acc


def sign(x) -> int:
    return (x > 0) - (x < 0)


def squarefree_part(p: Upoly) -> Upoly:
    p = strip(p)
    if deg(p) < 1:
        return monic(p)
    g = gcd(p, derivative(p))
    return monic(divmod_(p, g)[0])


def squarefree_factorization(p: Upoly):
    """Yun's algorithm: ``[(f_1, 1), (f_2, 2), ...]`` with ``p = c * prod f_i**i``."""
    p = strip(p)
    if deg(p) < 1:
        return []
    out = []
    a = gcd(p, derivative(p))
    b = divmod_(p, a)[0]
    c = divmod_(derivative(p), a)[0]
    d = sub(c, derivative(b))
    i = 1
    while deg(b) > 0:
        a = gcd(b, d)
        if deg(a) > 0:
            out.append((monic(a), i))
        b = divmod_(b, a)[0]
        c = divmod_(d, a)[0]
        d = sub(c, derivative(b))
        i += 1
    return out


def sturm_sequence(p: Upoly) -> list:
    p = strip(p)
    seq = [p, derivative(p)]
    while seq[-1]:
        r = rem(seq[-2], seq[-1])
        seq.append(neg(r))
    return [s for s in seq if s]


def variations(seq, x) -> int:
    """Sign variations at ``x`` (``None`` / ``+inf`` / ``-inf`` strings allowed)."""
    signs = []
    for s in seq:
        if x == "+inf":
            v = sign(lc(s))
        elif x == "-inf":
            v = sign(lc(s)) * (-1) ** deg(s)
        else:
            v = sign(evaluate(s, x))
        if v:
            signs.append(v)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq, lo, hi) -> int:
    """Number of distinct real roots in the half-open interval ``(lo, hi]``."""
    return variations(seq, lo) - variations(seq, hi)


def root_bound(p: Upoly) -> Fraction:
    """Cauchy bound: every real root lies strictly inside ``(-B, B)``."""
    p = strip(p)
    return 1 + max(abs(c / p[-1]) for c in p[:-1]) if len(p) > 1 else Fraction(1)


class RealAlgebraic:
    """A real root of ``poly`` given by an isolating interval or an exact value.

    Invariant: either ``exact`` is a rational root, or ``poly`` (squarefree) has
    exactly one root in the open interval ``(lo, hi)`` and none at the ends.
    """

    def __init__(self, poly: Upoly, lo, hi, exact=None):
        self.poly = monic(strip(poly))
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        self.exact = None if exact is None else Fraction(exact)
        self._seq = None
        if self.exact is not None:
            self.lo = self.hi = self.exact

    @classmethod
    def rational(cls, q):
        q = Fraction(q)
        return cls([-q, Fraction(1)], q, q, exact=q)

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def _sturm(self):
        if self._seq is None:
            self._seq = sturm_sequence(self.poly)
        return self._seq

    def width(self) -> Fraction:
        return self.hi - self.lo

    def bisect(self):
        if self.exact is not None:
            return
        m = (self.lo + self.hi) / 2
        fm = evaluate(self.poly, m)
        if fm == 0:
            self.exact = m
            self.lo = self.hi = m
            return
        flo = evaluate(self.poly, self.lo)
        if flo:
            left = sign(fm) != sign(flo)
        else:
            left = count_roots(self._sturm(), self.lo, m) > 0
        if left:
            self.hi = m
        else:
            self.lo = m

    def refine(self, width=Fraction(1, 10 ** 12)):
        width = Fraction(width)
        while self.exact is None and self.hi - self.lo > width:
            self.bisect()
        return self

    def approx(self) -> Fraction:
        return self.exact if self.exact is not None else (self.lo + self.hi) / 2

    def __float__(self):
        if self.exact is None:
            self.refine(Fraction(1, 2 ** 60))
        return float(self.approx())

    def sign_of(self, g: Upoly) -> int:
        """Exact sign of the rational polynomial ``g`` at this root."""
        g = strip(g)
        if not g:
            return 0
        if self.exact is not None:
            return sign(evaluate(g, self.exact))
        h = gcd(self.poly, g)
        if deg(h) > 0 and count_roots(sturm_sequence(h), self.lo, self.hi) > 0:
            return 0
        seq = sturm_sequence(squarefree_part(g))
        while True:
            inside = count_roots(seq, self.lo, self.hi) + (evaluate(g, self.lo) == 0)
            if not inside:
                return sign(evaluate(g, self.lo))
            self.bisect()
            if self.exact is not None:
                return sign(evaluate(g, self.exact))

    def is_root_of(self, g: Upoly) -> bool:
        return self.sign_of(g) == 0

    def __repr__(self):
        if self.exact is not None:
            return f"RealAlgebraic({self.exact})"
        return f"RealAlgebraic(~{float(self.approx()):.12g} in ({self.lo}, {self.hi}))"


def _snap_rational(f: Upoly, lo: Fraction, hi: Fraction,
                   bounds=(1, 2, 3, 4, 6, 8, 12, 16, 100, 1000)):
    """Try small-denominator rationals inside ``(lo, hi)``; return a root or None."""
    mid = (lo + hi) / 2
    for bound in bounds:
        q = mid.limit_denominator(bound)
        if lo < q < hi and evaluate(f, q) == 0:
            return q
    return None


def isolate_real_roots(p: Upoly, width=Fraction(1, 10 ** 12)) -> list:
    """All distinct real roots of ``p`` in increasing order, refined to ``width``."""
    f = squarefree_part(p)
    if deg(f) < 1:
        return []
    seq = sturm_sequence(f)
    B = root_bound(f)
    found = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        c = count_roots(seq, lo, hi)
        if c == 0:
            continue
        if evaluate(f, hi) == 0:
            found.append(RealAlgebraic(f, hi, hi, exact=hi))
            if c > 1:
                m = (lo + hi) / 2
                stack.append((lo, m))
                stack.append((m, hi))
            continue
        if c == 1:
            q = _snap_rational(f, lo, hi)
            if q is not None:
                found.append(RealAlgebraic(f, q, q, exact=q))
            else:
                found.append(RealAlgebraic(f, lo, hi))
            continue
        m = (lo + hi) / 2
        stack.append((lo, m))
        stack.append((m, hi))
    found = _dedupe(found)
    for r in found:
        r.refine(width)
        if r.exact is None:
            # a narrow interval pins down small-denominator rational roots
            q = _snap_rational(f, r.lo, r.hi, (10 ** 6,))
            if q is not None:
                r.exact, r.lo, r.hi = q, q, q
    return sorted(found, key=lambda r: r.approx())


def _dedupe(roots):
    out = []
    for r in roots:
        if r.exact is not None and any(o.exact == r.exact for o in out):
            continue
        out.append(r)
    return out


def real_roots_with_multiplicity(p: Upoly, width=Fraction(1, 10 ** 12)):
    """``[(RealAlgebraic, multiplicity)]`` sorted by value, via Yun's factorization."""
    out = []
    for factor, mult in squarefree_factorization(p):
        for r in isolate_real_roots(factor, width):
            out.append((r, mult))
    return sorted(out, key=lambda t: t[0].approx())


def interpolate(xs: Sequence, ys: Sequence) -> Upoly:
    """Exact Newton interpolation through ``(xs[i], ys[i])``."""
    xs = [Fraction(x) for x in xs]
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly: Upoly = []
    for i in range(n - 1, -1, -1):
        poly = add(mul(poly, [-xs[i], Fraction(1)]), [coef[i]])
    return strip(poly)


def determinant(rows) -> Fraction:
    """Exact determinant by Gaussian elimination over Q."""
    a = [[Fraction(v) for v in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for k in range(col, n):
                    a[r][k] -= f * a[col][k]
    return det


def sylvester(p: Sequence, q: Sequence, dp: int, dq: int) -> list:
    """Sylvester matrix for formal degrees ``dp``, ``dq`` (coefficients low to high)."""
    p = list(p) + [Fraction(0)] * (dp + 1 - len(p))
    q = list(q) + [Fraction(0)] * (dq + 1 - len(q))
    size = dp + dq
    rows = []
    for i in range(dq):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(p[:dp + 1])):
            row[i + j] = c
        rows.append(row)
    for i in range(dp):
        row = [Fraction(0)] * size
        for j, c in enumerate(reversed(q[:dq + 1])):
            row[i + j] = c
        rows.append(row)
    return rows


def resultant(p: Upoly, q: Upoly, dp: int | None = None, dq: int | None = None) -> Fraction:
    dp = deg(p) if dp is None else dp
    dq = deg(q) if dq is None else dq
    if dp + dq == 0:
        return Fraction(1)
    return determinant(sylvester(p, q, dp, dq))
