"""Random system generators shared by the property and acceptance tests."""

import itertools
import math
import random
from fractions import Fraction

from slowfast.poly import Polynomial
from slowfast.system import SlowFastSystem

XY = ("x", "y")


def rational(r: random.Random, bound=5, den=4) -> Fraction:
    return Fraction(r.randint(-bound * den, bound * den), r.randint(1, den))


def nonzero_rational(r, bound=5, den=4):
    while True:
        q = rational(r, bound, den)
        if q:
            return q


def random_planar_system(r: random.Random, max_degree=6):
    """Planar system with rational coefficients in [-5, 5] and total degree <= 6.

    A third of the draws carry a squared binomial factor, so that multiple
    roots at infinity actually occur.
    """
    w = (r.randint(1, 3), r.randint(1, 3))
    exps = [e for e in itertools.product(range(max_degree + 1), repeat=2)
            if sum(e) <= max_degree]
    P = Polynomial(XY, {(r.choice(exps), 0): rational(r) for _ in range(r.randint(1, 6))})
    if r.random() < 1 / 3:
        g = math.gcd(*w)
        a, b = w[1] // g, w[0] // g            # x^a and y^b share a quasi-degree
        if 2 * (a + b) <= max_degree:
            c = nonzero_rational(r, 3, 2)
            binom = Polynomial(XY, {((a, 0), 0): 1, ((0, b), 0): -c})
            P = P + binom * binom * Polynomial(XY, {((0, 0), 0): nonzero_rational(r)})
    if P.is_zero():
        P = Polynomial.constant(XY, 1)
    Q = Polynomial(XY, {(r.choice(exps), 0): rational(r) for _ in range(r.randint(1, 3))})
    return SlowFastSystem(XY, P, [Q]), w


XYZ = ("x", "y", "z")


def pattern_system(kind: str, k1: int, k2: int, scalar=1):
    """Three-dimensional system whose fast top part is a singularity pattern.

    The slow equation of ``y`` is chosen with the same quasi-degree as the
    fast one whenever the exponent relations hold, so that the infinity
    plane carries slow-fast dynamics.
    """
    from slowfast.singular import pattern_polynomial

    x, y, z = (Polynomial.var(XYZ, s) for s in XYZ)
    P = pattern_polynomial(kind, k1, k2) * Fraction(scalar)
    Q2 = y ** (k1 + 1) * z if kind == "pitchfork" else x * y ** (k1 + 1)
    return SlowFastSystem(XYZ, P, [Q2, Polynomial.constant(XYZ, 1)])


HANDOFF_SYSTEMS = [
    (("x^2 - y^2 + 1", "x*y"), (1, 1)),
    (("x^2 + y", "1 + y^2"), (1, 2)),
    (("y - x^3", "-x + y^2"), (2, 3)),
    (("x^2 + x*y - 1", "y^2 + x"), (1, 1)),
    (("y^2 - x", "x^2 + 1"), (2, 1)),
]


def handoff_mismatches(count=50, seed=0):
    """Ball-coordinate mismatch at chart handoffs of random escaping trajectories."""
    import numpy as np

    from slowfast.sim import IntegratorConfig, integrate_global, sample_to_ball

    from conftest import make_system

    r = random.Random(seed)
    cfg = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-12, t_max=15.0, max_steps=20000)
    out = []
    systems = [(make_system(*src), w) for src, w in HANDOFF_SYSTEMS]
    while len(out) < count:
        sys, w = r.choice(systems)
        x0 = [r.uniform(-3, 3), r.uniform(-3, 3)]
        traj = integrate_global(sys, w, x0, r.uniform(0.1, 1.0), cfg, max_handoffs=20)
        for h in traj.meta["handoffs"]:
            a, b = traj.samples[h["index"]], traj.samples[h["index"] + 1]
            assert a.t == b.t and a.chart == h["from"] and b.chart == h["to"]
            out.append(float(np.max(np.abs(sample_to_ball(a, w) - sample_to_ball(b, w)))))
    return out[:count]
