"""Random check that the four normal-hyperbolicity tests at infinity coincide.

    python scripts/nh_equivalence_suite.py --systems 2000 --seed 1
"""

import argparse
import collections
import itertools
import random
import time
from fractions import Fraction

from slowfast import univariate as U
from slowfast.classify import infinity_polynomial, planar_equivalence_report
from slowfast.poly import Polynomial
from slowfast.system import SlowFastSystem

XY = ("x", "y")


def random_system(r: random.Random, max_degree: int):
    w = (r.randint(1, 3), r.randint(1, 3))
    exps = [e for e in itertools.product(range(max_degree + 1), repeat=2) if sum(e) <= max_degree]

    def coeff():
        return Fraction(r.randint(-20, 20), r.randint(1, 4))

    P = Polynomial(XY, {(r.choice(exps), 0): coeff() for _ in range(r.randint(1, 6))})
    if r.random() < 0.3:
        # squared factor to produce multiple roots at infinity
        sq = Polynomial(XY, {(r.choice(exps[:6]), 0): coeff() for _ in range(2)})
        P = P + sq * sq
    Q = Polynomial(XY, {((0, 0), 0): 1})
    return SlowFastSystem(XY, P if not P.is_zero() else Q, [Q]), w


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=500)
    ap.add_argument("--max-degree", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    r = random.Random(args.seed)
    counts = collections.Counter()
    t0 = time.perf_counter()
    for _ in range(args.systems):
        s, w = random_system(r, args.max_degree)
        f = infinity_polynomial(s, w)
        if U.deg(f) < 1:
            counts["no roots possible"] += 1
            continue
        for root in U.isolate_real_roots(U.squarefree_part(f)):
            rep = planar_equivalence_report(s, w, root)
            counts["agree" if rep.agree() else "DISAGREE"] += 1
            counts["nh" if rep.chart_nh else "not nh"] += 1
    print(dict(counts), f"{time.perf_counter() - t0:.1f} s")
    return 1 if counts["DISAGREE"] else 0


if __name__ == "__main__":
    raise SystemExit(main())
