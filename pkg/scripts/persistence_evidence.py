"""End-time distance to the critical set as eps shrinks.

Runs the planar normally hyperbolic example in original coordinates and the
three-dimensional example in the chart where its infinity is slow-fast, then
prints one row per eps.

    python scripts/persistence_evidence.py --eps 0.2 0.1 0.05 0.025 0.0125
"""

import argparse

from slowfast.compactify import ChartId
from slowfast.parse import parse_polynomial
from slowfast.sim import IntegratorConfig, persistence_distances
from slowfast.system import SlowFastSystem


def system(names, P, *Q):
    return SlowFastSystem(names, parse_polynomial(P, names),
                          [parse_polynomial(q, names) for q in Q])


CASES = {
    "planar": dict(sys=system(("x", "y"), "x^2 + x*y - 1", "1 - y^2"), weights=(1, 1),
                   starts=[(-1.05, 0.0), (-1.45, 5 / 6), (-0.85, -0.45)], chart=None),
    "infinity": dict(sys=system(("x", "y", "z"), "x*(y^2 - z^2)", "z^3", "y^3"),
                     weights=(1, 1, 1),
                     starts=[(0.1, 1.5, 0.0), (-0.1, 2.0, 0.0), (0.05, 1.8, 0.1)],
                     chart=ChartId("U", 2)),
}


def main():
    ap = argparse.ArgumentParser(description="persistence of attracting critical branches")
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    ap.add_argument("--t-end", type=float, default=10.0)
    args = ap.parse_args()
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, max_steps=2_000_000)
    print(f"{'case':10s} {'eps':>8s} {'distance':>12s} {'distance/eps':>13s}")
    for name, case in CASES.items():
        dist = persistence_distances(case["sys"], case["weights"], case["starts"], args.eps,
                                     args.t_end, cfg, chart=case["chart"])
        for e in sorted(dist, reverse=True):
            print(f"{name:10s} {e:8.4g} {dist[e]:12.4e} {dist[e] / e:13.4f}")


if __name__ == "__main__":
    main()
