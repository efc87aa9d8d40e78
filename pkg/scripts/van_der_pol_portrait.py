"""Draw the relaxation cycle on the infinity plane and report its return map.

    python scripts/van_der_pol_portrait.py out/vdp --eps 0.01 0.02 0.05
"""

import argparse
import json
from pathlib import Path

from slowfast.parse import load_system
from slowfast.portrait import PortraitConfig, run_portrait, write_portrait

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "systems" / "van_der_pol_infinity.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.01])
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    spec = load_system(FIXTURE)
    summary = {}
    for eps in args.eps:
        cfg = PortraitConfig.from_spec(spec)
        cfg.eps = eps
        out = args.out_dir / f"eps_{eps:g}"
        out.mkdir(parents=True, exist_ok=True)
        res = run_portrait(spec, cfg, jobs=args.jobs)
        write_portrait(res, cfg, out, title=f"van der Pol at infinity, eps = {eps:g}")
        orbit = res.orbit
        summary[eps] = None if orbit is None else {
            "found": orbit.found, "closure": orbit.closure, "period": orbit.period,
            "u_extent": orbit.extent(0) if orbit.found else None}
        print(f"eps = {eps:g}: {summary[eps]}")
    (args.out_dir / "summary.json").write_text(json.dumps(summary, indent=2, default=str))


if __name__ == "__main__":
    main()
