"""Command-line front end.

Exit codes: 0 ok, 2 parse error, 3 derivation error, 4 I/O error,
5 degenerate analysis (the report is still printed).
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from .classify import (WHOLE_INFINITY, DegenerateInfinity, global_fenichel_check,
                       planar_equilibria_at_infinity, sample_infinity, whole_infinity_critical)
from .compactify import ChartId, DerivationError, compactify_chart, structure_report
from .newton import UnsupportedDimension, face_condition, hull, support
from .parse import ParseError, SpecError, SystemSpec, parse_system
from .portrait import PortraitConfig, run_portrait, write_portrait
from .singular import NotSlowFast, PatternNotRecognized, classify_at_infinity, finite_singular_points

EXIT_OK, EXIT_PARSE, EXIT_DERIVATION, EXIT_IO, EXIT_DEGENERATE = 0, 2, 3, 4, 5

NOT_NH_WARNING = "transversal but not normally hyperbolic"


class Degenerate(Exception):
    """Raised after a report is complete when the analysis was degenerate."""


# ----------------------------------------------------------------------------------
# deterministic serialization
# ----------------------------------------------------------------------------------

def _scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool) or isinstance(x, np.bool_):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x != x or x in (float("inf"), float("-inf")):
            return _string(repr(x))
        return format(x, ".17g")
    if isinstance(x, Fraction):
        return _string(str(x))
    return _string(str(x))


def _string(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def to_json(obj, indent: int = 2, level: int = 0) -> str:
    """JSON with sorted keys, 17-significant-digit floats and exact rationals as strings."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = sorted((str(k), v) for k, v in obj.items())
        body = ",\n".join(f"{pad}{_string(k)}: {to_json(v, indent, level + 1)}"
                          for k, v in items)
        return "{\n" + body + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        body = ",\n".join(pad + to_json(v, indent, level + 1) for v in obj)
        return "[\n" + body + "\n" + end + "]"
    return _scalar(obj)


def to_text(obj, level: int = 0) -> str:
    lines = []
    pad = "  " * level
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list, tuple)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(to_text(v, level + 1))
            else:
                lines.append(f"{pad}{k}: {_plain(v)}")
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            if isinstance(v, (dict, list, tuple)) and v:
                lines.append(f"{pad}-")
                lines.append(to_text(v, level + 1))
            else:
                lines.append(f"{pad}- {_plain(v)}")
    else:
        lines.append(pad + _plain(obj))
    return "\n".join(lines)


def _plain(v) -> str:
    if isinstance(v, (dict, list, tuple)):
        return "[]" if isinstance(v, (list, tuple)) else "{}"
    s = _scalar(v)
    return s[1:-1] if s.startswith('"') else s


# ----------------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------------

def _load(args) -> SystemSpec:
    try:
        text = Path(args.spec).read_text()
    except OSError as exc:
        raise IOError(f"cannot read {args.spec}: {exc.strerror or exc}") from None
    spec = parse_system(text)
    if getattr(args, "permute", None):
        order = [s.strip() for s in args.permute.split(",")]
        slow = spec.variable_names[1:]
        if sorted(order) != sorted(slow):
            raise SpecError(f"--permute must list the slow variables {slow}")
        idx = [slow.index(v) for v in order]
        spec.variable_names = [spec.variable_names[0]] + order
        spec.Q_sources = [spec.Q_sources[i] for i in idx]
        spec.weights = [spec.weights[0]] + [spec.weights[i + 1] for i in idx]
        spec.initial_conditions = [[ic[0]] + [ic[i + 1] for i in idx]
                                   for ic in spec.initial_conditions]
    return spec


def _selected_charts(n: int, chart: str | None, hemisphere: str) -> list:
    out = []
    for i in range(1, n + 2):
        for fam in ("U", "V"):
            c = ChartId(fam, i)
            if chart and str(c) != chart:
                continue
            if hemisphere == "north" and fam == "V" or hemisphere == "south" and fam == "U":
                continue
            out.append(c)
    if chart and not out:
        raise SpecError(f"unknown chart {chart!r} for n = {n}")
    return out


def _chart_job(args):
    sys, w, chart = args
    return compactify_chart(sys, w, chart)


def _charts(sys, w, charts, jobs: int) -> list:
    tasks = [(sys, w, c) for c in charts]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_chart_job, tasks))
    return [_chart_job(t) for t in tasks]


def _chart_dict(cf) -> dict:
    return {"variables": list(cf.names),
            "equations": cf.strings(),
            "rescale_power": cf.rescale_power,
            "direction": cf.direction}


def cmd_charts(args) -> tuple:
    spec = _load(args)
    sys, w = spec.system(), spec.weight_vector()
    charts = _selected_charts(sys.n, args.chart, args.hemisphere)
    fields = _charts(sys, w, charts, args.jobs)
    data = {"system": _system_dict(spec), "charts": {str(cf.chart): _chart_dict(cf)
                                                     for cf in fields}}
    if args.output == "text":
        lines = []
        for cf in fields:
            lines.append(str(cf.chart))
            lines.extend("  " + s for s in cf.labelled())
        return data, "\n".join(lines)
    return data, None


def _system_dict(spec: SystemSpec) -> dict:
    sys = spec.system()
    return {"name": spec.name, "variables": list(sys.names), "P": str(sys.P),
            "Q": [str(q) for q in sys.Q], "weights": list(spec.weights)}


def build_report(spec: SystemSpec, chart: str | None = None, hemisphere: str = "both",
                 jobs: int = 1) -> tuple:
    """The full analysis report and whether it hit a degenerate case."""
    sys, w = spec.system(), spec.weight_vector()
    warnings: list = []
    degenerate = False
    charts = _selected_charts(sys.n, chart, hemisphere)
    fields = _charts(sys, w, charts, jobs)
    report: dict = {
        "system": _system_dict(spec),
        "structure": structure_report(sys, w).as_dict(),
        "charts": {str(cf.chart): cf.strings() for cf in fields},
    }
    points = []
    if whole_infinity_critical(sys, w):
        degenerate = True
        warnings.append(WHOLE_INFINITY)
    elif sys.n == 2:
        for s in (1, -1):
            fam = "U" if s > 0 else "V"
            if hemisphere == "north" and s < 0 or hemisphere == "south" and s > 0:
                continue
            if chart and chart != f"{fam}2":
                continue
            points += [r.verdict for r in planar_equilibria_at_infinity(sys, w, s)]
    else:
        for cf in fields:
            if cf.direction != "slow":
                continue
            try:
                points += sample_infinity(cf)
            except DegenerateInfinity as exc:
                degenerate = True
                warnings.append(str(exc))
    report["infinity_points"] = [v.as_dict() for v in points]
    report["nh"] = [v.as_dict() for v in points if v.normally_hyperbolic]
    bad = sorted({str(v.point.chart) for v in points
                  if v.transversal and not v.normally_hyperbolic})
    for c in bad:
        warnings.append(f"{NOT_NH_WARNING} at infinity in chart {c}")

    sing = []
    try:
        if sys.n == 2:
            sing = [v.as_dict() for v in finite_singular_points(sys)]
        elif sys.n == 3 and structure_report(sys, w).infinity_dynamics_is_slow_fast:
            sing = [classify_at_infinity(sys, w).as_dict()]
    except (ValueError, NotSlowFast, PatternNotRecognized) as exc:
        warnings.append(f"singularity classification skipped: {exc}")
    report["singularities"] = sing

    if sys.n == 2:
        try:
            report["global_fenichel"] = global_fenichel_check(sys, w).as_dict()
        except (ValueError, DegenerateInfinity) as exc:
            warnings.append(f"global check skipped: {exc}")
    try:
        report["face_condition"] = face_condition(sys, w).as_dict()
    except UnsupportedDimension:
        pass
    report["warnings"] = warnings
    return report, degenerate


def cmd_analyze(args) -> tuple:
    spec = _load(args)
    report, degenerate = build_report(spec, args.chart, args.hemisphere, args.jobs)
    if degenerate:
        raise Degenerate(report)
    return report, None


def cmd_newton(args) -> tuple:
    spec = _load(args)
    sys, w = spec.system(), spec.weight_vector()
    pts = support(sys)
    data = {"system": _system_dict(spec), "support": [list(p) for p in pts]}
    try:
        data["hull"] = hull(pts).as_dict()
    except UnsupportedDimension as exc:
        data["hull"] = None
        data["warnings"] = [str(exc)]
    data["face_condition"] = face_condition(sys, w).as_dict()
    return data, None


def cmd_singular(args) -> tuple:
    spec = _load(args)
    sys, w = spec.system(), spec.weight_vector()
    if sys.n == 2:
        try:
            verdicts = [v.as_dict() for v in finite_singular_points(sys)]
        except ValueError as exc:
            raise Degenerate({"system": _system_dict(spec), "singularities": [],
                              "warnings": [str(exc)]})
        return {"system": _system_dict(spec), "singularities": verdicts}, None
    if sys.n != 3:
        raise Degenerate({"system": _system_dict(spec), "singularities": [],
                          "warnings": ["singularities at infinity are classified for n = 3"]})
    try:
        v = classify_at_infinity(sys, w)
    except NotSlowFast as exc:
        raise Degenerate({"system": _system_dict(spec), "singularities": [],
                          "warnings": [str(exc)]})
    return {"system": _system_dict(spec), "singularities": [v.as_dict()]}, None


def cmd_portrait(args) -> tuple:
    spec = _load(args)
    out = Path(args.out_dir)
    if not out.is_dir():
        raise IOError(f"output directory {out} does not exist")
    cfg = PortraitConfig.from_spec(spec)
    res = run_portrait(spec, cfg, seed=args.seed, jobs=args.jobs)
    if all(t is None for t in res.trajectories):
        raise DerivationError("every trajectory failed: " + "; ".join(res.failures))
    written = write_portrait(res, cfg, out, spec.name)
    data = {"files": [p.name for p in written], "warnings": res.failures,
            "seeds": res.seeds, "trajectories": sum(t is not None for t in res.trajectories)}
    if res.orbit is not None:
        lo, hi = res.orbit.extent(0) if res.orbit.found else (None, None)
        data["closed_orbit"] = {"found": res.orbit.found, "closure": res.orbit.closure,
                                "period": res.orbit.period, "u_min": lo, "u_max": hi}
    return data, None


COMMANDS = {"charts": cmd_charts, "analyze": cmd_analyze, "newton": cmd_newton,
            "singular": cmd_singular, "portrait": cmd_portrait}


def _common(defaults: bool) -> argparse.ArgumentParser:
    # sub-commands repeat the global flags without defaults so that a flag
    # given before the sub-command is not overwritten
    kw = {} if defaults else {"argument_default": argparse.SUPPRESS}
    c = argparse.ArgumentParser(add_help=False, **kw)
    c.add_argument("--output", choices=("json", "text"), **({"default": "json"} if defaults else {}))
    c.add_argument("--seed", type=int, **({"default": 0} if defaults else {}))
    c.add_argument("--jobs", type=int, **({"default": 1} if defaults else {}))
    return c


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slowfast", parents=[_common(True)],
                                description="Compactification and analysis of polynomial "
                                            "slow-fast systems.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[_common(False)], argument_default=argparse.SUPPRESS)
        sp.add_argument("spec", help="system file (JSON)")
        if name == "portrait":
            sp.add_argument("out_dir")
        if name in ("charts", "analyze"):
            sp.add_argument("--chart", default=None, help="only this chart, e.g. U2")
            sp.add_argument("--hemisphere", choices=("north", "south", "both"), default="both")
        sp.add_argument("--permute", default=None,
                        help="new order of the slow variables, comma separated")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, default in (("chart", None), ("hemisphere", "both"), ("permute", None)):
        if not hasattr(args, key):
            setattr(args, key, default)
    code = EXIT_OK
    try:
        data, text = COMMANDS[args.command](args)
    except Degenerate as exc:
        data, text, code = exc.args[0], None, EXIT_DEGENERATE
    except (ParseError, SpecError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_PARSE
    except (DerivationError, AssertionError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_DERIVATION
    except OSError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_IO
    except DegenerateInfinity as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_DEGENERATE
    if args.output == "text":
        print(text if text is not None else to_text(data))
    else:
        print(to_json(data))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
