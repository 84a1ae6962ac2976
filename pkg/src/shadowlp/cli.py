"""Command-line front end.

Subcommands: `solve` (single instance file -> result JSON on stdout),
`experiment` (sigma-grid pivot scaling), `lowerbound` (near-ball diameter
chain), and `montecarlo-cone` (segment-vs-cone frequency study).  Exit
codes for solve: 0 optimal, 2 infeasible, 3 unbounded, 1 any error.
Output directory resolution: --out flag, else $SHADOWLP_OUT, else cwd.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ShadowLpError
from .experiments import (
    CONE_COLUMNS,
    CONE_SCHEMA,
    LOWERBOUND_COLUMNS,
    LOWERBOUND_SCHEMA,
    SCALING_COLUMNS,
    SCALING_SCHEMA,
    cone_run,
    lowerbound_run,
    parse_config,
    rows_to_csv,
    shadow_scaling_run,
    summary_to_json,
    write_loglog_svg,
)
from .instance import InstanceParseError, load_instance
from .rng import RngStream
from .solver import Infeasible, Optimal, Unbounded, solve


def _out_dir(args) -> Path:
    if args.out:
        path = Path(args.out)
    else:
        path = Path(os.environ.get("SHADOWLP_OUT", "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_solve(args) -> int:
    try:
        inst = load_instance(args.file)
    except (OSError, InstanceParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        outcome, stats, _ = solve(RngStream(args.seed, args.stream), inst)
    except ShadowLpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    doc = {
        "outcome": outcome.kind,
        "seed": args.seed,
        "stream": args.stream,
        "restarts": stats.restarts,
        "pivots": {
            "phase1": stats.pivots_phase1,
            "phase2": stats.pivots_phase2,
            "phase3": stats.pivots_phase3,
            "total": stats.pivots_total,
        },
    }
    if isinstance(outcome, Optimal):
        doc["x"] = [float(v) for v in outcome.x]
        doc["basis"] = list(outcome.basis_indices)
        doc["objective_value"] = float(inst.c @ outcome.x)
        code = 0
    elif isinstance(outcome, Infeasible):
        doc["certificate"] = [float(v) for v in outcome.certificate]
        code = 2
    elif isinstance(outcome, Unbounded):
        doc["ray"] = [float(v) for v in outcome.ray]
        doc["improves_objective"] = outcome.improves_objective
        code = 3
    else:  # pragma: no cover
        return 1
    print(json.dumps(doc, indent=2, sort_keys=True))
    return code


def _run_study(args, schema, expected, runner, columns) -> int:
    try:
        cfg = parse_config(Path(args.config).read_text(encoding="utf-8"), schema)
        if cfg["experiment"] != expected:
            raise ShadowLpError(
                f"config is for experiment {cfg['experiment']!r}, expected {expected!r}"
            )
        result = runner(cfg)
    except (OSError, ShadowLpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rows, summary = result
    out = _out_dir(args)
    cols = list(columns)
    if cfg.get("record_wall_time"):
        cols.append("wall_time_s")
    (out / f"{expected}.csv").write_text(rows_to_csv(cols, rows), encoding="utf-8")
    (out / f"{expected}_summary.json").write_text(summary_to_json(summary), encoding="utf-8")
    if expected == "shadow_scaling" and cfg.get("svg"):
        finite = [
            (p["sigma"], p["mean_pivots"])
            for p in summary["per_sigma"]
            if np.isfinite(p["mean_pivots"])
        ]
        if finite:
            write_loglog_svg(
                out / "shadow_scaling.svg",
                [f[0] for f in finite],
                [f[1] for f in finite],
                summary["loglog_slope"],
                summary["loglog_intercept"],
                f"mean pivots vs sigma (d={cfg['d']}, n={cfg['n']})",
            )
    print(f"wrote {out / (expected + '.csv')}")
    print(f"wrote {out / (expected + '_summary.json')}")
    return 0


def cmd_experiment(args) -> int:
    return _run_study(
        args, SCALING_SCHEMA, "shadow_scaling",
        lambda cfg: shadow_scaling_run(cfg, jobs=args.jobs), SCALING_COLUMNS,
    )


def cmd_lowerbound(args) -> int:
    return _run_study(args, LOWERBOUND_SCHEMA, "lowerbound", lowerbound_run, LOWERBOUND_COLUMNS)


def cmd_cone(args) -> int:
    return _run_study(args, CONE_SCHEMA, "cone", cone_run, CONE_COLUMNS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shadowlp",
        description="Shadow-vertex LP solver and its experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance file, JSON to stdout")
    p_solve.add_argument("file")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--stream", type=int, default=0)
    p_solve.set_defaults(func=cmd_solve)

    p_exp = sub.add_parser("experiment", help="run the sigma-grid pivot scaling study")
    p_exp.add_argument("config")
    p_exp.add_argument("--jobs", type=int, default=1)
    p_exp.add_argument("--out", default=None)
    p_exp.set_defaults(func=cmd_experiment)

    p_lb = sub.add_parser("lowerbound", help="run the near-ball diameter chain")
    p_lb.add_argument("config")
    p_lb.add_argument("--out", default=None)
    p_lb.set_defaults(func=cmd_lowerbound)

    p_cone = sub.add_parser("montecarlo-cone", help="segment-vs-cone frequency study")
    p_cone.add_argument("config")
    p_cone.add_argument("--out", default=None)
    p_cone.set_defaults(func=cmd_cone)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
