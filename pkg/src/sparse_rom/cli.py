"""Command line front end.

Subcommands: points (print a univariate point sequence), fom (solve one
steady flow and dump the field as CSV), study (run a convergence study
from a config file), compare (one study per point rule).  Exit codes:
0 success, 2 configuration problem, 3 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .fom import (
    CURVED_WALLS,
    FlowConfig,
    GeometrySpec,
    NARROWING_WIDTH,
    STRAIGHT,
    SolverError,
    build_mesh,
    field_to_csv,
    oseen_solve,
)
from .harness import CSV_HEADER, ConfigError, compare_point_rules, parse_config, run_study
from .points import DEFAULT_GRID_RESOLUTION, RULE_KINDS, make_rule
from .providers import SnapshotError

_FOM_MODELS = (STRAIGHT, NARROWING_WIDTH, CURVED_WALLS)
_DEFAULT_COMPARE_RULES = ("leja", "symmetrized_leja", "equidistant_leja_ordered")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-rom",
        description="Sparse polynomial interpolation of parametrized channel flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pts = sub.add_parser("points", help="print a univariate interpolation point sequence")
    pts.add_argument("--rule", required=True, choices=RULE_KINDS)
    pts.add_argument("--n", required=True, type=int, help="number of points")
    pts.add_argument("--grid-resolution", type=int, default=DEFAULT_GRID_RESOLUTION)
    pts.add_argument("--out", help="write to this file instead of stdout")

    fom = sub.add_parser("fom", help="solve one steady flow and write the field as CSV")
    fom.add_argument("--model", required=True, choices=_FOM_MODELS)
    fom.add_argument(
        "--param",
        type=float,
        nargs="*",
        default=[],
        help="physical parameters: mu for narrowing_width, "
        "nu_visc curvature for curved_walls, none for straight",
    )
    fom.add_argument("--out", required=True)
    fom.add_argument("--nx", type=int, default=36)
    fom.add_argument("--ny", type=int, default=12)
    fom.add_argument("--nu-visc", type=float, help="viscosity override")
    fom.add_argument("--oseen-tol", type=float, default=1e-10)
    fom.add_argument("--oseen-max-iter", type=int, default=200)

    study = sub.add_parser("study", help="run a convergence study from a config file")
    study.add_argument("--config", required=True)
    study.add_argument("--out", help="override the config's output_path")

    cmp_cmd = sub.add_parser("compare", help="run one study per point rule")
    cmp_cmd.add_argument("--config", required=True)
    cmp_cmd.add_argument(
        "--rules", nargs="+", default=list(_DEFAULT_COMPARE_RULES), choices=RULE_KINDS
    )
    return parser


def _cmd_points(args) -> int:
    rule = make_rule(args.rule, args.n, grid_resolution=args.grid_resolution)
    lines = [repr(float(x)) for x in rule.points]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_fom(args) -> int:
    params = list(args.param)
    if args.model == STRAIGHT:
        if params:
            raise ConfigError("the straight model takes no parameters")
        spec = GeometrySpec(model=STRAIGHT)
        nu_visc = 1.0
    elif args.model == NARROWING_WIDTH:
        if len(params) != 1:
            raise ConfigError("narrowing_width takes exactly one parameter: mu")
        spec = GeometrySpec(model=NARROWING_WIDTH, mu=params[0])
        nu_visc = 1.0
    else:
        if len(params) != 2:
            raise ConfigError("curved_walls takes two parameters: nu_visc curvature")
        spec = GeometrySpec(model=CURVED_WALLS, curvature=params[1])
        nu_visc = params[0]
    if args.nu_visc is not None:
        nu_visc = args.nu_visc
    cfg = FlowConfig(
        nu_visc=nu_visc, oseen_tol=args.oseen_tol, oseen_max_iter=args.oseen_max_iter
    )
    mesh = build_mesh(spec, args.nx, args.ny)
    result = oseen_solve(mesh, cfg)
    field_to_csv(result.field, args.out)
    print(
        f"converged in {result.iterations} iterations "
        f"(last diff {result.trace[-1]:.3e}); field written to {args.out}"
    )
    return 0


def _print_rows(rows) -> None:
    print(CSV_HEADER)
    for row in rows:
        print(f"{row.N},{row.mean_rel_l2!r},{row.max_rel_l2!r}")


def _cmd_study(args) -> int:
    cfg = parse_config(args.config)
    if args.out:
        cfg = dataclasses.replace(cfg, output_path=args.out)
    rows = run_study(cfg)
    _print_rows(rows)
    return 0


def _cmd_compare(args) -> int:
    cfg = parse_config(args.config)
    results = compare_point_rules(cfg, args.rules)
    for kind, rows in zip(args.rules, results):
        last = rows[-1]
        print(
            f"{kind}: N={last.N} mean_rel_l2={last.mean_rel_l2!r} "
            f"max_rel_l2={last.max_rel_l2!r}"
        )
    return 0


_COMMANDS = {
    "points": _cmd_points,
    "fom": _cmd_fom,
    "study": _cmd_study,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, SnapshotError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:  # bad parameters, geometry, point rules
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
