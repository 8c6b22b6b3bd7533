"""Command-line front end: ``lieparam act | deparametrize | verify``.

Exit codes: 0 ok, 1 failed check, 2 configuration error, 3 numeric fault,
4 not a graph / not invertible, 5 inconclusive.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import harness
from .actions import GroupAction, act, semigroup_act
from .analysis import try_deparametrize
from .errors import ConfigError, ExprSyntaxError, Inconclusive, LieParamError, NotInvertible, UnboundSymbol
from .functions import ScalarFunction, canonical_parametrize, image_cloud
from .geometry import PointCloud, sample
from .scenario import Scenario, builtin_scenarios, load_scenario, number

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_NOT_GRAPH, EXIT_INCONCLUSIVE = range(6)


def _parse_assignments(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name.isidentifier():
            raise ConfigError(f"expected NAME=REAL, got {item!r}", "--param")
        out[name] = number(value, f"--param {name}")
    return out


def _load(path: str) -> Scenario:
    p = Path(path)
    if not p.exists():
        builtins = builtin_scenarios()
        stem = p.name[:-4] if p.name.endswith(".scn") else p.name
        if stem in builtins:
            return builtins[stem]
    return load_scenario(p)


def _acted(sc: Scenario, params: dict[str, float]):
    """The scenario's function as a parametric map, acted on when an action is declared."""
    func = sc.build_function(params)
    if func is None:
        raise ConfigError("scenario has no [function] section", "function")
    v = canonical_parametrize(func) if isinstance(func, ScalarFunction) else func
    action = sc.build_action(params)
    if action is None:
        return v
    if isinstance(action, GroupAction):
        if action.parameter not in params:
            raise ConfigError(f"unbound parameter {action.parameter!r}; pass --param {action.parameter}=REAL",
                              "--param")
        return act(action(params[action.parameter]), v)
    return semigroup_act(action, v)


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_act(args) -> int:
    sc = _load(args.scenario)
    w = _acted(sc, _parse_assignments(args.param))
    grid = sample(w.domain, args.grid or sc.grid)
    cloud = image_cloud(w, grid)
    header = ["p", "x", "u"] if w.dim == 1 else [*(f"p{i + 1}" for i in range(w.dim)),
                                                 *(f"x{i + 1}" for i in range(w.dim)), "u"]
    _write(cloud.to_csv(header if args.header else None, index=grid.points), args.out)
    return EXIT_OK


def cmd_deparametrize(args) -> int:
    sc = _load(args.scenario)
    v = _acted(sc, _parse_assignments(args.param))
    res = args.grid or sc.grid
    try:
        f = try_deparametrize(v, res)
    except NotInvertible as e:
        print(f"NotGraph: first component folds at p = {e.report.witness!r}", file=sys.stderr)
        return EXIT_NOT_GRAPH
    except Inconclusive as e:
        r = e.report
        print(f"Inconclusive: |V1'| = {r.min_abs_derivative:.3g} near p = {r.witness!r}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    print(f"Invertible: U recovered on {f.domain}", file=sys.stderr)
    grid = sample(f.domain, res)
    x = grid.points[:, 0]
    table = PointCloud(np.column_stack([x, f(x)]), shape=grid.resolution)
    _write(table.to_csv(["x", "U"] if args.header else None), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    target = args.suite
    if target.endswith(".scn") or Path(target).is_file():
        reports = [harness.run_scenario(_load(target), args.seed)]
    else:
        reports = harness.run_named(target, args.seed)
    sys.stdout.write(harness.summary_table(reports))
    _write(harness.reports_to_json(reports), args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lieparam", description="Group and semigroup actions on functions "
                                     "through parametric representations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", help="scenario file (or the name of a builtin scenario)")
        p.add_argument("--param", action="append", default=[], metavar="NAME=REAL",
                       help="bind a parameter; repeatable")
        p.add_argument("--grid", type=int, help="grid resolution (default: the scenario's)")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--header", action="store_true", help="write a header row")

    p = sub.add_parser("act", help="sample the image of g V as CSV columns p, x, u")
    common(p)
    p.set_defaults(func=cmd_act)
    p = sub.add_parser("deparametrize", help="recover U = V2 o V1^-1 and tabulate it as CSV columns x, U")
    common(p)
    p.set_defaults(func=cmd_deparametrize)
    p = sub.add_parser("verify", help="run builtin scenarios and property suites")
    p.add_argument("suite", nargs="?", default="all",
                   help="'all', a builtin scenario or suite name, or a scenario file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="verify-report.json", help="JSON report path")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid", None) is not None and args.grid < 2:
        parser.error("--grid must be at least 2")
    try:
        return args.func(args)
    except (ConfigError, ExprSyntaxError, UnboundSymbol) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NotInvertible as e:
        print(f"not invertible: {e}", file=sys.stderr)
        return EXIT_NOT_GRAPH
    except Inconclusive as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except LieParamError as e:
        print(f"numeric fault: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
