"""Command line interface: ``ncindex run|torus|circle|reflection|selftest``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, NCIndexError
from .runner import (EXIT_COMPUTE, EXIT_CONFIG, EXIT_DISAGREE, EXIT_OK, exit_code_for, load_config, run,
                     run_sweep, split_sweep)

METHOD_NAMES = {"chern": ["topological"], "analytic": ["analytic"], "both": ["topological", "analytic"]}


def _summary(rep) -> str:
    topo = rep.topological["snapped"] if rep.topological else "-"
    ana = rep.analytic["index"] if rep.analytic else "-"
    agree = "-" if rep.agreement is None else ("yes" if rep.agreement else "NO")
    return f"{rep.scenario}: topological {topo}, analytic {ana}, agreement {agree} -> {rep.extra.get('path')}"


def _run_one(config: dict, out, base=None) -> int:
    try:
        rep = run(config, out, base)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NCIndexError, ArithmeticError) as exc:
        print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    print(_summary(rep))
    return rep.exit_code


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        sweep = split_sweep(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    base = Path(args.config).resolve().parent
    out = getattr(args, "out", None) or (config.get("out") if isinstance(config, dict) else None)
    if sweep is None:
        return _run_one(config, out, base)
    results = run_sweep(sweep, out, base)
    codes = []
    for cfg, res in zip(sweep, results):
        code = exit_code_for(res)
        codes.append(code)
        if isinstance(res, Exception):
            print(f"{cfg.get('id', cfg.get('kind'))}: {type(res).__name__}: {res}", file=sys.stderr)
        else:
            print(_summary(res))
    # the most severe code wins: config, then compute, then disagreement
    for code in (EXIT_CONFIG, EXIT_COMPUTE, EXIT_DISAGREE):
        if code in codes:
            return code
    return EXIT_OK


def cmd_torus(args) -> int:
    params = {"theta": args.theta, "N": args.modes, "q": args.q, "L": args.L, "profile": args.profile}
    if args.eps is not None:
        params["eps"] = args.eps
    config = {"schema": 1, "kind": "torus", "id": args.id or f"torus-{args.theta:g}",
              "methods": METHOD_NAMES[args.method], "params": params}
    return _run_one(config, getattr(args, "out", None))


def cmd_circle(args) -> int:
    try:
        data = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    base = Path(args.config).resolve().parent
    if isinstance(data, dict) and "kind" not in data:
        # a bare operator description
        data = {"schema": 1, "kind": "circle-winding", "params": {"operator": data, "N": args.modes}}
    return _run_one(data, getattr(args, "out", None), base)


def cmd_reflection(args) -> int:
    config = {"schema": 1, "kind": "reflection-euler", "id": f"reflection-{args.projection}",
              "params": {"N": args.modes, "projection": args.projection}}
    return _run_one(config, getattr(args, "out", None))


def cmd_selftest(args) -> int:
    from .acceptance import format_table, run_criterion
    results = []
    selected = args.criteria or list(range(1, 12))
    for i in selected:
        r = run_criterion(i)
        results.append(r)
        print(r.line(), flush=True)
    table = format_table(results)
    print(table.splitlines()[-1])
    out = getattr(args, "out", None)
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        rows = [{"number": r.number, "title": r.title, "passed": r.passed, "error": r.error,
                 "seconds": r.seconds} for r in results]
        (out / "selftest.json").write_text(json.dumps(rows, indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_DISAGREE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="output directory for reports (default ./ncindex-reports)")
    ap = argparse.ArgumentParser(prog="ncindex", parents=[common],
                                 description="Indices of noncommutative elliptic operators, computed twice.")
    ap.add_argument("--version", action="version", version=f"ncindex {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a scenario or sweep config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("torus", parents=[common], help="twisted Dirac operator on the noncommutative torus")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--eps", type=float, default=None, help="ramp half-width (default: largest admissible)")
    p.add_argument("--modes", type=int, default=256, help="Fourier truncation N")
    p.add_argument("--method", choices=sorted(METHOD_NAMES), default="both")
    p.add_argument("--q", type=int, default=64, help="line grid points per unit length")
    p.add_argument("--L", type=float, default=26.0, help="line half-length")
    p.add_argument("--profile", choices=["exp", "exp-sq"], default="exp")
    p.add_argument("--id", default=None)
    p.set_defaults(func=cmd_torus)

    p = sub.add_parser("circle", parents=[common], help="winding formula vs numerical index for a circle operator")
    p.add_argument("--config", required=True, help="scenario config or bare operator JSON")
    p.add_argument("--modes", type=int, default=64)
    p.set_defaults(func=cmd_circle)

    p = sub.add_parser("reflection", parents=[common], help="Euler index for the reflection on the circle")
    p.add_argument("--projection", choices=["even", "odd", "identity"], default="even")
    p.add_argument("--modes", type=int, default=128)
    p.set_defaults(func=cmd_reflection)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", type=int, nargs="*", help="subset of criterion numbers")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
