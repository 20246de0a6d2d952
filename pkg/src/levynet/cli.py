"""Command line interface: ``levynet simulate | compute | verify``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid arguments
or parameters.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import LevyNetError

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _emit(doc: dict | str, out: str | None) -> None:
    text = doc if isinstance(doc, str) else json.dumps(doc, indent=2, sort_keys=True)
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n")


def _simulate(args: argparse.Namespace) -> int:
    from .rng import generator

    gen = generator(args.seed, f"cli.simulate.{args.object}")
    if args.object == "stable":
        from .stable_levy import sample_levy_path

        n = args.n or 1000
        obj = sample_levy_path(args.alpha, args.t, args.t / n, gen)
    elif args.object == "csbp":
        from .csbp import csbp_path

        obj = csbp_path(args.alpha, args.y0, args.t, gen)
    elif args.object == "forest":
        from .stable_forest import sample_conditioned_forest

        obj = sample_conditioned_forest(args.alpha, args.n or 10_000, gen)
    elif args.object == "levynet":
        from .levy_net import skeleton_from_profile
        from .stable_forest import sample_conditioned_forest

        n = args.n or 10_000
        obj = skeleton_from_profile(sample_conditioned_forest(args.alpha, n, gen), gen, n=n)
    else:
        from .brownian_map import sample_discrete_snake, sample_gaussian_snake

        make = sample_gaussian_snake if args.variant == "gaussian" else sample_discrete_snake
        obj = make(args.n or 4096, gen)
    _emit(obj.to_json(), args.out)
    return EXIT_OK


def _compute(args: argparse.Namespace) -> int:
    q = args.quantity
    if q == "i-alpha":
        from .characterization import i_alpha_closed, i_alpha_quadrature

        doc = {"alpha": args.alpha, "closed": i_alpha_closed(args.alpha), "quadrature": i_alpha_quadrature(args.alpha)}
    elif q == "root":
        from .characterization import find_martingale_alpha

        doc = {"root": find_martingale_alpha(tol=args.tol)}
    elif q == "csbp-laplace":
        from .csbp import u_lambda

        u = float(u_lambda(args.alpha, args.lam, args.t))
        doc = {"alpha": args.alpha, "lambda": args.lam, "t": args.t, "y0": args.y0, "u": u,
               "laplace": float(np.exp(-args.y0 * u))}
    elif q == "extinction":
        from .csbp import extinction_tail

        doc = {"alpha": args.alpha, "t": args.t, "y0": args.y0,
               "survival": float(extinction_tail(args.alpha, args.y0, args.t))}
    else:
        from .brownian_map import metric_matrix, sample_discrete_snake
        from .rng import generator

        gen = generator(args.seed, "cli.compute.metric")
        mm = metric_matrix(sample_discrete_snake(args.n or 4096, gen), args.m, gen)
        doc = mm.to_dict()
    _emit(doc, args.out)
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    from .harness import RunConfig, load_config, run_suite

    cfg = load_config(args.config) if args.config else RunConfig()
    changes = {"seed": args.seed, "jobs": args.jobs}
    if args.out is not None:
        changes["out"] = args.out
    cfg = cfg.updated(**changes)
    report = run_suite(args.suite, cfg)
    for r in report.records:
        print(r.line())
    print(f"report written to {cfg.out}")
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    from .harness.criteria import SUITES

    p = argparse.ArgumentParser(prog="levynet", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="root seed (default 42)")
    common.add_argument("--out", default=None, help="output file (simulate, compute) or directory (verify)")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default 1)")
    common.add_argument("--alpha", type=float, default=1.5)
    common.add_argument("--n", type=int, default=None, help="size parameter (steps, vertices)")

    s = sub.add_parser("simulate", parents=[common], help="sample one object and write it as JSON")
    s.add_argument("object", choices=["stable", "csbp", "forest", "levynet", "snake"])
    s.add_argument("--t", type=float, default=1.0, help="time horizon")
    s.add_argument("--y0", type=float, default=1.0)
    s.add_argument("--variant", choices=["lattice", "gaussian"], default="lattice")

    c = sub.add_parser("compute", parents=[common], help="evaluate a closed form or a metric")
    c.add_argument("quantity", choices=["i-alpha", "root", "csbp-laplace", "extinction", "metric"])
    c.add_argument("--t", type=float, default=1.0)
    c.add_argument("--y0", type=float, default=1.0)
    c.add_argument("--lam", type=float, default=1.0)
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--m", type=int, default=64, help="number of points for the metric")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=list(SUITES) + ["all"])
    v.add_argument("--config", default=None, help="JSON or key=value run configuration")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command != "verify":
        args.seed = 42 if args.seed is None else args.seed
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"simulate": _simulate, "compute": _compute, "verify": _verify}[args.command]
    try:
        return handler(args)
    except LevyNetError as exc:
        print(f"levynet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
