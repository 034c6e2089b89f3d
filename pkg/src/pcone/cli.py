"""Command-line interface: ``pcone <command> ...``.

Matrices are read from JSON files (see :mod:`pcone.io`). Results go to
standard output with 17 significant digits; failures print one line to
standard error and exit with a code that identifies the failure class.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .cone import Geodesic, TangentAt, distance, log_point
from .convexopt import ConvexSubmanifold, best_approximation, circumcenter
from .errors import DimensionMismatch, PconeError, UnknownSuite
from .io import MalformedMatrix, csv_text, dumps_json, load_matrix, matrix_obj
from .linalg import as_schatten, posdef
from .metricprops import curvature_estimate, curvature_limit
from .splitting import BlockPartition, cpr_factorize
from .suites import SUITES, SuiteConfig, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_NOT_FOUND = 2
EXIT_MALFORMED = 3
EXIT_DIMENSION = 4
EXIT_USAGE = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _p(text: str):
    try:
        return as_schatten(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _cmd_dist(args) -> int:
    a, b = posdef(load_matrix(args.a)), posdef(load_matrix(args.b))
    print(_fmt(distance(a, b, args.p)))
    return EXIT_OK


def _cmd_geodesic(args) -> int:
    geo = Geodesic(load_matrix(args.a), load_matrix(args.b))
    if args.samples is None:
        print(dumps_json(matrix_obj(geo(args.t))))
        return EXIT_OK
    if args.samples < 2:
        raise UsageError("--samples needs at least 2 points")
    rows = []
    for t in np.linspace(0.0, 1.0, args.samples):
        x = geo(t)
        rows.append([float(t), distance(geo.a, x, args.p), distance(x, geo.b, args.p)])
    sys.stdout.write(csv_text(["t", "dist_from_a", "dist_to_b"], rows))
    return EXIT_OK


def _cmd_logmap(args) -> int:
    a, b = posdef(load_matrix(args.a)), posdef(load_matrix(args.b))
    print(dumps_json(matrix_obj(log_point(a, b).u)))
    return EXIT_OK


def _cmd_factorize(args) -> int:
    g = load_matrix(args.g, symmetrize=False)
    part = BlockPartition.diagonal(g.shape[0]) if args.partition is None else BlockPartition.parse(args.partition)
    trace = [] if args.trace else None
    f = cpr_factorize(g, part, args.p, trace=trace)
    out = f.to_dict()
    out["iterations"] = f.iterations
    print(dumps_json(out))
    if trace is not None:
        sys.stderr.write(csv_text(["iteration", "norm_v", "residual"], [list(map(float, r)) for r in trace]))
    return EXIT_OK


def _submanifold(text: str, n: int) -> ConvexSubmanifold:
    if text == "diag":
        return ConvexSubmanifold.diagonal(n)
    if text.startswith("blocks:"):
        part = BlockPartition.parse(text[len("blocks:"):])
        if part.n != n:
            raise DimensionMismatch(f"partition covers {part.n} indices, matrix is {n}x{n}")
        return ConvexSubmanifold.block_diagonal(part)
    raise UsageError(f"unknown submanifold {text!r} (use 'diag' or 'blocks:0,1|2,3')")


def _cmd_project(args) -> int:
    x = load_matrix(args.x)
    C = _submanifold(args.submanifold, x.shape[0])
    trace = [] if args.trace else None
    r = best_approximation(x, C, args.p, tol=args.tol, trace=trace)
    print(
        dumps_json(
            {
                "point": matrix_obj(r.point),
                "value": r.value,
                "iterations": r.iterations,
                "first_order_gap": r.first_order_gap,
            }
        )
    )
    if trace is not None:
        sys.stderr.write(csv_text(["iteration", "objective", "step"], [list(map(float, t)) for t in trace]))
    return EXIT_OK


def _cmd_circumcenter(args) -> int:
    S = [load_matrix(path) for path in args.points]
    n = S[0].shape[0]
    if any(s.shape != (n, n) for s in S):
        raise DimensionMismatch("all points must have the same dimension")
    trace = [] if args.trace else None
    r = circumcenter(S, args.p, tol=args.tol, trace=trace)
    print(dumps_json({"center": matrix_obj(r.center), "radius": r.radius, "iterations": r.iterations}))
    if trace is not None:
        sys.stderr.write(csv_text(["iteration", "objective", "step"], [list(map(float, t)) for t in trace]))
    return EXIT_OK


def _cmd_curvature(args) -> int:
    x = posdef(load_matrix(args.x))
    v, w = TangentAt(x, load_matrix(args.v)), TangentAt(x, load_matrix(args.w))
    lim = curvature_limit(x, v, w, args.p)
    print(
        dumps_json(
            {
                "estimate": curvature_estimate(x, v, w, args.r, args.p),
                "r": args.r,
                "limit": lim.s,
                "lower_bound": lim.lower_bound,
            }
        )
    )
    return EXIT_OK


def _cmd_verify(args) -> int:
    if not args.tol >= 0:
        raise UsageError(f"--tol must be nonnegative, got {args.tol}")
    if args.trials < 0:
        raise UsageError("--trials must be nonnegative")
    suites = SUITES if args.suite == "all" else tuple(s.strip() for s in args.suite.split(","))
    for s in suites:
        if s not in SUITES:
            raise UnknownSuite(s)
    cfg = SuiteConfig(
        seed=args.seed,
        n=args.n,
        trials=args.trials,
        p_values=tuple(args.p) if args.p else None,
        tol=args.tol,
        suites=suites,
        trace=args.trace,
    )
    report = run_suite(cfg)
    sys.stdout.write(report.to_csv() if args.format == "csv" else report.to_jsonl())
    if args.trace:
        sys.stderr.write(report.traces_csv())
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pcone", description="Finsler geometry of the positive-definite cone under Schatten-p norms.")
    ap.add_argument("--version", action="version", version=f"pcone {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def p_opt(parser, default="2"):
        parser.add_argument("--p", type=_p, default=_p(default), help="Schatten exponent (a real >= 1, or inf)")

    sp = sub.add_parser("dist", help="geodesic distance between two matrices")
    sp.add_argument("a")
    sp.add_argument("b")
    p_opt(sp)
    sp.set_defaults(func=_cmd_dist)

    sp = sub.add_parser("geodesic", help="point on the geodesic, or CSV samples along it")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--t", type=float, default=0.5)
    sp.add_argument("--samples", type=int)
    p_opt(sp)
    sp.set_defaults(func=_cmd_geodesic)

    sp = sub.add_parser("logmap", help="tangent vector at A pointing to B")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=_cmd_logmap)

    sp = sub.add_parser("factorize", help="g = g_A exp(v) u relative to a block partition")
    sp.add_argument("g")
    sp.add_argument("--partition", help="blocks as '0,1|2,3' (default: diagonal)")
    sp.add_argument("--trace", action="store_true")
    p_opt(sp)
    sp.set_defaults(func=_cmd_factorize)

    sp = sub.add_parser("project", help="best approximation onto a block-diagonal cone")
    sp.add_argument("x")
    sp.add_argument("--submanifold", default="diag")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--trace", action="store_true")
    p_opt(sp)
    sp.set_defaults(func=_cmd_project)

    sp = sub.add_parser("circumcenter", help="center of the smallest enclosing ball")
    sp.add_argument("points", nargs="+")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--trace", action="store_true")
    p_opt(sp)
    sp.set_defaults(func=_cmd_circumcenter)

    sp = sub.add_parser("curvature", help="curvature quotient and its extrapolated limit")
    sp.add_argument("x")
    sp.add_argument("v")
    sp.add_argument("w")
    sp.add_argument("--r", type=float, default=0.1)
    p_opt(sp)
    sp.set_defaults(func=_cmd_curvature)

    sp = sub.add_parser("verify", help="run randomized verification suites")
    sp.add_argument("--suite", default="all", help="'all' or a comma-separated list of: " + ", ".join(SUITES))
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--p", type=_p, action="append", help="restrict to these exponents (repeatable)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--trace", action="store_true", help="solver traces as CSV on standard error")
    sp.set_defaults(func=_cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"pcone: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"pcone: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (MalformedMatrix, json.JSONDecodeError) as exc:
        print(f"pcone: malformed matrix file: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except DimensionMismatch as exc:
        print(f"pcone: dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except UnknownSuite as exc:
        print(f"pcone: usage error: unknown suite {exc.args[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    except (PconeError, ValueError) as exc:
        print(f"pcone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
