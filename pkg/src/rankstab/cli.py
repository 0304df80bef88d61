"""Command-line interface: ``rankstab compute|dist|landscape|verify|ball``.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 input invariant violated, 4 unsupported combination of inputs.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Sequence

from ._validation import InvariantError, ParseError, RankstabError, UnsupportedError, format_real
from .diagram import read_diagram, write_diagram
from .filtration import compute_diagrams, read_complex, read_weights, verify_barcode_stability, verify_wp_stability
from .geometry import MetricKind, ball_boundary
from .graded import verify_graded_stability
from .harness import SUITES, run_suite
from .landscape import format_landscape, l1_distance, landscape_of, verify_landscape_stability
from .report import Report
from .transport import wasserstein, wasserstein_signed

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVARIANT, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4

EXPECTED_LABEL = "expected: horizon below 2b-a"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _order(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not p >= 1:
        raise argparse.ArgumentTypeError(f"order must be >= 1, got {text!r}")
    return p


def _metric(args) -> MetricKind:
    return MetricKind.parse(args.metric, args.metric_p)


# -- subcommands -------------------------------------------------------------------


def cmd_compute(args, out) -> int:
    K = read_complex(args.complex)
    w = K.weight
    if args.weights is not None:
        w = K.check_weight(read_weights(args.weights))
    dgms = compute_diagrams(K, w, args.horizon)
    degrees = [args.degree] if args.degree is not None else list(range(K.max_dim + 1))
    os.makedirs(args.output, exist_ok=True)
    stem = args.stem or os.path.splitext(os.path.basename(args.complex))[0]
    for i in degrees:
        path = os.path.join(args.output, f"{stem}.H{i}.dgm")
        write_diagram(dgms[i], path)
        print(path, file=out)
    return EXIT_OK


def cmd_dist(args, out) -> int:
    a, b = read_diagram(args.a), read_diagram(args.b)
    m = _metric(args)
    p = args.wasserstein_p
    signed = not (a.is_ordinary() and b.is_ordinary())
    if signed:
        if p != 1:
            raise UnsupportedError("signed diagrams are only supported with --wasserstein-p 1")
        if args.coupling:
            raise UnsupportedError("--coupling is not available for signed diagrams")
        print(f"{wasserstein_signed(a, b, m):.12g}", file=out)
        return EXIT_OK
    res = wasserstein(a, b, m, p)
    print(f"{res.distance:.12g}", file=out)
    if args.coupling:
        text = res.optimal_coupling.format()
        if text:
            out.write(text + "\n")
    return EXIT_OK


def cmd_landscape(args, out) -> int:
    lam = landscape_of(read_diagram(args.a))
    if args.dist is not None:
        print(f"{l1_distance(lam, landscape_of(read_diagram(args.dist))):.12g}", file=out)
        return EXIT_OK
    text = format_landscape(lam)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _fixture_reports(args) -> list[Report]:
    fx = args.fixtures
    if args.suite in ("barcode", "wp"):
        if len(fx) != 2:
            raise _UsageError(f"suite {args.suite} takes fixtures: complex_file weight_file")
        K = read_complex(fx[0])
        v = K.check_weight(read_weights(fx[1]))
        if args.suite == "wp":
            return verify_wp_stability(K, K.weight, v, args.p, args.horizon)
        reports = verify_barcode_stability(K, K.weight, v, args.horizon)
        if args.horizon is not None and args.horizon < K.horizon:
            reports = [r if r.passed else Report(r.name, r.lhs, r.rhs, r.slack, r.passed, f"{r.details} {EXPECTED_LABEL}".strip())
                       for r in reports]
        return reports
    if args.suite in ("landscape", "graded"):
        if len(fx) != 2:
            raise _UsageError(f"suite {args.suite} takes fixtures: a.dgm b.dgm")
        a, b = read_diagram(fx[0]), read_diagram(fx[1])
        if args.suite == "landscape":
            return [verify_landscape_stability(a, b)]
        return verify_graded_stability(a, b, MetricKind.rank()) + verify_graded_stability(a, b, MetricKind.dim())
    raise _UsageError(f"suite {args.suite} does not take fixtures")


def cmd_verify(args, out) -> int:
    if args.suite not in SUITES:
        raise _UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
    if args.trials < 0:
        raise _UsageError("--trials must be nonnegative")
    reports = _fixture_reports(args) if args.fixtures else run_suite(args.suite, args.seed, args.trials)
    ok = True
    for r in reports:
        ok &= r.passed
        print(r.format(), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_ball(args, out) -> int:
    if not args.radius > 0:
        raise UnsupportedError(f"radius must be positive, got {format_real(args.radius)}")
    P = ball_boundary(tuple(args.center), args.radius, _metric(args), args.samples)
    out.write("y1,y2\n")
    for y1, y2 in P:
        out.write(f"{format_real(y1)},{format_real(y2)}\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def _add_metric(p: argparse.ArgumentParser):
    p.add_argument("--metric", default="rank", choices=["rank", "dim", "linf", "lp"], help="ground metric (default rank)")
    p.add_argument("--metric-p", type=_order, default=None, help="exponent for rank and lp metrics")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankstab", description="Rank-metric persistence diagrams: distances, landscapes and stability checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="persistence diagrams of a weighted complex")
    p.add_argument("complex")
    p.add_argument("weights", nargs="?", help="optional weight file replacing the weights in the complex file")
    p.add_argument("--degree", type=int)
    p.add_argument("--horizon", type=float, help="death value for essential classes (default 2b-a)")
    p.add_argument("-o", "--output", default=".", help="output directory")
    p.add_argument("--stem", help="output file stem (default: complex file name)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("dist", help="Wasserstein distance between two diagram files")
    p.add_argument("a")
    p.add_argument("b")
    _add_metric(p)
    p.add_argument("--wasserstein-p", type=_order, default=1.0, help="Wasserstein order, 'inf' allowed")
    p.add_argument("--coupling", action="store_true", help="also print an optimal coupling")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("landscape", help="landscape breakpoints or L1 distance")
    p.add_argument("a")
    p.add_argument("--dist", metavar="B", help="print the L1 distance to the landscape of B")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("verify", help="run a stability verification suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--horizon", type=float)
    p.add_argument("--p", type=float, default=2.0, help="order for the wp suite with fixtures")
    p.add_argument("fixtures", nargs="*")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ball", help="CSV boundary of a metric ball")
    p.add_argument("--center", nargs=2, type=float, required=True, metavar=("B", "D"))
    p.add_argument("--radius", type=float, required=True)
    _add_metric(p)
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_ball)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except _UsageError as exc:
        print(f"rankstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"rankstab: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"rankstab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except UnsupportedError as exc:
        print(f"rankstab: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except RankstabError as exc:
        print(f"rankstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
