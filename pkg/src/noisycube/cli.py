"""Command-line front end.

Every subcommand runs a verification suite and emits a machine-readable
report (JSON, or CSV for tables). Exit codes: 0 all checks passed, 1 a
check failed (the first failure is named on stderr), 2 usage error, 3
enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from .bms import load_channel
from .core import BudgetExceededError
from .subsets import DEFAULT_ALPHA_GRID
from . import suites

SCHEMA_VERSION = 1

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(ValueError):
    pass


def _parse_alpha_grid(text: str) -> list[float]:
    if text == "default":
        return list(DEFAULT_ALPHA_GRID)
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad alpha grid {text!r}: {exc}") from exc
    if not values:
        raise UsageError("empty alpha grid")
    for a in values:
        if not 0.0 <= a <= 0.5:
            raise UsageError(f"alpha {a} out of [0, 1/2]")
    return values


def _parse_size_range(text: str, upper: int) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            sizes = list(range(int(lo), int(hi) + 1))
        else:
            sizes = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad size range {text!r}: {exc}") from exc
    if not sizes or any(not 1 <= m <= upper for m in sizes):
        raise UsageError(f"sizes must lie in [1, {upper}]: {text!r}")
    return sizes


def _parse_vertex_list(text: str, n: int) -> list[int]:
    try:
        members = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad vertex list {text!r}: {exc}") from exc
    if not members or any(not 0 <= v < 2**n for v in members):
        raise UsageError(f"vertices must lie in [0, 2^{n}): {text!r}")
    return members


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisycube",
        description=(
            "Numerical certification of quantizer mutual-information caps and "
            "minimum noisy-subset entropies on the Boolean hypercube."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument(
        "--format", choices=("json", "csv"), default=None, help="report format"
    )
    common.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit timestamp and zero runtimes so identical runs are byte-identical",
    )
    common.add_argument("--workers", type=int, default=1, help="worker threads")
    common.add_argument("--max-subsets", type=int, default=None)
    common.add_argument("--max-monotone", type=int, default=None)
    common.add_argument("--max-partitions", type=int, default=None)
    common.add_argument("--max-channel-states", type=int, default=None)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "verify-theorem",
        parents=[common],
        help="exhaustively certify the (n-1)(1-h(alpha)) cap over all partitions",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, action="append", default=None)
    p.add_argument("--alpha-grid", default=None)
    p.add_argument("--M", dest="num_cells", type=int, default=None)

    p = sub.add_parser(
        "hmn-table",
        parents=[common],
        help="tabulate minimum noisy-subset entropies (searches and closed forms)",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", default=None, help="sizes, e.g. 1..8 or 1,2,4")
    p.add_argument("--alpha-grid", default="default")
    p.add_argument("--no-bruteforce", action="store_true")

    p = sub.add_parser(
        "shift",
        parents=[common],
        help="compress a set to its downward closure, tracing every step",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--set", dest="vertex_set", default=None, help="comma-separated vertices")
    p.add_argument("--random-size", type=int, default=None)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser(
        "search",
        parents=[common],
        help="seeded random quantizer search against the cap",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--M", dest="num_cells", type=int, default=None)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser(
        "check-lemmas",
        parents=[common],
        help="run every inequality certificate at one dimension",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha-grid", default="default")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--perturb-hm",
        type=int,
        default=None,
        help="fault-injection hook: add 1e-3 to the size-m minimum entropies",
    )

    p = sub.add_parser(
        "bms-verify",
        parents=[common],
        help="certify the mixture-channel cap and matched-channel ordering",
    )
    p.add_argument("--channel", required=True, help="channel spec JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-cell", action="store_true")

    return parser


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"command", "output", "format", "no_timestamp"}
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in skip and value is not None
    }


def _render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _render_csv(report: dict) -> str:
    rows = report.get("rows")
    if rows is None:
        raise UsageError("csv output is only available for tabular reports")
    buffer = io.StringIO()
    buffer.write(f"# noisycube {report['command']} csv schema v{SCHEMA_VERSION}\n")
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def _dispatch(args: argparse.Namespace) -> dict:
    if args.command == "verify-theorem":
        if args.alpha and args.alpha_grid:
            raise UsageError("pass either --alpha or --alpha-grid, not both")
        alphas = (
            args.alpha
            if args.alpha
            else _parse_alpha_grid(args.alpha_grid or "default")
        )
        for a in alphas:
            if not 0.0 <= a <= 0.5:
                raise UsageError(f"alpha {a} out of [0, 1/2]")
        return suites.theorem_suite(
            args.n,
            alphas,
            args.num_cells,
            max_partitions=args.max_partitions,
            workers=args.workers,
            timing=not args.no_timestamp,
        )
    if args.command == "hmn-table":
        sizes = _parse_size_range(args.m or f"1..{2**args.n}", 2**args.n)
        alphas = _parse_alpha_grid(args.alpha_grid)
        return suites.hmn_table(
            args.n,
            sizes,
            alphas,
            include_bruteforce=not args.no_bruteforce,
            max_subsets=args.max_subsets,
            max_monotone=args.max_monotone,
        )
    if args.command == "shift":
        if (args.vertex_set is None) == (args.random_size is None):
            raise UsageError("pass exactly one of --set or --random-size")
        if args.vertex_set is not None:
            members = _parse_vertex_list(args.vertex_set, args.n)
        else:
            import numpy as np

            if not 1 <= args.random_size <= 2**args.n:
                raise UsageError(f"--random-size must lie in [1, 2^{args.n}]")
            rng = np.random.default_rng(args.seed)
            members = [
                int(v) for v in rng.choice(2**args.n, size=args.random_size, replace=False)
            ]
        return suites.shift_suite(args.n, members, args.alpha)
    if args.command == "search":
        num_cells = args.num_cells if args.num_cells else 2 ** (args.n - 1)
        return suites.search_suite(args.n, args.alpha, num_cells, args.samples, args.seed)
    if args.command == "check-lemmas":
        alphas = _parse_alpha_grid(args.alpha_grid)
        return suites.lemma_suite(
            args.n,
            alphas,
            seed=args.seed,
            samples=args.samples,
            perturb_hm=args.perturb_hm,
            max_subsets=args.max_subsets,
            max_monotone=args.max_monotone,
        )
    if args.command == "bms-verify":
        channel = load_channel(args.channel)
        return suites.bms_suite(
            channel,
            args.n,
            args.samples,
            args.seed,
            per_cell=args.per_cell,
            max_states=args.max_channel_states,
        )
    raise UsageError(f"unknown command {args.command!r}")


def run(args: argparse.Namespace) -> int:
    for name in ("max_subsets", "max_monotone", "max_partitions", "max_channel_states"):
        value = getattr(args, name, None)
        if value is not None and value <= 0:
            print(f"usage error: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    started = time.perf_counter()
    try:
        report = _dispatch(args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report["schema_version"] = SCHEMA_VERSION
    report["command"] = args.command
    report["config"] = _config_dict(args)
    report["runtime_ms"] = (
        0.0 if args.no_timestamp else (time.perf_counter() - started) * 1000.0
    )
    if not args.no_timestamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")

    fmt = args.format or ("csv" if args.command == "hmn-table" else "json")
    try:
        text = _render_csv(report) if fmt == "csv" else _render_json(report)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)

    if not report["passed"]:
        failing = next(c["name"] for c in report["checks"] if not c["passed"])
        print(f"FAILED: {failing}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
