"""Command-line entry point: ``ciext <command> --fixture f1 ...``."""
from __future__ import annotations

import argparse
import logging
import sys

from .field_poly import PolynomialSyntaxError
from .harness import (COMMANDS, FixtureError, emit_reports, load_fixture, overall_exit,
                      run_experiment, shipped_fixtures)

EXIT_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ciext",
        description="Ext over complete intersections: operators, asymptotic primes, complexity.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--fixture", action="append", default=[],
                        help="fixture path or shipped name (repeatable; verify defaults to all)")
    parser.add_argument("--imax", type=int)
    parser.add_argument("--nmax", type=int)
    parser.add_argument("--jmax", type=int)
    parser.add_argument("--format", choices=("csv", "json", "markdown"), default="json")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized property checks")
    parser.add_argument("-o", "--output", help="write the report here instead of stdout")
    parser.add_argument("-v", "--verbose", action="store_true", help="log timings to stderr")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    names = args.fixture
    if not names:
        if args.command != "verify":
            print("error: --fixture is required for this command", file=sys.stderr)
            return EXIT_INPUT
        names = shipped_fixtures()
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_INPUT
    overrides = {"imax": args.imax, "nmax": args.nmax, "jmax": args.jmax}
    try:
        fixtures = [load_fixture(n, overrides) for n in names]
    except (FixtureError, PolynomialSyntaxError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    reports = [run_experiment(fx, args.command, args.threads, args.seed) for fx in fixtures]
    payload = emit_reports(reports, args.format)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    for r in reports:
        for c in r.checks:
            if c.status != "pass":
                print(f"{r.fixture}: {c.name} {c.status} {c.detail}".rstrip(), file=sys.stderr)
    return overall_exit(reports)


if __name__ == "__main__":
    sys.exit(main())
