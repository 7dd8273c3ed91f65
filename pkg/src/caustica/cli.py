"""Command-line entry point: ``caustica run|list-cases|print-integral``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .billiards import EXOTIC_CASES
from .errors import ConfigParse, GeometryError, InvalidCase
from .integrals import canonical_integral
from .scenario import parse_scenario, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

FIELD_FORMULAS = {
    "2a1": "(rho, 2(rho-2)x1), rho = 2 - 2/(2N+1)",
    "2a2": "(rho, 2(rho-2)x1), rho = 2 - 1/(N+1)",
    "2b1": "(5x1+3, 2(x2-x1))",
    "2b2": "(3x1, 2x2-4)",
    "2c1": "(x2, x1x2-1)",
    "2c2": "(2x1+1, x2-x1)",
    "2d": "(7x1+4, 2x2-4x1)",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="caustica", description="Billiard, dual billiard and caustic experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenario config files")
    run.add_argument("configs", nargs="+", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--samples", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--out-dir", type=Path,
                     help="output directory (default: $CAUSTICA_OUT_DIR or the current directory)")

    sub.add_parser("list-cases", help="list the exotic parabola fields")

    pi = sub.add_parser("print-integral", help="print the canonical integral of an exotic case")
    pi.add_argument("case", choices=EXOTIC_CASES)
    pi.add_argument("--N", type=int, default=None)
    return p


def _run(args) -> int:
    out_dir = args.out_dir or Path(os.environ.get("CAUSTICA_OUT_DIR", "."))
    overrides = {"seed": args.seed, "samples": args.samples, "tol": args.tol}
    status = EXIT_PASS
    for config in args.configs:
        try:
            scen = parse_scenario(config, overrides)
            report = run_scenario(scen, out_dir)
        except ConfigParse as exc:
            print(f"{config}: config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except GeometryError as exc:
            print(f"{config}: {type(exc).__name__}: {exc}", file=sys.stderr)
            status = EXIT_FAIL
            continue
        verdict = "PASS" if report.passed else "FAIL"
        print(f"{scen.name}: {verdict} max={report.max:.3e} mean={report.mean:.3e} rows={len(report.rows)}")
        if not report.passed:
            status = EXIT_FAIL
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    if args.command == "list-cases":
        for case in EXOTIC_CASES:
            print(f"{case:4s} {FIELD_FORMULAS[case]}")
        return EXIT_PASS
    try:
        R = canonical_integral(args.case, args.N)
    except InvalidCase as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(R.to_string())
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
