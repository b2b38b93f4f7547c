"""Command line entry point.

    rhg suite <name> [--config file.json] [--n N] [--m M] [--grid N]
                     [--extent L] [--torus N] [--kmax K] [--tol X]
                     [--seed S] [--out PATH] [--format json|csv]

Runs the named verification suite and prints one line per check; the exit
code is 0 exactly when every check passes.  --tol overrides the suite's
tolerance; --out writes a canonical (byte-stable) report.
"""

from __future__ import annotations

import argparse
import sys

from .errors import RhgError
from .suites import SUITE_NAMES, Report, SuiteConfig, emit_report, run_suite


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rhg", description="verification suites for harmonic analysis on R^n x R^n x T^m")
    sub = parser.add_subparsers(dest="command", required=True)
    ps = sub.add_parser("suite", help="run a named verification suite")
    ps.add_argument("name", choices=list(SUITE_NAMES) + ["all"])
    ps.add_argument("--config", help="JSON configuration file")
    ps.add_argument("--n", type=int)
    ps.add_argument("--m", type=int)
    ps.add_argument("--grid", type=int, dest="grid_n")
    ps.add_argument("--extent", type=float)
    ps.add_argument("--torus", type=int, dest="torus_n")
    ps.add_argument("--kmax", type=int)
    ps.add_argument("--tol", type=float, help="tolerance override for this suite")
    ps.add_argument("--seed", type=int)
    ps.add_argument("--out", help="report output path")
    ps.add_argument("--format", choices=["json", "csv"], default="json")
    return parser


def _config_from_args(args, suite_name: str) -> SuiteConfig:
    base = SuiteConfig.from_json(args.config).as_dict() if args.config else SuiteConfig().as_dict()
    for key in ("n", "m", "grid_n", "extent", "torus_n", "kmax", "seed"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if args.tol is not None:
        tols = dict(base.get("tolerances", {}))
        tols[suite_name] = args.tol
        base["tolerances"] = tols
    return SuiteConfig(**base)


def print_report(report: Report) -> None:
    print(f"suite {report.suite}: {report.identity}")
    for r in report.records:
        mark = "PASS" if r.passed else "FAIL"
        print(f"  [{mark}] {r.name}: rel_err = {r.rel_err:.3e} (tol {r.tolerance:.1e})")
    status = "PASS" if report.passed else "FAIL"
    print(f"  => {status} in {report.wall_time_s:.2f} s")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    names = list(SUITE_NAMES) if args.name == "all" else [args.name]
    ok = True
    try:
        for name in names:
            config = _config_from_args(args, name)
            report = run_suite(name, config)
            print_report(report)
            ok = ok and report.passed
            if args.out:
                path = args.out if len(names) == 1 else f"{args.out}.{name}"
                emit_report(report, path, fmt=args.format)
    except RhgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
