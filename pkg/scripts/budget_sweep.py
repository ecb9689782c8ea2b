#!/usr/bin/env python3
"""Sweep the debugger over a planted suite at several budgets and plot-ready CSV.

Example:
    python scripts/make_suite.py --pipelines 50 --seed 7 --out suite.json
    python scripts/budget_sweep.py --suite suite.json --budgets 10,25,50,100 \\
        --mode find-all --out results.csv
"""
import argparse
import json
import sys

from culprit.bench import BenchmarkSuite, budget_sweep, write_csv
from culprit.debugger import DebugOptions, Mode


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--suite", required=True)
    parser.add_argument("--budgets", default="10,25,50,100")
    parser.add_argument("--mode", choices=[m.value for m in Mode], default="find-all")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--exhaustive-cap", type=int, default=10**9,
        help="filtered-product size above which confirmation samples instead of enumerating",
    )
    parser.add_argument("--out", help="CSV path (default stdout)")
    args = parser.parse_args()
    with open(args.suite, "r", encoding="utf-8") as fh:
        suite = BenchmarkSuite.from_dict(json.load(fh))
    budgets = [int(b) for b in args.budgets.split(",") if b]
    rows = budget_sweep(
        suite, budgets, Mode(args.mode), args.seed,
        DebugOptions(exhaustive_cap=args.exhaustive_cap),
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
