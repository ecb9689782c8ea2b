#!/usr/bin/env python3
"""Generate a randomly planted benchmark suite as JSON.

Example:
    python scripts/make_suite.py --pipelines 50 --seed 7 --out suite.json
"""
import argparse
import json
import sys

from culprit.bench import random_suite


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pipelines", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-product", type=int, default=2000)
    parser.add_argument("--out", help="output path (default stdout)")
    args = parser.parse_args()
    suite = random_suite(args.pipelines, args.seed, args.max_product)
    text = json.dumps(suite.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
