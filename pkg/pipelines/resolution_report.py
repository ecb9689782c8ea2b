#!/usr/bin/env python3
"""Reporting pipeline whose input feed silently changed resolution.

Monthly-resolution runs produce sound numbers; weekly ones come out garbage,
and one weekly configuration (90-day window over the sensor feed) crashes the
aggregation outright, exiting nonzero with nothing on stdout.
"""
import json
import sys

PROPERTIES = {"Resolution", "Window", "Source"}
CRASH = ("weekly", 90.0, "sensors")

MONTHLY = {
    (30.0, "sales"): 0.91,
    (30.0, "sensors"): 0.88,
    (90.0, "sales"): 0.86,
    (90.0, "sensors"): 0.84,
}
WEEKLY = {
    (30.0, "sales"): 0.22,
    (30.0, "sensors"): 0.18,
    (90.0, "sales"): 0.25,
    (90.0, "sensors"): 0.11,  # unreachable: this configuration crashes
}


def main() -> int:
    config = json.load(sys.stdin)
    if set(config) != PROPERTIES:
        print(f"unknown or missing properties: {sorted(set(config) ^ PROPERTIES)}",
              file=sys.stderr)
        return 64
    key = (config["Resolution"], float(config["Window"]), config["Source"])
    if key == CRASH:
        print("aggregation error: weekly sensor windows overflow", file=sys.stderr)
        return 1
    table = MONTHLY if config["Resolution"] == "monthly" else WEEKLY
    try:
        score = table[(float(config["Window"]), config["Source"])]
    except KeyError:
        print(f"no such configuration: {key}", file=sys.stderr)
        return 64
    print(json.dumps({"score": score}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
