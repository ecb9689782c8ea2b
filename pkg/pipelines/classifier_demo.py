#!/usr/bin/env python3
"""Classification demo pipeline with a planted library-version bug.

Reads a configuration JSON object on stdin and prints {"score": ...} on
stdout. Scores are fixture constants: every run on library version 2.0 lands
below the 0.6 acceptance bar, everything on 1.0 clears it.
"""
import json
import sys

PROPERTIES = {"Dataset", "Estimator", "Library Version"}

SCORES = {
    ("Iris", "Logistic Regression", 1.0): 0.9,
    ("Digits", "Decision Tree", 1.0): 0.8,
    ("Iris", "Gradient Boosting", 2.0): 0.2,
    ("Digits", "Gradient Boosting", 2.0): 0.2,
    ("Digits", "Gradient Boosting", 1.0): 0.7,
    ("Digits", "Logistic Regression", 2.0): 0.3,
    ("Iris", "Decision Tree", 2.0): 0.1,
    ("Iris", "Decision Tree", 1.0): 0.85,
    ("Digits", "Logistic Regression", 1.0): 0.75,
    ("Iris", "Gradient Boosting", 1.0): 0.7,
    ("Iris", "Logistic Regression", 2.0): 0.25,
    ("Digits", "Decision Tree", 2.0): 0.15,
}


def main() -> int:
    config = json.load(sys.stdin)
    if set(config) != PROPERTIES:
        print(f"unknown or missing properties: {sorted(set(config) ^ PROPERTIES)}",
              file=sys.stderr)
        return 64
    key = (config["Dataset"], config["Estimator"], float(config["Library Version"]))
    if key not in SCORES:
        print(f"no such configuration: {key}", file=sys.stderr)
        return 64
    print(json.dumps({"score": SCORES[key]}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
