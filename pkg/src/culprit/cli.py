"""Command-line entry point: debug, replay, bench, metrics, simplify."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import bench as bench_mod
from .debugger import (
    Budget,
    DebugOptions,
    EXIT_CODES,
    MAX_RUNS_UNLIMITED,
    Mode,
    debug,
)
from .executor import Direction, EvaluationSpec, ExecutorConfig, SubprocessRunner
from .model import Explanation, Universe
from .provenance import EmptyStoreError, ProvenanceStore, read_log
from .simplify import simplify
from .tree import fit, to_dict as tree_to_dict

EX_DATAERR = 64

CHILD_PROTOCOL = """\
Child process protocol (bit-exact):
  stdin:  one JSON object {"<property>": <value>, ...} then end-of-stream
  stdout: one JSON object containing the metric key (e.g. {"score": 0.87})
  exit 0 for a completed evaluation regardless of score; any nonzero exit,
  unparseable output, or timeout is recorded as a failing observation.
Environment: only PATH/HOME/TMPDIR/LANG/LC_ALL plus --env-passthrough names
are forwarded to the child.
"""


class _CliError(Exception):
    def __init__(self, message: str, code: int = EX_DATAERR):
        super().__init__(message)
        self.code = code


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise _CliError(f"{path}: file not found")
    except json.JSONDecodeError as exc:
        raise _CliError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}")


def _load_universe(path: Optional[str]) -> Optional[Universe]:
    if path is None:
        return None
    data = _load_json(path)
    try:
        return Universe.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise _CliError(f"{path}: bad universe file: {exc}")


def _load_store(path: Optional[str], universe: Optional[Universe]) -> ProvenanceStore:
    if path is None:
        return ProvenanceStore()
    import os

    if not os.path.exists(path):
        return ProvenanceStore()
    try:
        return read_log(path, universe)
    except ValueError as exc:
        raise _CliError(str(exc))


class _TripwireExecutor:
    """Executor stand-in for replay: any attempt to run is a bug."""

    def run_batch(self, configs, budget, origin=None):
        raise AssertionError("replay must never execute pipeline instances")


def _merge_universe(store: ProvenanceStore, declared: Optional[Universe]) -> tuple[Universe, list[str]]:
    notes = []
    if declared is not None and store.count:
        novel = store.novel_values(declared)
        if novel:
            notes.append(
                "universe_extended: provenance introduced values outside the "
                "declared universe: " + json.dumps(novel, sort_keys=True, default=str)
            )
    try:
        universe = store.observed_universe(declared)
    except EmptyStoreError:
        raise _CliError("no universe: supply --universe or a nonempty provenance log")
    return universe, notes


def _cmd_debug(args) -> int:
    declared = _load_universe(args.universe)
    store = _load_store(args.provenance, declared)
    if args.provenance:
        store.attach_log(args.provenance)  # new runs extend the same log
    universe, notes = _merge_universe(store, declared)
    eval_spec = EvaluationSpec(args.metric, args.threshold, Direction(args.direction))
    exec_cfg = ExecutorConfig(
        command=args.cmd,
        timeout=args.timeout,
        workers=args.workers,
        env_passthrough=tuple(args.env_passthrough or ()),
    )
    executor = SubprocessRunner(exec_cfg, eval_spec)
    budget = Budget(args.budget if args.budget is not None else MAX_RUNS_UNLIMITED)
    options = DebugOptions(
        probe_batch=args.probe_batch or args.workers,
        exhaustive_cap=args.exhaustive_cap,
        initial_design_size=args.initial_design,
    )
    report = debug(
        store, executor, universe, Mode(args.mode), budget, args.seed, options, notes
    )
    _write_report(report, args.out)
    if args.dump_tree:
        view = store.view()
        with open(args.dump_tree, "w", encoding="utf-8") as fh:
            json.dump(tree_to_dict(fit(view, universe)), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_CODES[report.status]


def _cmd_replay(args) -> int:
    declared = _load_universe(args.universe)
    store = _load_store(args.provenance, declared)
    if not store.count:
        raise _CliError(f"{args.provenance}: empty or missing provenance log")
    universe, notes = _merge_universe(store, declared)
    report = debug(
        store,
        _TripwireExecutor(),
        universe,
        Mode(args.mode),
        Budget(0),
        args.seed,
        DebugOptions(),
        notes,
    )
    _write_report(report, args.out)
    return EXIT_CODES[report.status]


def _cmd_bench(args) -> int:
    suite = bench_mod.BenchmarkSuite.from_dict(_load_json(args.suite))
    budgets = [int(b) for b in args.budgets.split(",") if b]
    rows = bench_mod.budget_sweep(suite, budgets, Mode(args.mode), args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            bench_mod.write_csv(rows, fh)
    else:
        bench_mod.write_csv(rows, sys.stdout)
    return 0


def _cmd_metrics(args) -> int:
    suite = bench_mod.BenchmarkSuite.from_dict(_load_json(args.suite))
    raw = _load_json(args.answers)
    answers = {name: Explanation.from_list(expl) for name, expl in raw.items()}
    p = bench_mod.precision(suite, answers)
    r = (
        bench_mod.recall_findone(suite, answers)
        if Mode(args.mode) is Mode.FIND_ONE
        else bench_mod.recall_findall(suite, answers)
    )
    print(
        json.dumps(
            {"precision": p, "recall": r, "f": bench_mod.f_measure(p, r)},
            sort_keys=True,
        )
    )
    return 0


def _cmd_simplify(args) -> int:
    universe = _load_universe(args.universe)
    data = _load_json(args.input)
    try:
        expl = Explanation.from_list(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise _CliError(f"{args.input}: bad explanation file: {exc}")
    result = simplify(expl, universe)
    text = json.dumps(result.to_list(), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _write_report(report, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    else:
        sys.stdout.write(report.to_json())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="culprit",
        description="Iterative root-cause debugger for configurable pipelines.",
        epilog=CHILD_PROTOCOL,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "debug",
        help="search for minimal definitive root causes by running new configurations",
        epilog=CHILD_PROTOCOL,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--universe", help="universe JSON file")
    p.add_argument("--provenance", help="JSONL log of past runs; new runs are appended")
    p.add_argument("--cmd", required=True, help="pipeline command (config arrives on stdin)")
    p.add_argument("--metric", default="score", help="key of the score in child output")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--direction", choices=["ge", "le"], default="ge")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="find-one")
    p.add_argument("--budget", type=int, default=None, help="max runs (default unlimited)")
    p.add_argument("--workers", type=int, default=5)
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probe-batch", type=int, default=None)
    p.add_argument("--exhaustive-cap", type=int, default=256)
    p.add_argument("--initial-design", type=int, default=16)
    p.add_argument("--env-passthrough", nargs="*", default=[])
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.add_argument("--dump-tree", help="dump the final decision tree as JSON")
    p.set_defaults(func=_cmd_debug)

    p = sub.add_parser("replay", help="derive explanations from a log, executing nothing")
    p.add_argument("--provenance", required=True)
    p.add_argument("--universe")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="find-all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("bench", help="run budget sweeps over a planted suite")
    p.add_argument("--suite", required=True, help="suite JSON (universe + truth DNF + noise)")
    p.add_argument("--budgets", required=True, help="comma-separated budgets")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="find-all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="results CSV path (default stdout)")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("metrics", help="score an answers file against a suite's oracle")
    p.add_argument("--suite", required=True)
    p.add_argument("--answers", required=True, help="JSON map: pipeline name -> explanation")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="find-one")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("simplify", help="minimize an explanation over a universe")
    p.add_argument("--in", dest="input", required=True, help="explanation JSON file")
    p.add_argument("--universe", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simplify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"culprit: {exc}", file=sys.stderr)
        return exc.code
    except FileNotFoundError as exc:
        print(f"culprit: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
