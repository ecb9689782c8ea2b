"""Synthetic benchmark harness: planted failure regions, a brute-force oracle
for ground-truth minimal causes, and quality metrics under budget sweeps.

The oracle enumerates every conjunction (one predicate per property, up to
four predicates) against the fully labeled configuration space as bitmasks,
keeps the definitive ones with no definitive proper subset, and collapses
value-set-equivalent forms. It shares no code path with the debugger's search,
so it serves as the independent check for end-to-end soundness.
"""
from __future__ import annotations

import csv
import random
import warnings
from dataclasses import dataclass
from typing import IO, Mapping, Sequence

from .debugger import DebugOptions, DebugReport, Mode, debug
from .executor import Budget
from .model import (
    Comparator,
    Configuration,
    Conjunction,
    Explanation,
    Instance,
    Kind,
    Origin,
    Outcome,
    Predicate,
    Property,
    Universe,
    satisfies_conj,
)
from .provenance import ProvenanceStore

ORACLE_PRODUCT_LIMIT = 10**6
ORACLE_MAX_LEN = 4


@dataclass(frozen=True)
class PlantedPipeline:
    """A pipeline whose failure region is a known DNF over its universe."""

    name: str
    universe: Universe
    truth: Explanation
    noise: float = 0.0

    def fails(self, config: Configuration) -> bool:
        return any(satisfies_conj(config, c, self.universe) for c in self.truth)

    def outcome_for(self, config: Configuration) -> Outcome:
        failing = self.fails(config)
        if self.noise > 0:
            import json as _json

            key = f"noise:{self.name}:{_json.dumps(config.as_dict(), sort_keys=True)}"
            if random.Random(key).random() < self.noise:
                failing = not failing
        return Outcome.FAIL if failing else Outcome.SUCCEED

    def score_for(self, config: Configuration) -> float:
        return 0.25 if self.outcome_for(config) is Outcome.FAIL else 0.75

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "universe": self.universe.to_dict(),
            "truth": self.truth.to_list(),
            "noise": self.noise,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PlantedPipeline":
        return cls(
            name=data["name"],
            universe=Universe.from_dict(data["universe"]),
            truth=Explanation.from_list(data["truth"]),
            noise=float(data.get("noise", 0.0)),
        )


@dataclass(frozen=True)
class BenchmarkSuite:
    pipelines: tuple[PlantedPipeline, ...]

    def __post_init__(self):
        if not self.pipelines:
            raise ValueError("a benchmark suite needs at least one pipeline")

    def to_dict(self) -> dict:
        return {"pipelines": [p.to_dict() for p in self.pipelines]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "BenchmarkSuite":
        return cls(tuple(PlantedPipeline.from_dict(p) for p in data["pipelines"]))


class PlantedExecutor:
    """In-process stand-in for the subprocess pool; scores come from the plant."""

    def __init__(self, pipeline: PlantedPipeline):
        self.pipeline = pipeline
        self._seq = 0

    def run_batch(
        self,
        configs: Sequence[Configuration],
        budget: Budget,
        origin: Origin = Origin.PROBE,
    ) -> list[Instance]:
        budget.spend(len(configs))
        out = []
        for config in configs:
            self._seq += 1
            score = self.pipeline.score_for(config)
            out.append(
                Instance(
                    config,
                    score,
                    self.pipeline.outcome_for(config),
                    f"run-{self._seq:05d}",
                    origin,
                )
            )
        return out


# -- oracle -------------------------------------------------------------------


def oracle_minimal_causes(
    pipeline: PlantedPipeline, max_len: int = ORACLE_MAX_LEN
) -> Explanation:
    """All minimal definitive root causes, by exhaustive enumeration.

    Definitive: no succeeding satisfier anywhere in the universe and at least
    one failing one. Minimal: no proper predicate subset is itself definitive
    (checking the one-smaller subsets suffices, since definitiveness is
    inherited upward while failing satisfiers remain). Equivalent value-set
    forms collapse to the canonically smallest representative.
    """
    universe = pipeline.universe
    size = universe.product_size()
    if size > ORACLE_PRODUCT_LIMIT:
        raise ValueError(
            f"universe has {size} configurations; the oracle needs a desk-scale "
            f"universe (<= {ORACLE_PRODUCT_LIMIT})"
        )
    configs = list(universe.all_configs())
    fail_bits = 0
    for idx, config in enumerate(configs):
        if pipeline.fails(config):
            fail_bits |= 1 << idx
    all_bits = (1 << len(configs)) - 1
    succeed_bits = all_bits & ~fail_bits
    if fail_bits == 0:
        return Explanation()
    if succeed_bits == 0:
        # everything fails: the vacuous conjunction is the one minimal cause
        return Explanation([Conjunction()])

    names = sorted(universe.property_names)
    preds: list[list[tuple[Predicate, int]]] = []
    for name in names:
        preds.append(_predicate_masks(universe, name, configs))

    minimal: dict[int, Conjunction] = {}

    def definitive(mask: int) -> bool:
        return mask & succeed_bits == 0 and mask & fail_bits != 0

    # frontier entries: (next property index, predicate list, combined mask)
    frontier: list[tuple[int, tuple[tuple[Predicate, int], ...], int]] = [
        (0, (), all_bits)
    ]
    for _level in range(max_len):
        new_frontier = []
        for start, combo, mask in frontier:
            for pi in range(start, len(names)):
                for pred, pmask in preds[pi]:
                    m = mask & pmask
                    if m & fail_bits == 0:
                        continue
                    entry = combo + ((pred, pmask),)
                    if m & succeed_bits == 0:
                        if not _has_definitive_subset(entry, all_bits, fail_bits, succeed_bits):
                            conj = Conjunction(p for p, _ in entry)
                            prev = minimal.get(m)
                            if prev is None or _canon_key(conj) < _canon_key(prev):
                                minimal[m] = conj
                    else:
                        new_frontier.append((pi + 1, entry, m))
        frontier = new_frontier
    return Explanation(sorted(minimal.values(), key=_canon_key))


def _canon_key(conj: Conjunction):
    return (len(conj), [p.sort_key for p in conj])


def _has_definitive_subset(entry, all_bits: int, fail_bits: int, succeed_bits: int) -> bool:
    if len(entry) <= 1:
        return False
    for drop in range(len(entry)):
        m = all_bits
        for i, (_, pmask) in enumerate(entry):
            if i != drop:
                m &= pmask
        if m & succeed_bits == 0 and m & fail_bits != 0:
            return True
    return False


def _predicate_masks(
    universe: Universe, name: str, configs: list[Configuration]
) -> list[tuple[Predicate, int]]:
    """Candidate predicates on one property, deduplicated by admissible set."""
    prop = universe.property_named(name)
    vals = universe.values_for(name)
    full = frozenset(vals)
    candidates = [Predicate(name, Comparator.EQ, v) for v in vals]
    candidates += [Predicate(name, Comparator.NEQ, v) for v in vals]
    if prop.kind is Kind.ORDERED:
        candidates += [Predicate(name, Comparator.LE, v) for v in vals]
        candidates += [Predicate(name, Comparator.GT, v) for v in vals]
    candidates.sort(key=lambda p: p.sort_key)
    by_set: dict[frozenset, Predicate] = {}
    for pred in candidates:
        adm = frozenset(pred.admissible(universe))
        if not adm or adm == full:
            continue
        by_set.setdefault(adm, pred)
    out = []
    value_index = {c: i for i, c in enumerate(configs)}
    for adm, pred in by_set.items():
        mask = 0
        for config, idx in value_index.items():
            if config[name] in adm:
                mask |= 1 << idx
        out.append((pred, mask))
    out.sort(key=lambda t: t[0].sort_key)
    return out


# -- metrics ------------------------------------------------------------------


def _normalized_set(expl: Explanation, universe: Universe) -> set:
    return {conj.normalized(universe) for conj in expl}


def precision(
    suite: BenchmarkSuite, answers: Mapping[str, Explanation]
) -> float:
    hits = 0
    asserted = 0
    for pipeline in suite.pipelines:
        truth = _normalized_set(oracle_minimal_causes(pipeline), pipeline.universe)
        got = _normalized_set(answers.get(pipeline.name, Explanation()), pipeline.universe)
        hits += len(got & truth)
        asserted += len(got)
    if asserted == 0:
        warnings.warn("precision denominator is zero (no causes asserted); using 1.0")
        return 1.0
    return hits / asserted


def recall_findone(
    suite: BenchmarkSuite, answers: Mapping[str, Explanation]
) -> float:
    found = 0
    for pipeline in suite.pipelines:
        truth = _normalized_set(oracle_minimal_causes(pipeline), pipeline.universe)
        got = _normalized_set(answers.get(pipeline.name, Explanation()), pipeline.universe)
        if got & truth:
            found += 1
    return found / len(suite.pipelines)


def recall_findall(
    suite: BenchmarkSuite, answers: Mapping[str, Explanation]
) -> float:
    hits = 0
    total = 0
    for pipeline in suite.pipelines:
        truth = _normalized_set(oracle_minimal_causes(pipeline), pipeline.universe)
        got = _normalized_set(answers.get(pipeline.name, Explanation()), pipeline.universe)
        hits += len(got & truth)
        total += len(truth)
    if total == 0:
        warnings.warn("recall denominator is zero (no true causes); using 1.0")
        return 1.0
    return hits / total


def f_measure(p: float, r: float) -> float:
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


# -- running the debugger against a plant --------------------------------------


def seed_instances(pipeline: PlantedPipeline, seed: int = 0) -> list[Instance]:
    """A small run history: one failing exemplar plus two succeeding ones."""
    rng = random.Random(f"seeds:{pipeline.name}:{seed}")
    universe = pipeline.universe
    names = universe.property_names
    out: list[Instance] = []

    def rand_config() -> Configuration:
        return Configuration((n, rng.choice(universe.values_for(n))) for n in names)

    if len(pipeline.truth):
        conj = rng.choice(list(pipeline.truth))
        assignment = {}
        for n in names:
            assignment[n] = rng.choice(conj.admissible(universe, n))
        config = Configuration(assignment.items())
        out.append(
            Instance(
                config,
                pipeline.score_for(config),
                pipeline.outcome_for(config),
                "seed-00001",
                Origin.SEED,
            )
        )
    succeeding = 0
    for _ in range(500):
        if succeeding == 2:
            break
        config = rand_config()
        if pipeline.outcome_for(config) is Outcome.SUCCEED and not any(
            i.config == config for i in out
        ):
            succeeding += 1
            out.append(
                Instance(
                    config,
                    pipeline.score_for(config),
                    Outcome.SUCCEED,
                    f"seed-{len(out) + 1:05d}",
                    Origin.SEED,
                )
            )
    return out


def run_debug(
    pipeline: PlantedPipeline,
    mode: Mode,
    max_runs: int,
    seed: int = 0,
    options: DebugOptions = DebugOptions(),
    with_seeds: bool = True,
) -> DebugReport:
    store = ProvenanceStore()
    if with_seeds:
        store.extend(seed_instances(pipeline, seed))
    executor = PlantedExecutor(pipeline)
    budget = Budget(max_runs)
    return debug(store, executor, pipeline.universe, mode, budget, seed, options)


def sweep_reports(
    suite: BenchmarkSuite,
    budgets: Sequence[int],
    mode: Mode,
    seed: int = 0,
    options: DebugOptions = DebugOptions(),
) -> dict[int, dict[str, DebugReport]]:
    out: dict[int, dict[str, DebugReport]] = {}
    for b in budgets:
        out[b] = {
            p.name: run_debug(p, mode, b, seed, options) for p in suite.pipelines
        }
    return out


def budget_sweep(
    suite: BenchmarkSuite,
    budgets: Sequence[int],
    mode: Mode,
    seed: int = 0,
    options: DebugOptions = DebugOptions(),
) -> list[dict]:
    """One row of precision/recall/F per budget, for plotting quality vs cost."""
    reports = sweep_reports(suite, budgets, mode, seed, options)
    rows = []
    for b in sorted(reports):
        answers = {name: rep.confirmed for name, rep in reports[b].items()}
        p = precision(suite, answers)
        r = (
            recall_findone(suite, answers)
            if mode is Mode.FIND_ONE
            else recall_findall(suite, answers)
        )
        rows.append(
            {
                "budget": b,
                "mode": mode.value,
                "precision": p,
                "recall": r,
                "f": f_measure(p, r),
            }
        )
    return rows


def write_csv(rows: Sequence[Mapping], fh: IO[str]) -> None:
    writer = csv.DictWriter(fh, fieldnames=["budget", "mode", "precision", "recall", "f"])
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


# -- suite generation -----------------------------------------------------------


def random_suite(
    n_pipelines: int,
    seed: int = 0,
    max_product: int = 2000,
) -> BenchmarkSuite:
    """Randomly planted pipelines: up to 5 properties of 3..6 values, failure
    DNFs of 1 or 2 equality conjunctions over disjoint property sets."""
    pipelines = []
    for i in range(n_pipelines):
        rng = random.Random(f"suite:{seed}:{i}")
        while True:
            n_props = rng.randint(3, 5)
            sizes = [rng.randint(3, 6) for _ in range(n_props)]
            product = 1
            for s in sizes:
                product *= s
            if product <= max_product:
                break
        props = []
        values = {}
        for j, size in enumerate(sizes):
            name = f"P{j + 1}"
            if rng.random() < 0.25:
                props.append(Property(name, Kind.ORDERED))
                values[name] = [float(v) for v in range(1, size + 1)]
            else:
                props.append(Property(name, Kind.CATEGORICAL))
                values[name] = [f"v{v}" for v in range(1, size + 1)]
        universe = Universe(props, values)
        pool = list(universe.property_names)
        rng.shuffle(pool)
        n_conjs = rng.choice([1, 1, 2])
        conjs = []
        for _ in range(n_conjs):
            max_len = min(3, len(pool) - (1 if n_conjs == 2 and not conjs else 0))
            if max_len < 1:
                break
            length = rng.randint(1, max_len)
            chosen, pool = pool[:length], pool[length:]
            conjs.append(
                Conjunction(
                    Predicate(p, Comparator.EQ, rng.choice(universe.values_for(p)))
                    for p in chosen
                )
            )
        pipelines.append(
            PlantedPipeline(
                name=f"pipeline-{i:03d}",
                universe=universe,
                truth=Explanation(conjs),
            )
        )
    return BenchmarkSuite(tuple(pipelines))


class TableExecutor:
    """Deterministic stub executor: scores come from a lookup table.

    Lets the whole debugging loop run in-process, with no script corpus and no
    subprocesses. Configurations missing from the table score None (a crash).
    """

    def __init__(self, scores: Mapping[Configuration, float], threshold: float = 0.6):
        self.scores = dict(scores)
        self.threshold = threshold
        self._seq = 0

    def run_batch(
        self,
        configs: Sequence[Configuration],
        budget: Budget,
        origin: Origin = Origin.PROBE,
    ) -> list[Instance]:
        budget.spend(len(configs))
        out = []
        for config in configs:
            self._seq += 1
            score = self.scores.get(config)
            outcome = (
                Outcome.SUCCEED
                if score is not None and score >= self.threshold
                else Outcome.FAIL
            )
            out.append(
                Instance(
                    config,
                    score,
                    outcome,
                    f"run-{self._seq:05d}",
                    origin,
                    failure=None if score is not None else "CRASH",
                )
            )
        return out


# -- fixtures -------------------------------------------------------------------

ESTIMATORS = (
    "Decision Tree",
    "Gaussian NB",
    "Gradient Boosting",
    "K-Neighbors Classifier",
    "Logistic Regression",
    "Random Forest",
)


def insurance_universe() -> Universe:
    return Universe(
        [
            Property("Estimator"),
            Property("Imputation"),
            Property("Scaler"),
        ],
        {
            "Estimator": list(ESTIMATORS),
            "Imputation": ["mean", "median"],
            "Scaler": ["standard", "minmax", "none"],
        },
    )


def insurance_low_threshold() -> PlantedPipeline:
    """Life-insurance analogue at the permissive score threshold: two weak
    estimators are the causes."""
    universe = insurance_universe()
    return PlantedPipeline(
        name="insurance-low",
        universe=universe,
        truth=Explanation(
            [
                Conjunction([Predicate("Estimator", Comparator.EQ, "Gaussian NB")]),
                Conjunction(
                    [Predicate("Estimator", Comparator.EQ, "K-Neighbors Classifier")]
                ),
            ]
        ),
    )


def insurance_high_threshold() -> PlantedPipeline:
    """Same pipeline with the bar raised: only one estimator clears it."""
    universe = insurance_universe()
    return PlantedPipeline(
        name="insurance-high",
        universe=universe,
        truth=Explanation(
            [Conjunction([Predicate("Estimator", Comparator.NEQ, "Random Forest")])]
        ),
    )


def classifier_universe() -> Universe:
    """Three-property classification demo: two datasets, three estimators, two
    library versions; runs on version 2.0 score badly."""
    return Universe(
        [Property("Dataset"), Property("Estimator"), Property("Library Version")],
        {
            "Dataset": ["Iris", "Digits"],
            "Estimator": ["Logistic Regression", "Decision Tree", "Gradient Boosting"],
            "Library Version": [1.0, 2.0],
        },
    )


# (dataset, estimator, version) -> score; evaluation passes at score >= 0.6
CLASSIFIER_SCORES = {
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


def classifier_scores() -> dict[Configuration, float]:
    return {
        Configuration(
            [("Dataset", d), ("Estimator", e), ("Library Version", v)]
        ): score
        for (d, e, v), score in CLASSIFIER_SCORES.items()
    }
