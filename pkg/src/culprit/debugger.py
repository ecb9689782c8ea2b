"""The iterative loop: fit a tree, probe the top suspect, refute or confirm,
certify definitiveness and minimality, and assemble the final report.

A suspect is confirmed when every configuration satisfying it that we ever get
to see fails. If its filtered product is small enough we enumerate it fully
(DEFINITIVE_EXHAUSTIVE); past a cap we settle for a quota of all-failing
probes and say so (DEFINITIVE_SAMPLED). A single succeeding probe refutes the
suspect and rejoins the evidence, so the rebuilt tree cannot derive it again.

Budget handling is strictly prefix-true: the run executed with budget B is the
first B executions of the unlimited run with the same seed, which makes
answers grow monotonically with budget.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Protocol, Sequence

from .executor import Budget
from .model import (
    Configuration,
    Conjunction,
    Explanation,
    Instance,
    Origin,
    Outcome,
    Universe,
    product_count,
    satisfies_conj,
)
from .probes import initial_design, probe_stream
from .provenance import ProvenanceStore
from .simplify import simplify
from .tree import extract_suspects, fit

MAX_RUNS_UNLIMITED = 2**62


class Mode(str, Enum):
    FIND_ONE = "find-one"
    FIND_ALL = "find-all"


class CauseStatus(str, Enum):
    DEFINITIVE_EXHAUSTIVE = "definitive_exhaustive"
    DEFINITIVE_SAMPLED = "definitive_sampled"


class ConfirmResult(str, Enum):
    CONFIRMED_EXHAUSTIVE = "confirmed_exhaustive"
    CONFIRMED_SAMPLED = "confirmed_sampled"
    REFUTED = "refuted"
    BUDGET_EXHAUSTED = "budget_exhausted"


class DebugStatus(str, Enum):
    CAUSES_FOUND = "causes_found"
    BUDGET_EXHAUSTED = "budget_exhausted"
    NO_FAILURES = "no_failures"


EXIT_CODES = {
    DebugStatus.CAUSES_FOUND: 0,
    DebugStatus.BUDGET_EXHAUSTED: 2,
    DebugStatus.NO_FAILURES: 3,
}


class Executor(Protocol):
    def run_batch(
        self, configs: Sequence[Configuration], budget: Budget, origin: Origin = ...
    ) -> list[Instance]: ...


@dataclass(frozen=True)
class DebugOptions:
    probe_batch: int = 5
    exhaustive_cap: int = 256      # filtered products above this are sample-confirmed
    sampled_quota: int = 32        # all-fail probes required in sampled mode
    minimize_cap: int = 4          # largest proper-subset size tried during minimization
    explore_batch: int = 64        # FindAll coverage probing once suspects run dry
    initial_design_size: int = 16

    def __post_init__(self):
        for name in ("probe_batch", "sampled_quota", "explore_batch"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class ConfirmedCause:
    conjunction: Conjunction
    status: CauseStatus


@dataclass
class DebugReport:
    mode: Mode
    status: DebugStatus
    causes: list[ConfirmedCause]
    explanation: Explanation
    explanation_status: list[CauseStatus]
    refuted: list[Conjunction]
    runs_used: int
    budget_max: int
    trail: list[dict]
    notes: list[str] = field(default_factory=list)

    @property
    def confirmed(self) -> Explanation:
        return Explanation(c.conjunction for c in self.causes)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "status": self.status.value,
            "explanation": [
                {"conjunction": conj.to_list(), "status": st.value}
                for conj, st in zip(self.explanation, self.explanation_status)
            ],
            "causes": [
                {"conjunction": c.conjunction.to_list(), "status": c.status.value}
                for c in self.causes
            ],
            "refuted": [c.to_list() for c in self.refuted],
            "runs_used": self.runs_used,
            "budget_max": self.budget_max,
            "probes": self.trail,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def is_definitive(conj: Conjunction, store: ProvenanceStore, *, universe: Universe) -> bool:
    """No succeeding satisfier on record, and at least one failing one."""
    if store.query(conj, Outcome.SUCCEED, universe=universe):
        return False
    return bool(store.query(conj, Outcome.FAIL, universe=universe))


class _Peekable:
    def __init__(self, it: Iterator[Configuration]):
        self._it = it
        self._buf: list[Configuration] = []

    @property
    def empty(self) -> bool:
        if self._buf:
            return False
        nxt = next(self._it, None)
        if nxt is None:
            return True
        self._buf.append(nxt)
        return False

    def take(self, n: int) -> list[Configuration]:
        out = list(self._buf[:n])
        self._buf = self._buf[n:]
        while len(out) < n:
            nxt = next(self._it, None)
            if nxt is None:
                break
            out.append(nxt)
        return out


def confirm(
    suspect: Conjunction,
    store: ProvenanceStore,
    executor: Executor,
    universe: Universe,
    budget: Budget,
    options: DebugOptions = DebugOptions(),
    seed: int = 0,
    trail: Optional[list[dict]] = None,
    phase: str = "confirm",
) -> ConfirmResult:
    """Probe the suspect's filtered product until refuted, exhausted, or quota-met.

    Executor faults surface as failing instances inside run_batch and therefore
    count as (weak) confirmation evidence, never as errors.
    """
    filtered = product_count(universe, suspect)
    already = store.satisfying_config_count(suspect, universe=universe)
    remaining = filtered - already
    sampled_mode = filtered > options.exhaustive_cap
    quota = min(options.sampled_quota, remaining)
    stream = _Peekable(probe_stream(suspect, universe, store, seed))
    probes_done = 0
    while True:
        if stream.empty:
            return ConfirmResult.CONFIRMED_EXHAUSTIVE
        if sampled_mode and probes_done >= quota:
            return ConfirmResult.CONFIRMED_SAMPLED
        if budget.remaining == 0:
            return ConfirmResult.BUDGET_EXHAUSTED
        want = min(options.probe_batch, budget.remaining)
        if sampled_mode:
            want = min(want, quota - probes_done)
        batch = stream.take(want)
        instances = executor.run_batch(batch, budget, origin=Origin.PROBE)
        refuted = False
        for inst in instances:
            store.append(inst)
            if trail is not None:
                trail.append(_trail_entry(inst, phase, suspect))
            if inst.outcome is Outcome.SUCCEED:
                refuted = True
        if refuted:
            return ConfirmResult.REFUTED
        probes_done += len(batch)


def minimize(
    cause: Conjunction,
    store: ProvenanceStore,
    executor: Executor,
    universe: Universe,
    budget: Budget,
    options: DebugOptions = DebugOptions(),
    seed: int = 0,
    trail: Optional[list[dict]] = None,
) -> tuple[Conjunction, Optional[ConfirmResult], bool]:
    """Smallest confirmed proper subset of `cause`, if any survives probing.

    Subsets are tried smallest first, in canonical order, and only when they are
    definitive against current evidence (anything with a succeeding satisfier on
    record can never become definitive again). Returns (conjunction, its own
    confirmation result or None when unchanged, whether the sweep completed).
    """
    n = len(cause)
    for size in range(1, min(n - 1, options.minimize_cap) + 1):
        for subset in itertools.combinations(cause.predicates, size):
            sub = Conjunction(subset)
            if product_count(universe, sub) == 0:
                continue
            if not is_definitive(sub, store, universe=universe):
                continue
            res = confirm(
                sub, store, executor, universe, budget, options, seed, trail, "minimize"
            )
            if res is ConfirmResult.REFUTED:
                continue
            if res is ConfirmResult.BUDGET_EXHAUSTED:
                return cause, None, False
            return sub, res, True
    complete = n - 1 <= options.minimize_cap
    return cause, None, complete


def debug(
    store: ProvenanceStore,
    executor: Executor,
    universe: Universe,
    mode: Mode,
    budget: Budget,
    seed: int = 0,
    options: DebugOptions = DebugOptions(),
    notes: Optional[list[str]] = None,
) -> DebugReport:
    """Run the full loop and return the report; the store keeps all evidence."""
    notes = list(notes or [])
    trail: list[dict] = []
    spent_at_entry = budget.spent
    refuted: list[Conjunction] = []
    confirmed: list[ConfirmedCause] = []
    confirmed_norms: set = set()
    status = DebugStatus.CAUSES_FOUND

    if not any(i.outcome is Outcome.FAIL for i in store.view()):
        _run_initial_design(store, executor, universe, budget, seed, options, trail)
        if not any(i.outcome is Outcome.FAIL for i in store.view()):
            notes.append("no_failures: nothing to debug")
            return _report(
                mode, DebugStatus.NO_FAILURES, confirmed, refuted, budget,
                spent_at_entry, trail, notes, universe, store,
            )

    explore_order: Optional[Iterator[Configuration]] = None
    max_iterations = 4 * min(universe.product_size(), 10**7) + 64
    for _ in range(max_iterations):
        view = store.view()
        if mode is Mode.FIND_ALL and confirmed:
            masked = [c.conjunction for c in confirmed]
            view = [
                i
                for i in view
                if not (
                    i.outcome is Outcome.FAIL
                    and any(satisfies_conj(i.config, m, universe) for m in masked)
                )
            ]
        suspects = []
        if any(i.outcome is Outcome.FAIL for i in view):
            suspects = extract_suspects(fit(view, universe))
        suspects = [
            s
            for s in suspects
            if s.conj.normalized(universe) not in confirmed_norms
            and s.conj not in refuted
        ]
        if not suspects:
            if mode is Mode.FIND_ALL and budget.remaining > 0:
                if explore_order is None:
                    explore_order = _exploration_order(universe, seed)
                ran = _explore(store, executor, universe, budget, options, trail, explore_order)
                if ran:
                    continue
            break
        suspect = suspects[0].conj
        if len(suspect) == 0:
            notes.append("universal_failure: every observed instance fails")
        result = confirm(
            suspect, store, executor, universe, budget, options, seed, trail
        )
        if result is ConfirmResult.REFUTED:
            refuted.append(suspect)
            continue
        if result is ConfirmResult.BUDGET_EXHAUSTED:
            if not confirmed:
                status = DebugStatus.BUDGET_EXHAUSTED
            break
        cause, sub_result, complete = minimize(
            suspect, store, executor, universe, budget, options, seed, trail
        )
        cause_result = sub_result or result
        cause_status = (
            CauseStatus.DEFINITIVE_EXHAUSTIVE
            if cause_result is ConfirmResult.CONFIRMED_EXHAUSTIVE and complete
            else CauseStatus.DEFINITIVE_SAMPLED
        )
        norm = cause.normalized(universe)
        if norm not in confirmed_norms:
            confirmed_norms.add(norm)
            confirmed.append(ConfirmedCause(cause.canonical_form(universe), cause_status))
        if mode is Mode.FIND_ONE:
            break
    else:
        notes.append("iteration_guard: loop stopped before a natural fixpoint")
    return _report(
        mode, status, confirmed, refuted, budget, spent_at_entry, trail, notes,
        universe, store,
    )


def _run_initial_design(store, executor, universe, budget, seed, options, trail) -> None:
    n = min(universe.product_size(), options.initial_design_size)
    if n < 1 or budget.remaining == 0:
        return
    design = [
        c
        for c in initial_design(universe, n, "covering", seed)
        if not store.has_config(c)
    ][: budget.remaining]
    if not design:
        return
    for inst in executor.run_batch(design, budget, origin=Origin.INITIAL_DESIGN):
        store.append(inst)
        trail.append(_trail_entry(inst, "initial_design", None))


def _exploration_order(universe: Universe, seed: int) -> Iterator[Configuration]:
    head = initial_design(universe, min(universe.product_size(), 4096), "covering", seed)
    seen = set(head)

    def rest():
        yield from head
        for config in universe.all_configs():
            if config not in seen:
                yield config

    return rest()


def _explore(store, executor, universe, budget, options, trail, order) -> int:
    """FindAll coverage probing: execute untested configurations so failure
    modes with no exemplar yet can surface. Returns the number of runs made."""
    batch: list[Configuration] = []
    want = min(options.explore_batch, budget.remaining)
    for config in order:
        if want == 0:
            break
        if store.has_config(config):
            continue
        batch.append(config)
        want -= 1
    if not batch:
        return 0
    for inst in executor.run_batch(batch, budget, origin=Origin.PROBE):
        store.append(inst)
        trail.append(_trail_entry(inst, "explore", None))
    return len(batch)


def _trail_entry(inst: Instance, phase: str, suspect: Optional[Conjunction]) -> dict:
    entry = {
        "phase": phase,
        "suspect": None if suspect is None else suspect.to_list(),
        "run_id": inst.run_id,
        "config": inst.config.as_dict(),
        "score": inst.score,
        "outcome": inst.outcome.value,
        "origin": inst.origin.value,
    }
    if inst.failure is not None:
        entry["failure"] = inst.failure
    return entry


def _overlaps(a: Conjunction, b: Conjunction, universe: Universe) -> bool:
    return all(
        set(a.admissible(universe, n)) & set(b.admissible(universe, n))
        for n in universe.property_names
    )


def _report(
    mode, status, confirmed, refuted, budget, spent_at_entry, trail, notes,
    universe, store,
) -> DebugReport:
    explanation = simplify(Explanation(c.conjunction for c in confirmed), universe)
    expl_status = []
    for conj in explanation:
        overlapping = [
            c.status for c in confirmed if _overlaps(conj, c.conjunction, universe)
        ]
        weakest = (
            CauseStatus.DEFINITIVE_SAMPLED
            if CauseStatus.DEFINITIVE_SAMPLED in overlapping
            else CauseStatus.DEFINITIVE_EXHAUSTIVE
        )
        expl_status.append(weakest)
    flaky = store.nondeterministic_configs()
    if flaky:
        notes = notes + [
            "nondeterministic_configs: "
            + "; ".join(json.dumps(c.as_dict(), sort_keys=True) for c in flaky)
        ]
    return DebugReport(
        mode=mode,
        status=status,
        causes=confirmed,
        explanation=explanation,
        explanation_status=expl_status,
        refuted=refuted,
        runs_used=budget.spent - spent_at_entry,
        budget_max=budget.max_runs,
        trail=trail,
        notes=notes,
    )
