"""Configuration generators: initial designs and suspect-filtered probes.

Probes for a suspect walk the Cartesian product restricted by the suspect's
predicates, skipping configurations already on record. Unconstrained
properties are tried good-outcome-values first, so false hypotheses are
refuted quickly; inequality-constrained properties lead with the admissible
value closest to the threshold.
"""
from __future__ import annotations

import itertools
import random
import warnings
from typing import Iterator

from .model import (
    Comparator,
    Configuration,
    Conjunction,
    Kind,
    Outcome,
    Universe,
    Value,
)
from .provenance import ProvenanceStore


def initial_design(
    universe: Universe, n: int, strategy: str = "covering", seed: int = 0
) -> list[Configuration]:
    """`n` distinct configurations, sampled uniformly or by greedy pair coverage.

    Asking for more configurations than the universe holds returns the full
    product with a warning.
    """
    if n < 1:
        raise ValueError("initial design size must be >= 1")
    size = universe.product_size()
    if n > size:
        warnings.warn(
            f"requested {n} initial configurations but the universe has only {size}; "
            "returning the full product"
        )
        n = size
    if strategy == "random":
        return _random_design(universe, n, seed)
    if strategy == "covering":
        return _covering_design(universe, n, seed)
    raise ValueError(f"unknown initial design strategy: {strategy!r}")


def _random_design(universe: Universe, n: int, seed: int) -> list[Configuration]:
    rng = random.Random(f"design:random:{seed}")
    names = universe.property_names
    chosen: list[Configuration] = []
    seen = set()
    attempts = 0
    while len(chosen) < n:
        config = Configuration(
            (name, rng.choice(universe.values_for(name))) for name in names
        )
        attempts += 1
        if config not in seen:
            seen.add(config)
            chosen.append(config)
        if attempts > 50 * n + 1000:
            for config in universe.all_configs():
                if config not in seen:
                    seen.add(config)
                    chosen.append(config)
                    if len(chosen) == n:
                        break
            break
    return chosen


def _covering_design(universe: Universe, n: int, seed: int) -> list[Configuration]:
    """Greedy covering: all property values first, then all value pairs."""
    rng = random.Random(f"design:covering:{seed}")
    names = list(universe.property_names)
    singles = {(p, v) for p in names for v in universe.values_for(p)}
    pairs = {
        (p, v, q, w)
        for i, p in enumerate(names)
        for q in names[i + 1 :]
        for v in universe.values_for(p)
        for w in universe.values_for(q)
    }
    chosen: list[Configuration] = []
    seen = set()
    while len(chosen) < n and (singles or pairs):
        assignment: dict[str, Value] = {}
        order = list(names)
        rng.shuffle(order)
        for name in order:
            best_value = None
            best_gain = -1
            for v in universe.values_for(name):
                gain = 2 if (name, v) in singles else 0
                for other, w in assignment.items():
                    key = (name, v, other, w) if name < other else (other, w, name, v)
                    if key in pairs:
                        gain += 1
                if gain > best_gain:
                    best_gain, best_value = gain, v
            assignment[name] = best_value
        config = Configuration(assignment.items())
        if config in seen:
            # Coverage stalled on duplicates; fall through to product fill.
            break
        seen.add(config)
        chosen.append(config)
        for name in names:
            singles.discard((name, assignment[name]))
        for i, p in enumerate(names):
            for q in names[i + 1 :]:
                pairs.discard((p, assignment[p], q, assignment[q]))
    if len(chosen) < n:
        for config in universe.all_configs():
            if config not in seen:
                seen.add(config)
                chosen.append(config)
                if len(chosen) == n:
                    break
    return chosen


def probes_for_suspect(
    suspect: Conjunction,
    universe: Universe,
    store: ProvenanceStore,
    k: int = 5,
    seed: int = 0,
) -> list[Configuration]:
    """Up to `k` untested configurations satisfying `suspect`.

    Returns fewer (possibly none) when the filtered product is nearly or fully
    explored; an empty list means the suspect's verification is exhaustive.
    """
    if k < 1:
        raise ValueError("probe batch size must be >= 1")
    return list(itertools.islice(probe_stream(suspect, universe, store, seed), k))


def probe_stream(
    suspect: Conjunction,
    universe: Universe,
    store: ProvenanceStore,
    seed: int = 0,
) -> Iterator[Configuration]:
    """All untested configurations satisfying `suspect`, best candidates first.

    Single pass over the filtered product in preference order; membership in
    the store is checked at yield time, so a caller may execute each probe and
    append it before drawing the next batch without seeing repeats.
    """
    constrained: list[tuple[str, list[Value]]] = []
    free: list[tuple[str, list[Value]]] = []
    for name in sorted(universe.property_names):
        admissible = suspect.admissible(universe, name)
        if not admissible:
            raise ValueError(f"suspect is unsatisfiable on property {name!r}: {suspect}")
        full = universe.values_for(name)
        if len(admissible) == 1:
            constrained.append((name, list(admissible)))
        elif len(admissible) < len(full):
            witness = _inequality_witness(suspect, universe, name, admissible)
            rest = [v for v in admissible if v != witness]
            constrained.append(
                (name, [witness] + _preference_order(rest, name, store, seed))
            )
        else:
            free.append((name, _preference_order(list(admissible), name, store, seed)))
    # Constrained properties stay pinned to their witness while the free ones
    # vary, so the product enumerates witness-first combinations.
    ordered = constrained + free
    names = [name for name, _ in ordered]
    for combo in itertools.product(*(options for _, options in ordered)):
        config = Configuration(zip(names, combo))
        if not store.has_config(config):
            yield config


def _inequality_witness(
    suspect: Conjunction, universe: Universe, name: str, admissible: tuple[Value, ...]
) -> Value:
    """Admissible value closest to the constraining threshold; ties go low."""
    prop = universe.property_named(name)
    thresholds = [
        universe.rank(name, p.value)
        for p in suspect
        if p.property == name and p.comparator in (Comparator.LE, Comparator.GT)
    ]
    if prop.kind is Kind.ORDERED and thresholds:
        def distance(v: Value):
            r = universe.rank(name, v)
            return (min(abs(r - t) for t in thresholds), r)

        return min(admissible, key=distance)
    # Equality-free categorical constraint (NEQ): first admissible in universe order.
    return min(admissible, key=lambda v: universe.rank(name, v))


def _preference_order(
    values: list[Value], name: str, store: ProvenanceStore, seed: int
) -> list[Value]:
    """Good-outcome values (most recent first), then values never seen failing,
    then the rest in a seeded random order."""
    remaining = {v: None for v in values}
    ordered: list[Value] = []
    view = store.view()
    for inst in reversed(view):
        if inst.outcome is Outcome.SUCCEED:
            v = inst.config[name] if _has(inst.config, name) else None
            if v in remaining:
                ordered.append(v)
                del remaining[v]
    failing = {
        inst.config[name]
        for inst in view
        if inst.outcome is Outcome.FAIL and _has(inst.config, name)
    }
    for v in list(remaining):
        if v not in failing:
            ordered.append(v)
            del remaining[v]
    tail = list(remaining)
    random.Random(f"probe:{seed}:{name}:{len(view)}").shuffle(tail)
    return ordered + tail


def _has(config: Configuration, name: str) -> bool:
    return any(k == name for k, _ in config.items)
