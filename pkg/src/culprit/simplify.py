"""Heuristic minimization of a disjunction of conjunctions over a finite universe.

The domain is finite, so every conjunction denotes an exact set of
configurations (the product of its per-property admissible value sets) and
equivalence can be decided by set algebra instead of symbolic manipulation.
Three passes, in order:

1. absorption: drop any conjunction whose satisfying set lies inside another's;
2. adjacent merge: two conjunctions that differ on exactly one property and
   jointly admit all of that property's values merge by dropping the property;
3. when the universe is small enough to enumerate, widen each conjunction into
   a prime implicant (greedily drop predicates while the satisfying set stays
   inside the failing set) and keep a greedy cover of the failing set.

Pass 3 only ever removes predicates from existing terms, so the output never
has more predicates than the input.
"""
from __future__ import annotations

import itertools
from typing import Optional

from .model import Configuration, Conjunction, Explanation, Universe

ENUMERATION_LIMIT = 2**16


def simplify(expl: Explanation, universe: Universe) -> Explanation:
    conjs = list(expl)
    if not conjs:
        return Explanation()
    for c in conjs:
        c.validate(universe)
    conjs = _dedupe(conjs, universe)
    changed = True
    while changed:
        before = len(conjs)
        conjs = _absorb(conjs, universe)
        conjs = _merge_adjacent(conjs, universe)
        changed = len(conjs) != before
    if universe.product_size() <= ENUMERATION_LIMIT:
        conjs = _greedy_prime_cover(conjs, universe)
    return Explanation(c.canonical_form(universe) for c in conjs)


def satisfying_set(conj: Conjunction, universe: Universe) -> frozenset[Configuration]:
    """All universe configurations satisfying `conj` (enumeration-scale only)."""
    names = sorted(universe.property_names)
    lists = [conj.admissible(universe, n) for n in names]
    return frozenset(
        Configuration(zip(names, combo)) for combo in itertools.product(*lists)
    )


def _sets(conj: Conjunction, universe: Universe) -> dict[str, frozenset]:
    return {
        name: frozenset(conj.admissible(universe, name))
        for name in universe.property_names
    }


def _covers(a: dict[str, frozenset], b: dict[str, frozenset]) -> bool:
    """Product-set containment: a's satisfying set is a superset of b's."""
    return all(a[name] >= b[name] for name in a)


def _dedupe(conjs: list[Conjunction], universe: Universe) -> list[Conjunction]:
    seen = {}
    for c in conjs:
        seen.setdefault(c.normalized(universe), c)
    return list(seen.values())


def _absorb(conjs: list[Conjunction], universe: Universe) -> list[Conjunction]:
    sets = [_sets(c, universe) for c in conjs]
    kept = []
    for i, c in enumerate(conjs):
        absorbed = any(
            j != i and _covers(sets[j], sets[i]) and not _covers(sets[i], sets[j])
            for j in range(len(conjs))
        )
        if not absorbed:
            kept.append(c)
    return _dedupe(kept, universe)


def _merge_adjacent(conjs: list[Conjunction], universe: Universe) -> list[Conjunction]:
    conjs = list(conjs)
    merged = True
    while merged:
        merged = False
        sets = [_sets(c, universe) for c in conjs]
        for i, j in itertools.combinations(range(len(conjs)), 2):
            diff = [
                name
                for name in universe.property_names
                if sets[i][name] != sets[j][name]
            ]
            if len(diff) != 1:
                continue
            name = diff[0]
            union = sets[i][name] | sets[j][name]
            if union != frozenset(universe.values_for(name)):
                continue
            survivor = Conjunction(
                p for p in conjs[i].predicates if p.property != name
            )
            conjs = [c for k, c in enumerate(conjs) if k not in (i, j)] + [survivor]
            merged = True
            break
    return _dedupe(conjs, universe)


def _greedy_prime_cover(
    conjs: list[Conjunction], universe: Universe
) -> list[Conjunction]:
    failing: set[Configuration] = set()
    for c in conjs:
        failing |= satisfying_set(c, universe)

    primes: list[Conjunction] = []
    seen_norm = set()
    for c in conjs:
        prime = _widen(c, universe, failing)
        norm = prime.normalized(universe)
        if norm not in seen_norm:
            seen_norm.add(norm)
            primes.append(prime)

    prime_sets = [satisfying_set(p, universe) for p in primes]
    uncovered = set(failing)
    cover: list[Conjunction] = []
    order = sorted(
        range(len(primes)),
        key=lambda i: (len(primes[i]), [p.sort_key for p in primes[i]]),
    )
    while uncovered:
        best: Optional[int] = None
        best_gain = 0
        for i in order:
            gain = len(prime_sets[i] & uncovered)
            if gain > best_gain:
                best, best_gain = i, gain
        if best is None:
            break  # cannot happen: primes jointly cover their own sources
        cover.append(primes[best])
        uncovered -= prime_sets[best]
    return cover


def _widen(
    conj: Conjunction, universe: Universe, failing: set[Configuration]
) -> Conjunction:
    """Drop predicates while the satisfying set stays inside the failing set."""
    preds = list(conj.predicates)
    changed = True
    while changed:
        changed = False
        for p in list(preds):
            trial = Conjunction(q for q in preds if q is not p)
            if satisfying_set(trial, universe) <= failing:
                preds = list(trial.predicates)
                changed = True
                break
    return Conjunction(preds)
