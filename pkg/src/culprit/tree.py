"""Binary decision tree over evaluated instances; pure-fail paths become suspects.

Splits are (property, =, value) tests for every value present at a node, plus
(property, <=, value) threshold tests on ordered properties. The split with the
largest Gini impurity decrease wins; ties go to the smallest candidate in
canonical (property, comparator, value) order, which makes fitting independent
of instance order. Nodes grow until pure or inseparable; there is no pruning,
because the pure leaves themselves are the hypotheses of interest.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .model import (
    Comparator,
    Conjunction,
    Instance,
    Kind,
    Outcome,
    Predicate,
    Universe,
    _value_sort_key,
    satisfies,
)


class Purity(str, Enum):
    PURE_FAIL = "pure_fail"
    PURE_SUCCEED = "pure_succeed"
    MIXED = "mixed"


@dataclass(frozen=True)
class Leaf:
    n_fail: int
    n_succeed: int

    @property
    def purity(self) -> Purity:
        if self.n_fail > 0 and self.n_succeed == 0:
            return Purity.PURE_FAIL
        if self.n_succeed > 0 and self.n_fail == 0:
            return Purity.PURE_SUCCEED
        return Purity.MIXED


@dataclass(frozen=True)
class Inner:
    split: Predicate
    true_child: "TreeNode"
    false_child: "TreeNode"


TreeNode = Union[Leaf, Inner]


@dataclass(frozen=True)
class Suspect:
    conj: Conjunction
    n_fail: int


def fit(instances: list[Instance], universe: Universe) -> TreeNode:
    if not instances:
        raise ValueError("cannot fit a tree on zero instances")
    return _build(list(instances), universe)


def _build(instances: list[Instance], universe: Universe) -> TreeNode:
    n_fail = sum(1 for i in instances if i.outcome is Outcome.FAIL)
    n_succ = len(instances) - n_fail
    if n_fail == 0 or n_succ == 0:
        return Leaf(n_fail, n_succ)
    best = _best_split(instances, universe)
    if best is None:
        return Leaf(n_fail, n_succ)
    true_side = [i for i in instances if satisfies(i.config, best, universe)]
    false_side = [i for i in instances if not satisfies(i.config, best, universe)]
    return Inner(best, _build(true_side, universe), _build(false_side, universe))


def _best_split(instances: list[Instance], universe: Universe) -> Optional[Predicate]:
    """Maximum-Gini-decrease separating split, or None when nothing separates.

    Comparing weighted child impurities exactly: minimizing
        n_t*g(t)/n + n_f*g(f)/n
    is the same as maximizing
        (fail_t^2 + succ_t^2)/n_t + (fail_f^2 + succ_f^2)/n_f,
    which we compare as integer cross products so float noise cannot break ties.
    """
    n = len(instances)
    best_pred: Optional[Predicate] = None
    best_num = 0
    best_den = 1
    for name in sorted(universe.property_names):
        prop = universe.property_named(name)
        fail_by_value: dict = {}
        succ_by_value: dict = {}
        for inst in instances:
            v = inst.config[name]
            bucket = fail_by_value if inst.outcome is Outcome.FAIL else succ_by_value
            bucket[v] = bucket.get(v, 0) + 1
        present = sorted(
            set(fail_by_value) | set(succ_by_value), key=lambda v: universe.rank(name, v)
        )
        total_fail = sum(fail_by_value.values())
        total_succ = sum(succ_by_value.values())
        if prop.kind is Kind.ORDERED:
            cum_f = 0
            cum_s = 0
            for v in present[:-1]:
                cum_f += fail_by_value.get(v, 0)
                cum_s += succ_by_value.get(v, 0)
                cand = Predicate(name, Comparator.LE, v)
                num, den = _score(cum_f, cum_s, total_fail - cum_f, total_succ - cum_s)
                if best_pred is None or num * best_den > best_num * den:
                    best_pred, best_num, best_den = cand, num, den
        else:
            for v in sorted(present, key=_value_sort_key):
                f_t = fail_by_value.get(v, 0)
                s_t = succ_by_value.get(v, 0)
                if f_t + s_t == n:
                    continue  # false child would be empty
                cand = Predicate(name, Comparator.EQ, v)
                num, den = _score(f_t, s_t, total_fail - f_t, total_succ - s_t)
                if best_pred is None or num * best_den > best_num * den:
                    best_pred, best_num, best_den = cand, num, den
    return best_pred


def _score(f_t: int, s_t: int, f_f: int, s_f: int) -> tuple[int, int]:
    n_t = f_t + s_t
    n_f = f_f + s_f
    num = (f_t * f_t + s_t * s_t) * n_f + (f_f * f_f + s_f * s_f) * n_t
    return num, n_t * n_f


def extract_suspects(tree: TreeNode) -> list[Suspect]:
    """One suspect per pure-fail leaf: the AND of split predicates on its path.

    The false branch of a split contributes the negated comparator form.
    Suspects are sorted by descending failure count, then by conjunction size,
    then canonically.
    """
    found: list[Suspect] = []

    def walk(node: TreeNode, path: list[Predicate]) -> None:
        if isinstance(node, Leaf):
            if node.purity is Purity.PURE_FAIL:
                found.append(Suspect(Conjunction(path), node.n_fail))
            return
        walk(node.true_child, path + [node.split])
        walk(node.false_child, path + [node.split.negated()])

    walk(tree, [])
    found.sort(key=lambda s: (-s.n_fail, len(s.conj), [p.sort_key for p in s.conj]))
    return found


def to_dict(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {
            "kind": "leaf",
            "n_fail": node.n_fail,
            "n_succeed": node.n_succeed,
            "purity": node.purity.value,
        }
    return {
        "kind": "split",
        "property": node.split.property,
        "comparator": node.split.comparator.value,
        "value": node.split.value,
        "true": to_dict(node.true_child),
        "false": to_dict(node.false_child),
    }
