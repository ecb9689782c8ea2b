"""Append-only store of executed instances and the value universe observed in them.

The log format is one JSON object per line so that runs can be appended
atomically and replayed byte-for-byte:

    {"run_id": str, "config": {...}, "score": num|null,
     "outcome": "succeed"|"fail", "origin": str, "ts": iso8601}
"""
from __future__ import annotations

import datetime as _dt
import json
import threading
from typing import IO, Iterable, Optional

from .model import (
    Configuration,
    Conjunction,
    Instance,
    Kind,
    Origin,
    Outcome,
    Property,
    Universe,
    satisfies_conj,
)


class EmptyStoreError(RuntimeError):
    """Raised when a universe is requested from a store with no instances."""


class ProvenanceStore:
    """In-memory instance log with an optional JSONL file behind it.

    Appends are serialized through a lock; the reasoning view keeps at most one
    outcome per distinct configuration. When a configuration was observed with
    conflicting outcomes the failing observation wins and the configuration is
    flagged as nondeterministic.
    """

    def __init__(self, log_path: Optional[str] = None):
        self._instances: list[Instance] = []
        self._by_config: dict[Configuration, list[Instance]] = {}
        self._order: list[Configuration] = []
        self._log_path = log_path
        self._lock = threading.Lock()

    def attach_log(self, path: str) -> None:
        """Route future appends to `path` (used after loading an existing log)."""
        self._log_path = path

    # -- mutation ----------------------------------------------------------

    def append(self, inst: Instance) -> None:
        with self._lock:
            if self._log_path is not None:
                line = json.dumps(_instance_to_record(inst), sort_keys=True)
                with open(self._log_path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
            self._instances.append(inst)
            if inst.config not in self._by_config:
                self._by_config[inst.config] = []
                self._order.append(inst.config)
            self._by_config[inst.config].append(inst)

    def extend(self, instances: Iterable[Instance]) -> None:
        for inst in instances:
            self.append(inst)

    # -- access ------------------------------------------------------------

    @property
    def count(self) -> int:
        return len(self._instances)

    @property
    def instances(self) -> tuple[Instance, ...]:
        return tuple(self._instances)

    def has_config(self, config: Configuration) -> bool:
        return config in self._by_config

    def distinct_configs(self) -> int:
        return len(self._by_config)

    def view(self) -> list[Instance]:
        """Reasoning view: one instance per distinct configuration.

        Conflicting outcomes collapse to the first failing observation.
        """
        out = []
        for config in self._order:
            group = self._by_config[config]
            chosen = group[0]
            if any(g.outcome is not group[0].outcome for g in group):
                chosen = next(g for g in group if g.outcome is Outcome.FAIL)
            out.append(chosen)
        return out

    def nondeterministic_configs(self) -> list[Configuration]:
        return [
            c
            for c in self._order
            if len({g.outcome for g in self._by_config[c]}) > 1
        ]

    def query(
        self,
        conj: Conjunction,
        outcome: Optional[Outcome] = None,
        *,
        universe: Universe,
    ) -> list[Instance]:
        """Reasoning-view instances satisfying `conj`, optionally outcome-filtered."""
        hits = [i for i in self.view() if satisfies_conj(i.config, conj, universe)]
        if outcome is not None:
            hits = [i for i in hits if i.outcome is outcome]
        return hits

    def satisfying_config_count(self, conj: Conjunction, *, universe: Universe) -> int:
        return sum(
            1 for c in self._order if satisfies_conj(c, conj, universe)
        )

    # -- universe ----------------------------------------------------------

    def observed_universe(self, declared: Optional[Universe] = None) -> Universe:
        """Per-property value sets seen in stored configs, merged over `declared`.

        Values present in provenance but absent from the declared universe are
        unioned in; `novel_values` reports them so callers can surface a note.
        """
        if not self._instances and declared is None:
            raise EmptyStoreError(
                "store is empty: supply a universe file or seed runs first"
            )
        names: dict[str, None] = {}
        kinds: dict[str, Kind] = {}
        values: dict[str, list] = {}
        if declared is not None:
            for prop in declared.properties:
                names[prop.name] = None
                kinds[prop.name] = prop.kind
                values[prop.name] = list(declared.values[prop.name])
        seen = {
            name: {_numeric_key(v) for v in vals} for name, vals in values.items()
        }
        for inst in self._instances:
            for key, val in inst.config.items:
                names.setdefault(key, None)
                bucket = values.setdefault(key, [])
                marker = seen.setdefault(key, set())
                if _numeric_key(val) not in marker:
                    marker.add(_numeric_key(val))
                    bucket.append(val)
        props = [Property(n, kinds.get(n, Kind.CATEGORICAL)) for n in names]
        return Universe(props, values)

    def novel_values(self, declared: Universe) -> dict[str, list]:
        """Values (or whole properties) in provenance that `declared` lacks."""
        novel: dict[str, list] = {}
        declared_names = set(declared.property_names)
        for inst in self._instances:
            for key, val in inst.config.items:
                if key not in declared_names:
                    novel.setdefault(key, [])
                    if val not in novel[key]:
                        novel[key].append(val)
                elif val not in declared.values[key]:
                    novel.setdefault(key, [])
                    if val not in novel[key]:
                        novel[key].append(val)
        return novel


def _numeric_key(v):
    """Identity under numeric coercion: '2.0' and 2.0 are the same value."""
    if isinstance(v, float):
        return v
    try:
        return float(v)
    except (TypeError, ValueError):
        return v


# -- serialization -----------------------------------------------------------


def _instance_to_record(inst: Instance) -> dict:
    rec = {
        "run_id": inst.run_id,
        "config": inst.config.as_dict(),
        "score": inst.score,
        "outcome": inst.outcome.value,
        "origin": inst.origin.value,
        "ts": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    if inst.failure is not None:
        rec["failure"] = inst.failure
    return rec


def instance_from_record(rec: dict, universe: Optional[Universe] = None) -> Instance:
    score = rec.get("score")
    return Instance(
        config=Configuration.from_mapping(rec["config"], universe),
        score=None if score is None else float(score),
        outcome=Outcome(rec["outcome"]),
        run_id=rec["run_id"],
        origin=Origin(rec.get("origin", "seed")),
        failure=rec.get("failure"),
    )


def read_log(path: str, universe: Optional[Universe] = None) -> ProvenanceStore:
    """Load a JSONL provenance log.

    Two passes: the records are first parsed as-is to derive the merged value
    universe (declared plus observed), then config values are canonicalized
    against it, so a log carrying "2.0" where the universe says 2.0 still
    round-trips into one configuration.
    """
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: bad provenance record: {exc}") from exc
    rough = ProvenanceStore()
    for lineno, rec in records:
        try:
            rough.append(instance_from_record(rec))
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"{path}:{lineno}: bad provenance record: {exc}") from exc
    if records:
        universe = rough.observed_universe(universe)
    if universe is None:
        return rough
    store = ProvenanceStore()
    for lineno, rec in records:
        store.append(instance_from_record(rec, universe))
    return store


def write_log(store: ProvenanceStore, fh: IO[str]) -> None:
    for inst in store.instances:
        fh.write(json.dumps(_instance_to_record(inst), sort_keys=True) + "\n")
