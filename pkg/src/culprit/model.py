"""Domain vocabulary: properties, values, predicates, conjunctions, configurations."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

Value = Union[str, float]


class UniverseMismatchError(KeyError):
    """A configuration or predicate refers to a property the universe does not know."""


class Kind(str, Enum):
    CATEGORICAL = "categorical"
    ORDERED = "ordered"


class Comparator(str, Enum):
    EQ = "="
    NEQ = "!="
    LE = "<="
    GT = ">"


_COMPARATOR_RANK = {Comparator.EQ: 0, Comparator.NEQ: 1, Comparator.LE: 2, Comparator.GT: 3}

# Comparator carried by the false branch of a binary split.
NEGATION = {
    Comparator.EQ: Comparator.NEQ,
    Comparator.NEQ: Comparator.EQ,
    Comparator.LE: Comparator.GT,
    Comparator.GT: Comparator.LE,
}


def canonical_value(raw) -> Value:
    """Map a raw (JSON) scalar onto the canonical value type: str or float."""
    if isinstance(raw, bool):
        raise ValueError(f"boolean is not a legal property value: {raw!r}")
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        return raw
    raise ValueError(f"unsupported property value: {raw!r}")


def _value_sort_key(v: Value):
    # Floats before strings; deterministic but universe-independent.
    return (0, v, "") if isinstance(v, float) else (1, 0.0, v)


@dataclass(frozen=True)
class Property:
    name: str
    kind: Kind = Kind.CATEGORICAL

    def __post_init__(self):
        if not self.name:
            raise ValueError("property name must be nonempty")


class Universe:
    """Per-property sets of admissible values; the search space is their product.

    Ordered properties carry a total order: numeric when every value parses as a
    number, otherwise the declared list order. Categorical properties support
    equality comparators only.
    """

    def __init__(self, properties: Sequence[Property], values: Mapping[str, Sequence]):
        props = tuple(properties)
        names = [p.name for p in props]
        if len(set(names)) != len(names):
            raise ValueError("duplicate property names in universe")
        canon: dict[str, tuple[Value, ...]] = {}
        for prop in props:
            raw = list(values.get(prop.name, ()))
            if not raw:
                raise ValueError(f"property {prop.name!r} has no values")
            vals = [canonical_value(v) for v in raw]
            if all(
                isinstance(v, float) or _parses_numeric(v) for v in vals
            ):
                vals = [float(v) for v in vals]
            if len(set(vals)) != len(vals):
                raise ValueError(f"duplicate values for property {prop.name!r}")
            if prop.kind is Kind.ORDERED and all(isinstance(v, float) for v in vals):
                vals = sorted(vals)
            canon[prop.name] = tuple(vals)
        self.properties = props
        self.values = canon
        self._prop_by_name = {p.name: p for p in props}
        self._order = {
            name: {v: i for i, v in enumerate(vals)} for name, vals in canon.items()
        }

    def property_named(self, name: str) -> Property:
        try:
            return self._prop_by_name[name]
        except KeyError:
            raise UniverseMismatchError(f"unknown property {name!r}") from None

    def values_for(self, name: str) -> tuple[Value, ...]:
        self.property_named(name)
        return self.values[name]

    def rank(self, name: str, value: Value) -> int:
        try:
            return self._order[name][value]
        except KeyError:
            raise UniverseMismatchError(
                f"value {value!r} not in universe of property {name!r}"
            ) from None

    def canon_config_value(self, name: str, raw) -> Value:
        v = canonical_value(raw)
        if name not in self._prop_by_name:
            return v  # novel property; the caller unions it into the universe
        vals = self.values[name]
        if isinstance(v, str) and vals and isinstance(vals[0], float) and _parses_numeric(v):
            v = float(v)
        return v

    @property
    def property_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.properties)

    def product_size(self) -> int:
        n = 1
        for vals in self.values.values():
            n *= len(vals)
        return n

    def all_configs(self) -> Iterator["Configuration"]:
        import itertools

        names = self.property_names
        for combo in itertools.product(*(self.values[n] for n in names)):
            yield Configuration(tuple(sorted(zip(names, combo))))

    def to_dict(self) -> dict:
        return {
            "properties": [
                {"name": p.name, "kind": p.kind.value, "values": list(self.values[p.name])}
                for p in self.properties
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Universe":
        props = []
        values = {}
        for entry in data["properties"]:
            props.append(Property(entry["name"], Kind(entry.get("kind", "categorical"))))
            values[entry["name"]] = entry["values"]
        return cls(props, values)

    def __eq__(self, other):
        return (
            isinstance(other, Universe)
            and self.properties == other.properties
            and self.values == other.values
        )

    def __repr__(self):
        return f"Universe({', '.join(f'{p.name}:{len(self.values[p.name])}' for p in self.properties)})"


def _parses_numeric(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


@dataclass(frozen=True, order=True)
class Predicate:
    property: str
    comparator: Comparator
    value: Value

    @property
    def sort_key(self):
        return (self.property, _COMPARATOR_RANK[self.comparator], _value_sort_key(self.value))

    def negated(self) -> "Predicate":
        return Predicate(self.property, NEGATION[self.comparator], self.value)

    def validate(self, universe: Universe) -> None:
        prop = universe.property_named(self.property)
        universe.rank(self.property, self.value)
        if self.comparator in (Comparator.LE, Comparator.GT) and prop.kind is not Kind.ORDERED:
            raise ValueError(
                f"comparator {self.comparator.value!r} is illegal on categorical "
                f"property {self.property!r}"
            )

    def admissible(self, universe: Universe) -> tuple[Value, ...]:
        """Universe values of this predicate's property that satisfy it."""
        vals = universe.values_for(self.property)
        if self.comparator is Comparator.EQ:
            return tuple(v for v in vals if v == self.value)
        if self.comparator is Comparator.NEQ:
            return tuple(v for v in vals if v != self.value)
        cut = universe.rank(self.property, self.value)
        if self.comparator is Comparator.LE:
            return tuple(v for v in vals if universe.rank(self.property, v) <= cut)
        return tuple(v for v in vals if universe.rank(self.property, v) > cut)

    def to_dict(self) -> dict:
        return {"property": self.property, "comparator": self.comparator.value, "value": self.value}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Predicate":
        return cls(data["property"], Comparator(data["comparator"]), canonical_value(data["value"]))

    def __str__(self):
        return f"{self.property} {self.comparator.value} {self.value!r}"


class Conjunction:
    """An immutable AND of predicates, kept in canonical order."""

    __slots__ = ("predicates",)

    def __init__(self, predicates: Iterable[Predicate] = ()):
        unique = {p: None for p in predicates}
        object.__setattr__(
            self, "predicates", tuple(sorted(unique, key=lambda p: p.sort_key))
        )

    def __setattr__(self, *a):
        raise AttributeError("Conjunction is immutable")

    def __iter__(self):
        return iter(self.predicates)

    def __len__(self):
        return len(self.predicates)

    def __eq__(self, other):
        return isinstance(other, Conjunction) and self.predicates == other.predicates

    def __hash__(self):
        return hash(self.predicates)

    def __repr__(self):
        if not self.predicates:
            return "Conjunction(TRUE)"
        return "Conjunction(" + " AND ".join(str(p) for p in self.predicates) + ")"

    @property
    def property_names(self) -> tuple[str, ...]:
        seen = {}
        for p in self.predicates:
            seen[p.property] = None
        return tuple(seen)

    def validate(self, universe: Universe) -> None:
        for p in self.predicates:
            p.validate(universe)
        if self.predicates and product_count(universe, self) == 0:
            raise ValueError(f"unsatisfiable conjunction over universe: {self}")

    def admissible(self, universe: Universe, name: str) -> tuple[Value, ...]:
        """Values of `name` jointly admitted by this conjunction's predicates."""
        vals = universe.values_for(name)
        for p in self.predicates:
            if p.property == name:
                allowed = set(p.admissible(universe))
                vals = tuple(v for v in vals if v in allowed)
        return vals

    def normalized(self, universe: Universe) -> frozenset:
        """Value-set form: the semantic identity of this conjunction over the universe.

        Properties whose admissible set equals the full universe list are vacuous
        and dropped, so syntactically different but equivalent conjunctions agree.
        """
        parts = []
        for name in self.property_names:
            adm = frozenset(self.admissible(universe, name))
            if adm != frozenset(universe.values_for(name)):
                parts.append((name, adm))
        return frozenset(parts)

    def canonical_form(self, universe: Universe) -> "Conjunction":
        """Rewrite each property's constraint with the fewest predicates.

        Singleton sets become equalities, all-but-one sets become inequalities,
        prefixes/suffixes of an ordered property become <= / >. Anything else
        keeps its original predicates minus the redundant ones.
        """
        out: list[Predicate] = []
        for name in self.property_names:
            full = universe.values_for(name)
            adm = self.admissible(universe, name)
            adm_set = set(adm)
            if len(adm) == len(full):
                continue
            if len(adm) == 1:
                out.append(Predicate(name, Comparator.EQ, adm[0]))
                continue
            if len(adm) == len(full) - 1:
                (missing,) = [v for v in full if v not in adm_set]
                out.append(Predicate(name, Comparator.NEQ, missing))
                continue
            prop = universe.property_named(name)
            if prop.kind is Kind.ORDERED:
                ranks = sorted(universe.rank(name, v) for v in adm)
                contiguous = ranks == list(range(ranks[0], ranks[-1] + 1))
                if contiguous and ranks[0] == 0:
                    out.append(Predicate(name, Comparator.LE, full[ranks[-1]]))
                    continue
                if contiguous and ranks[-1] == len(full) - 1:
                    out.append(Predicate(name, Comparator.GT, full[ranks[0] - 1]))
                    continue
            out.extend(_drop_redundant(self, universe, name))
        return Conjunction(out)

    def to_list(self) -> list:
        return [p.to_dict() for p in self.predicates]

    @classmethod
    def from_list(cls, data: Sequence[Mapping]) -> "Conjunction":
        return cls(Predicate.from_dict(d) for d in data)


def _drop_redundant(conj: Conjunction, universe: Universe, name: str) -> list[Predicate]:
    preds = [p for p in conj.predicates if p.property == name]
    target = set(conj.admissible(universe, name))
    kept = list(preds)
    for p in list(preds):
        trial = [q for q in kept if q is not p]
        adm = set(universe.values_for(name))
        for q in trial:
            adm &= set(q.admissible(universe))
        if adm == target:
            kept = trial
    return kept


class Explanation:
    """A disjunction of conjunctions, with predicate-superset absorption applied."""

    __slots__ = ("causes",)

    def __init__(self, causes: Iterable[Conjunction] = ()):
        unique = list({c: None for c in causes})
        kept = [
            c
            for c in unique
            if not any(o is not c and set(o.predicates) < set(c.predicates) for o in unique)
        ]
        # Drop exact duplicates introduced by absorption, preserve canonical order.
        object.__setattr__(
            self, "causes", tuple(sorted(set(kept), key=lambda c: [p.sort_key for p in c]))
        )

    def __setattr__(self, *a):
        raise AttributeError("Explanation is immutable")

    def __iter__(self):
        return iter(self.causes)

    def __len__(self):
        return len(self.causes)

    def __eq__(self, other):
        return isinstance(other, Explanation) and self.causes == other.causes

    def __hash__(self):
        return hash(self.causes)

    def __repr__(self):
        return "Explanation(" + " OR ".join(repr(c) for c in self.causes) + ")"

    def total_predicates(self) -> int:
        return sum(len(c) for c in self.causes)

    def to_list(self) -> list:
        return [c.to_list() for c in self.causes]

    @classmethod
    def from_list(cls, data: Sequence) -> "Explanation":
        return cls(Conjunction.from_list(c) for c in data)


class Configuration:
    """A total assignment of values to properties, hashable and immutable."""

    __slots__ = ("items",)

    def __init__(self, items: Iterable[tuple[str, Value]]):
        object.__setattr__(self, "items", tuple(sorted(items)))

    def __setattr__(self, *a):
        raise AttributeError("Configuration is immutable")

    @classmethod
    def from_mapping(cls, mapping: Mapping, universe: Optional[Universe] = None) -> "Configuration":
        if universe is None:
            return cls((k, canonical_value(v)) for k, v in mapping.items())
        return cls((k, universe.canon_config_value(k, v)) for k, v in mapping.items())

    def __getitem__(self, name: str) -> Value:
        for k, v in self.items:
            if k == name:
                return v
        raise UniverseMismatchError(f"configuration has no property {name!r}")

    def as_dict(self) -> dict:
        return dict(self.items)

    def __eq__(self, other):
        return isinstance(other, Configuration) and self.items == other.items

    def __hash__(self):
        return hash(self.items)

    def __repr__(self):
        return "Configuration(" + ", ".join(f"{k}={v!r}" for k, v in self.items) + ")"

    def validate(self, universe: Universe) -> None:
        names = set(universe.property_names)
        own = {k for k, _ in self.items}
        if own != names:
            missing = names - own
            extra = own - names
            raise UniverseMismatchError(
                f"configuration/universe mismatch (missing={sorted(missing)}, extra={sorted(extra)})"
            )
        for k, v in self.items:
            universe.rank(k, v)


class Outcome(str, Enum):
    SUCCEED = "succeed"
    FAIL = "fail"


class Origin(str, Enum):
    SEED = "seed"
    INITIAL_DESIGN = "initial_design"
    PROBE = "probe"


@dataclass(frozen=True)
class Instance:
    config: Configuration
    score: Optional[float]
    outcome: Outcome
    run_id: str
    origin: Origin = Origin.SEED
    failure: Optional[str] = None  # CRASH, BAD_OUTPUT or TIMEOUT when score is absent

    def __post_init__(self):
        if self.score is None and self.outcome is not Outcome.FAIL:
            raise ValueError("an instance without a score must be a failure")


def satisfies(config: Configuration, pred: Predicate, universe: Universe) -> bool:
    """Does `config` satisfy one property-comparator-value triple?"""
    actual = config[pred.property]
    if pred.comparator is Comparator.EQ:
        return actual == pred.value
    if pred.comparator is Comparator.NEQ:
        return actual != pred.value
    a = universe.rank(pred.property, actual)
    b = universe.rank(pred.property, pred.value)
    return a <= b if pred.comparator is Comparator.LE else a > b


def satisfies_conj(config: Configuration, conj: Conjunction, universe: Universe) -> bool:
    """True iff every predicate holds; the empty conjunction holds vacuously."""
    return all(satisfies(config, p, universe) for p in conj)


def product_count(universe: Universe, conj: Conjunction) -> int:
    """Number of universe configurations satisfying `conj`, one factor per property."""
    n = 1
    for name in universe.property_names:
        n *= len(conj.admissible(universe, name))
    return n
