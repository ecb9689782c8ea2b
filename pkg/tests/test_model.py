import json

import pytest
from hypothesis import given
import hypothesis.strategies as st

from culprit import (
    Comparator,
    Configuration,
    Conjunction,
    Explanation,
    Kind,
    Predicate,
    Property,
    Universe,
    UniverseMismatchError,
    product_count,
    satisfies,
    satisfies_conj,
)
from strategies import configurations, conjunctions, universes


def brute_force_count(universe, conj):
    return sum(1 for c in universe.all_configs() if satisfies_conj(c, conj, universe))


class TestSatisfies:
    def test_equality_triple_from_trace(self, ex1_universe):
        config = Configuration(
            [
                ("Dataset", "Digits"),
                ("Estimator", "Gradient Boosting"),
                ("Library Version", 2.0),
            ]
        )
        p = Predicate("Estimator", Comparator.EQ, "Gradient Boosting")
        assert satisfies(config, p, ex1_universe)

    def test_greater_than_on_ordered_values(self):
        universe = Universe(
            [Property("P3", Kind.ORDERED)], {"P3": [5.0, 6.0, 7.0, 8.0]}
        )
        config = Configuration([("P3", 7.0)])
        assert satisfies(config, Predicate("P3", Comparator.GT, 6.0), universe)
        assert not satisfies(config, Predicate("P3", Comparator.LE, 6.0), universe)

    def test_inequality_on_matching_value_is_false(self, ex1_universe):
        config = Configuration(
            [("Dataset", "Iris"), ("Estimator", "Decision Tree"), ("Library Version", 1.0)]
        )
        assert not satisfies(config, Predicate("Dataset", Comparator.NEQ, "Iris"), ex1_universe)

    def test_unknown_property_signals_mismatch(self, ex1_universe):
        config = Configuration([("Dataset", "Iris")])
        with pytest.raises(UniverseMismatchError):
            satisfies(config, Predicate("Nope", Comparator.EQ, "x"), ex1_universe)

    @given(data=st.data(), universe=universes())
    def test_eq_neq_exclusive(self, data, universe):
        config = data.draw(configurations(universe))
        name = sorted(universe.property_names)[0]
        value = universe.values_for(name)[0]
        eq = satisfies(config, Predicate(name, Comparator.EQ, value), universe)
        neq = satisfies(config, Predicate(name, Comparator.NEQ, value), universe)
        assert eq != neq

    @given(data=st.data(), universe=universes())
    def test_le_gt_exclusive_on_ordered(self, data, universe):
        ordered = [
            p.name for p in universe.properties if p.kind is Kind.ORDERED
        ]
        if not ordered:
            return
        config = data.draw(configurations(universe))
        name = ordered[0]
        value = universe.values_for(name)[0]
        le = satisfies(config, Predicate(name, Comparator.LE, value), universe)
        gt = satisfies(config, Predicate(name, Comparator.GT, value), universe)
        assert le != gt


class TestSatisfiesConj:
    def test_version_match_row(self, ex1_universe):
        config = Configuration(
            [("Dataset", "Iris"), ("Estimator", "Decision Tree"), ("Library Version", 2.0)]
        )
        conj = Conjunction([Predicate("Library Version", Comparator.EQ, 2.0)])
        assert satisfies_conj(config, conj, ex1_universe)

    def test_empty_conjunction_is_vacuous(self, ex1_universe):
        for config in ex1_universe.all_configs():
            assert satisfies_conj(config, Conjunction(), ex1_universe)

    def test_partial_match_fails(self, ex1_universe):
        config = Configuration(
            [("Dataset", "Digits"), ("Estimator", "Gradient Boosting"), ("Library Version", 1.0)]
        )
        conj = Conjunction(
            [
                Predicate("Estimator", Comparator.EQ, "Gradient Boosting"),
                Predicate("Library Version", Comparator.EQ, 2.0),
            ]
        )
        assert not satisfies_conj(config, conj, ex1_universe)

    @given(data=st.data(), universe=universes())
    def test_monotone_under_predicate_removal(self, data, universe):
        conj = data.draw(conjunctions(universe))
        config = data.draw(configurations(universe))
        if satisfies_conj(config, conj, universe):
            for drop in conj.predicates:
                sub = Conjunction(p for p in conj.predicates if p is not drop)
                assert satisfies_conj(config, sub, universe)


class TestProductCount:
    def test_version_filter_counts_six(self, ex1_universe):
        conj = Conjunction([Predicate("Library Version", Comparator.EQ, 2.0)])
        expected = brute_force_count(ex1_universe, conj)
        assert expected == 6
        assert product_count(ex1_universe, conj) == expected

    def test_empty_conjunction_counts_product(self, ex1_universe):
        assert product_count(ex1_universe, Conjunction()) == 12

    def test_fully_pinned_counts_one(self, ex1_universe):
        conj = Conjunction(
            [
                Predicate("Dataset", Comparator.EQ, "Iris"),
                Predicate("Estimator", Comparator.EQ, "Decision Tree"),
                Predicate("Library Version", Comparator.EQ, 1.0),
            ]
        )
        assert product_count(ex1_universe, conj) == 1

    @given(data=st.data(), universe=universes())
    def test_matches_brute_force(self, data, universe):
        conj = data.draw(conjunctions(universe))
        assert product_count(universe, conj) == brute_force_count(universe, conj)


class TestCanonicalisation:
    def test_predicates_sort_deterministically(self):
        a = Predicate("b", Comparator.EQ, "x")
        b = Predicate("a", Comparator.NEQ, "y")
        c = Predicate("a", Comparator.EQ, "z")
        conj = Conjunction([a, b, c])
        assert conj.predicates == (c, b, a)

    def test_duplicate_predicates_collapse(self):
        p = Predicate("a", Comparator.EQ, "x")
        assert len(Conjunction([p, p])) == 1

    def test_conjunction_order_insensitive_equality(self):
        p1 = Predicate("a", Comparator.EQ, "x")
        p2 = Predicate("b", Comparator.NEQ, "y")
        assert Conjunction([p1, p2]) == Conjunction([p2, p1])

    def test_neq_on_two_value_property_becomes_eq(self, ex1_universe):
        conj = Conjunction([Predicate("Library Version", Comparator.NEQ, 1.0)])
        canon = conj.canonical_form(ex1_universe)
        assert canon == Conjunction([Predicate("Library Version", Comparator.EQ, 2.0)])

    def test_all_but_one_becomes_neq(self, ex1_universe):
        conj = Conjunction(
            [
                Predicate("Estimator", Comparator.NEQ, "Logistic Regression"),
                Predicate("Estimator", Comparator.NEQ, "Decision Tree"),
            ]
        )
        # two exclusions of three values pin the property to one value
        canon = conj.canonical_form(ex1_universe)
        assert canon == Conjunction(
            [Predicate("Estimator", Comparator.EQ, "Gradient Boosting")]
        )

    def test_prefix_becomes_le(self):
        universe = Universe([Property("n", Kind.ORDERED)], {"n": [1.0, 2.0, 3.0, 4.0]})
        conj = Conjunction(
            [Predicate("n", Comparator.LE, 3.0), Predicate("n", Comparator.LE, 2.0)]
        )
        assert conj.canonical_form(universe) == Conjunction(
            [Predicate("n", Comparator.LE, 2.0)]
        )

    def test_suffix_becomes_gt(self):
        universe = Universe([Property("n", Kind.ORDERED)], {"n": [1.0, 2.0, 3.0, 4.0]})
        conj = Conjunction(
            [Predicate("n", Comparator.GT, 2.0), Predicate("n", Comparator.NEQ, 1.0)]
        )
        assert conj.canonical_form(universe) == Conjunction(
            [Predicate("n", Comparator.GT, 2.0)]
        )

    def test_vacuous_property_dropped(self, ex1_universe):
        conj = Conjunction(
            [
                Predicate("Dataset", Comparator.NEQ, "Iris"),
                Predicate("Dataset", Comparator.NEQ, "Digits"),
            ]
        )
        # jointly unsatisfiable; canonical_form is only defined for satisfiable
        # conjunctions, so validate must reject this one
        with pytest.raises(ValueError):
            conj.validate(ex1_universe)


class TestUniverse:
    def test_rejects_duplicate_values(self):
        with pytest.raises(ValueError):
            Universe([Property("a")], {"a": ["x", "x"]})

    def test_rejects_empty_values(self):
        with pytest.raises(ValueError):
            Universe([Property("a")], {"a": []})

    def test_ordered_numeric_sorted_ascending(self):
        u = Universe([Property("n", Kind.ORDERED)], {"n": [3, 1, 2]})
        assert u.values_for("n") == (1.0, 2.0, 3.0)

    def test_numeric_strings_coerced(self):
        u = Universe([Property("v")], {"v": ["1.0", "2.0"]})
        assert u.values_for("v") == (1.0, 2.0)

    def test_mixed_values_stay_as_given(self):
        u = Universe([Property("v")], {"v": ["fast", 2]})
        assert u.values_for("v") == ("fast", 2.0)

    def test_declared_order_on_ordered_strings(self):
        u = Universe(
            [Property("rel", Kind.ORDERED)], {"rel": ["alpha", "beta", "stable"]}
        )
        config = Configuration([("rel", "beta")])
        assert satisfies(config, Predicate("rel", Comparator.LE, "beta"), u)
        assert not satisfies(config, Predicate("rel", Comparator.GT, "beta"), u)

    def test_le_rejected_on_categorical(self, ex1_universe):
        with pytest.raises(ValueError):
            Predicate("Dataset", Comparator.LE, "Iris").validate(ex1_universe)

    def test_roundtrip_through_json(self, ex1_universe):
        data = json.loads(json.dumps(ex1_universe.to_dict()))
        assert Universe.from_dict(data) == ex1_universe


class TestExplanation:
    def test_superset_conjunction_absorbed(self):
        small = Conjunction([Predicate("a", Comparator.EQ, "x")])
        big = Conjunction(
            [Predicate("a", Comparator.EQ, "x"), Predicate("b", Comparator.EQ, "y")]
        )
        assert Explanation([small, big]).causes == (small,)

    def test_roundtrip(self, ex1_universe):
        expl = Explanation(
            [
                Conjunction([Predicate("Library Version", Comparator.EQ, 2.0)]),
                Conjunction([Predicate("Dataset", Comparator.NEQ, "Iris")]),
            ]
        )
        assert Explanation.from_list(json.loads(json.dumps(expl.to_list()))) == expl


class TestConfiguration:
    def test_validation_requires_totality(self, ex1_universe):
        with pytest.raises(UniverseMismatchError):
            Configuration([("Dataset", "Iris")]).validate(ex1_universe)

    def test_numeric_canonicalization(self, ex1_universe):
        config = Configuration.from_mapping(
            {"Dataset": "Iris", "Estimator": "Decision Tree", "Library Version": "2.0"},
            ex1_universe,
        )
        assert config["Library Version"] == 2.0

    def test_score_absent_must_fail(self):
        from culprit import Instance, Outcome

        with pytest.raises(ValueError):
            Instance(Configuration([("a", "x")]), None, Outcome.SUCCEED, "r1")
