import io

import pytest

from culprit import (
    Budget,
    Comparator,
    Conjunction,
    Explanation,
    Instance,
    Mode,
    Origin,
    Outcome,
    Predicate,
    Property,
    ProvenanceStore,
    Universe,
    is_definitive,
)
from culprit.bench import (
    BenchmarkSuite,
    PlantedExecutor,
    PlantedPipeline,
    budget_sweep,
    f_measure,
    insurance_high_threshold,
    insurance_low_threshold,
    oracle_minimal_causes,
    precision,
    random_suite,
    recall_findall,
    recall_findone,
    run_debug,
    seed_instances,
    write_csv,
)


def eq(p, v):
    return Predicate(p, Comparator.EQ, v)


def ex1_style_universe():
    return Universe(
        [Property("Dataset"), Property("Estimator"), Property("Library Version")],
        {
            "Dataset": ["Iris", "Digits"],
            "Estimator": ["Logistic Regression", "Decision Tree", "Gradient Boosting"],
            "Library Version": [1.0, 2.0],
        },
    )


class TestOracle:
    def test_version_truth_yields_exactly_that_cause(self):
        pipeline = PlantedPipeline(
            "p", ex1_style_universe(), Explanation([Conjunction([eq("Library Version", 2.0)])])
        )
        assert oracle_minimal_causes(pipeline) == Explanation(
            [Conjunction([eq("Library Version", 2.0)])]
        )

    def test_empty_truth_yields_nothing(self):
        pipeline = PlantedPipeline("p", ex1_style_universe(), Explanation())
        assert oracle_minimal_causes(pipeline) == Explanation()

    def test_pair_truth_yields_pair_and_no_singleton(self):
        pair = Conjunction(
            [eq("Estimator", "Gradient Boosting"), eq("Library Version", 2.0)]
        )
        pipeline = PlantedPipeline("p", ex1_style_universe(), Explanation([pair]))
        result = oracle_minimal_causes(pipeline)
        assert result == Explanation([pair])

    def test_universal_failure_is_the_empty_conjunction(self):
        pipeline = PlantedPipeline("p", ex1_style_universe(), Explanation([Conjunction()]))
        assert oracle_minimal_causes(pipeline) == Explanation([Conjunction()])

    def test_oracle_self_consistency(self):
        universe = Universe(
            [Property("P1"), Property("P2"), Property("P3")],
            {"P1": ["a", "b", "c"], "P2": ["x", "y", "z"], "P3": ["m", "n"]},
        )
        pipeline = PlantedPipeline(
            "p",
            universe,
            Explanation([Conjunction([eq("P1", "a"), eq("P2", "x")]), Conjunction([eq("P3", "n"), eq("P1", "c")])]),
        )
        causes = oracle_minimal_causes(pipeline)
        assert len(causes) >= 2
        store = ProvenanceStore()
        for i, config in enumerate(universe.all_configs()):
            failing = pipeline.fails(config)
            store.append(
                Instance(
                    config,
                    0.25 if failing else 0.75,
                    Outcome.FAIL if failing else Outcome.SUCCEED,
                    f"r{i}",
                )
            )
        for conj in causes:
            assert is_definitive(conj, store, universe=universe)
            for drop in conj.predicates:
                sub = Conjunction(p for p in conj.predicates if p is not drop)
                assert not is_definitive(sub, store, universe=universe)

    def test_oversized_universe_rejected(self):
        universe = Universe(
            [Property(f"P{i}") for i in range(8)],
            {f"P{i}": [f"v{j}" for j in range(8)] for i in range(8)},
        )
        pipeline = PlantedPipeline("p", universe, Explanation())
        with pytest.raises(ValueError, match="desk-scale"):
            oracle_minimal_causes(pipeline)


def tiny_suite():
    universe = Universe(
        [Property("P1"), Property("P2")], {"P1": ["a", "b", "c"], "P2": ["x", "y", "z"]}
    )
    return BenchmarkSuite(
        (
            PlantedPipeline("one", universe, Explanation([Conjunction([eq("P1", "a")])])),
            PlantedPipeline(
                "two",
                universe,
                Explanation([Conjunction([eq("P1", "b")]), Conjunction([eq("P2", "z")])]),
            ),
        )
    )


class TestMetrics:
    def test_perfect_answers_score_one(self):
        suite = tiny_suite()
        answers = {p.name: oracle_minimal_causes(p) for p in suite.pipelines}
        assert precision(suite, answers) == 1.0
        assert recall_findone(suite, answers) == 1.0
        assert recall_findall(suite, answers) == 1.0

    def test_half_right_assertions(self):
        suite = BenchmarkSuite(tiny_suite().pipelines[1:])  # truth = {P1=b, P2=z}
        answers = {
            "two": Explanation(
                [Conjunction([eq("P1", "b")]), Conjunction([eq("P1", "c")])]
            )
        }
        assert precision(suite, answers) == 0.5
        assert recall_findall(suite, answers) == 0.5
        assert recall_findone(suite, answers) == 1.0

    def test_empty_answers(self):
        suite = tiny_suite()
        answers = {p.name: Explanation() for p in suite.pipelines}
        assert recall_findone(suite, answers) == 0.0
        assert recall_findall(suite, answers) == 0.0
        with pytest.warns(UserWarning):
            assert precision(suite, answers) == 1.0

    def test_disjoint_answers_score_zero(self):
        suite = BenchmarkSuite(tiny_suite().pipelines[:1])
        answers = {"one": Explanation([Conjunction([eq("P1", "c")])])}
        assert precision(suite, answers) == 0.0
        assert recall_findall(suite, answers) == 0.0

    def test_value_set_normalization_matches_negation_form(self):
        universe = Universe(
            [Property("P1"), Property("P2")], {"P1": ["a", "b"], "P2": ["x", "y", "z"]}
        )
        suite = BenchmarkSuite(
            (PlantedPipeline("p", universe, Explanation([Conjunction([eq("P1", "a")])])),)
        )
        # (P1 != b) denotes the same configurations as (P1 = a)
        answers = {"p": Explanation([Conjunction([Predicate("P1", Comparator.NEQ, "b")])])}
        assert precision(suite, answers) == 1.0
        assert recall_findone(suite, answers) == 1.0

    def test_f_measure_values(self):
        assert f_measure(1.0, 1.0) == 1.0
        assert f_measure(1.0, 0.0) == 0.0
        assert f_measure(0.5, 1.0) == pytest.approx(2 / 3)


class TestPlantedRuns:
    def test_seed_instances_contain_a_failure(self):
        for p in tiny_suite().pipelines:
            seeds = seed_instances(p, seed=4)
            assert any(i.outcome is Outcome.FAIL for i in seeds)
            assert any(i.outcome is Outcome.SUCCEED for i in seeds)
            assert all(i.origin is Origin.SEED for i in seeds)

    def test_run_debug_findone_hits_oracle(self):
        for p in tiny_suite().pipelines:
            report = run_debug(p, Mode.FIND_ONE, max_runs=10**6, seed=0)
            truth = {c.normalized(p.universe) for c in oracle_minimal_causes(p)}
            got = {c.conjunction.normalized(p.universe) for c in report.causes}
            assert got and got <= truth

    def test_executor_budget_accounting(self):
        pipeline = tiny_suite().pipelines[0]
        budget = Budget(3)
        executor = PlantedExecutor(pipeline)
        configs = list(pipeline.universe.all_configs())[:3]
        out = executor.run_batch(configs, budget)
        assert budget.spent == 3
        assert [i.run_id for i in out] == ["run-00001", "run-00002", "run-00003"]

    def test_noise_flips_deterministically(self):
        universe = ex1_style_universe()
        pipeline = PlantedPipeline(
            "noisy", universe, Explanation([Conjunction([eq("Library Version", 2.0)])]),
            noise=0.5,
        )
        outcomes = [pipeline.outcome_for(c) for c in universe.all_configs()]
        assert outcomes == [pipeline.outcome_for(c) for c in universe.all_configs()]
        assert len(set(outcomes)) == 2


class TestSweep:
    def test_rows_and_csv_shape(self):
        suite = tiny_suite()
        rows = budget_sweep(suite, [4, 12], Mode.FIND_ALL, seed=0)
        assert [r["budget"] for r in rows] == [4, 12]
        buf = io.StringIO()
        write_csv(rows, buf)
        lines = buf.getvalue().strip().split("\r\n")
        assert lines[0] == "budget,mode,precision,recall,f"
        assert len(lines) == 3

    def test_recall_monotone_in_budget(self):
        suite = tiny_suite()
        rows = budget_sweep(suite, [0, 4, 10, 40], Mode.FIND_ALL, seed=1)
        recalls = [r["recall"] for r in rows]
        assert recalls == sorted(recalls)
        assert recalls[0] == 0.0
        assert recalls[-1] == 1.0

    def test_zero_budget_returns_nothing(self):
        suite = tiny_suite()
        rows = budget_sweep(suite, [0], Mode.FIND_ONE, seed=0)
        assert rows[0]["recall"] == 0.0


class TestFixtures:
    def test_low_threshold_oracle_matches_identified_causes(self):
        pipeline = insurance_low_threshold()
        causes = oracle_minimal_causes(pipeline)
        assert set(causes.causes) == {
            Conjunction([eq("Estimator", "Gaussian NB")]),
            Conjunction([eq("Estimator", "K-Neighbors Classifier")]),
        }

    def test_high_threshold_truth_is_negation(self):
        pipeline = insurance_high_threshold()
        truth_norm = {c.normalized(pipeline.universe) for c in pipeline.truth}
        oracle_norm = {
            c.normalized(pipeline.universe) for c in oracle_minimal_causes(pipeline)
        }
        assert truth_norm <= oracle_norm

    def test_suite_roundtrip_through_json(self):
        import json

        suite = random_suite(3, seed=5)
        data = json.loads(json.dumps(suite.to_dict()))
        assert BenchmarkSuite.from_dict(data).to_dict() == suite.to_dict()

    def test_random_suite_is_deterministic(self):
        a = random_suite(4, seed=9)
        b = random_suite(4, seed=9)
        assert a.to_dict() == b.to_dict()

    def test_random_suite_shape(self):
        suite = random_suite(10, seed=2)
        assert len(suite.pipelines) == 10
        for p in suite.pipelines:
            assert 3 <= len(p.universe.properties) <= 5
            assert all(3 <= len(p.universe.values_for(n)) <= 6 for n in p.universe.property_names)
            assert 1 <= len(p.truth) <= 2
            assert all(1 <= len(c) <= 3 for c in p.truth)
            # two-cause truths constrain disjoint property sets
            if len(p.truth) == 2:
                a, b = p.truth
                assert not (set(a.property_names) & set(b.property_names))
