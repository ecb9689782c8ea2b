import pytest
from hypothesis import HealthCheck, settings

from culprit import (
    Comparator,
    Configuration,
    Instance,
    Origin,
    Outcome,
    Predicate,
    ProvenanceStore,
    Universe,
)
from culprit.bench import TableExecutor, classifier_scores, classifier_universe

settings.register_profile(
    "ci", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")

THRESHOLD = 0.6


def make_instance(universe, dataset, estimator, version, score, run_id, origin=Origin.SEED):
    config = Configuration(
        [("Dataset", dataset), ("Estimator", estimator), ("Library Version", version)]
    )
    outcome = Outcome.SUCCEED if score >= THRESHOLD else Outcome.FAIL
    return Instance(config, score, outcome, run_id, origin)


@pytest.fixture
def ex1_universe() -> Universe:
    return classifier_universe()


@pytest.fixture
def table1(ex1_universe):
    return [
        make_instance(ex1_universe, "Iris", "Logistic Regression", 1.0, 0.9, "seed-1"),
        make_instance(ex1_universe, "Digits", "Decision Tree", 1.0, 0.8, "seed-2"),
        make_instance(ex1_universe, "Iris", "Gradient Boosting", 2.0, 0.2, "seed-3"),
    ]


@pytest.fixture
def table2(ex1_universe, table1):
    return table1 + [
        make_instance(
            ex1_universe, "Digits", "Gradient Boosting", 2.0, 0.2, "run-4", Origin.PROBE
        ),
        make_instance(
            ex1_universe, "Digits", "Gradient Boosting", 1.0, 0.7, "run-5", Origin.PROBE
        ),
    ]


@pytest.fixture
def table3(ex1_universe, table2):
    return table2 + [
        make_instance(
            ex1_universe, "Digits", "Logistic Regression", 2.0, 0.3, "run-6", Origin.PROBE
        ),
        make_instance(
            ex1_universe, "Iris", "Decision Tree", 2.0, 0.1, "run-7", Origin.PROBE
        ),
    ]


def store_of(instances) -> ProvenanceStore:
    store = ProvenanceStore()
    store.extend(instances)
    return store


@pytest.fixture
def table1_store(table1):
    return store_of(table1)


@pytest.fixture
def table2_store(table2):
    return store_of(table2)


@pytest.fixture
def table3_store(table3):
    return store_of(table3)


@pytest.fixture
def fixture_executor():
    return TableExecutor(classifier_scores(), THRESHOLD)


def pred(prop, comp, value) -> Predicate:
    return Predicate(prop, Comparator(comp), value)
