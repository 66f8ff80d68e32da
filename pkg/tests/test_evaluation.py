import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roughness.core import PredictionRecord
from roughness.errors import ParameterError, PlanError, SchemaError
from roughness.evaluation import (FoldPlan, cross_validate, cross_validate_arrays,
                                  error_histogram, holdout_evaluate, make_fold_plan,
                                  rank_arrays_by_correlation, rank_arrays_by_wrapper,
                                  rank_by_correlation)
from roughness.metrics import evaluate
from roughness.models import ForestConfig

from conftest import make_dataset, random_design


@settings(max_examples=200)
@given(n=st.integers(2, 300), k=st.integers(2, 20), seed=st.integers(0, 2**64 - 1))
def test_fold_plan_is_balanced_partition(n, k, seed):
    if k > n:
        with pytest.raises(PlanError):
            make_fold_plan(n, k, seed)
        return
    plan = make_fold_plan(n, k, seed)
    sizes = plan.sizes()
    assert sum(sizes) == n and max(sizes) - min(sizes) <= 1
    seen = np.concatenate([plan.test_indices(f) for f in range(k)])
    assert sorted(seen.tolist()) == list(range(n))
    assert plan == make_fold_plan(n, k, seed)


def test_leave_one_out_plan():
    X = np.tile([0.2, 60, 200, 2, 20, 0.4, 0], (5, 1))
    y = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    records = cross_validate_arrays(X, y, "zeror", k=5)
    assert [r.sample_index for r in records] == [0, 1, 2, 3, 4]
    # each held-out row is predicted with the mean of the other four
    assert [r.forecast for r in records] == [3.5, 3.25, 3.0, 2.75, 2.5]


def test_zero_r_two_fold_hand_trace():
    X = np.tile([0.2, 60, 200, 2, 20, 0.4, 0], (4, 1))
    y = np.array([1.0, 1.0, 3.0, 3.0])
    plan = FoldPlan(2, (0, 1, 0, 1), seed=0)  # one 1 and one 3 per fold
    records = cross_validate_arrays(X, y, "zeror", plan=plan)
    assert [r.forecast for r in records] == [2.0] * 4
    m = evaluate(records, rae_reference="prior")
    assert m.correlation == 0.0
    assert m.rae_pct == 100.0
    # 100/4 * (1/1 + 1/1 + 1/3 + 1/3)
    assert m.mape_pct == pytest.approx(200 / 3, abs=1e-12)


def test_cv_rejects_k_above_n(experimental):
    with pytest.raises(PlanError):
        cross_validate(experimental.subset(range(5)), "zeror", k=6)


def test_cv_forest_bitwise_reproducible(experimental):
    cfg = ForestConfig(n_trees=20, seed=5)
    a = cross_validate(experimental, "rf", cfg, k=10, seed=5)
    b = cross_validate(experimental, "rf", cfg, k=10, seed=5)
    assert a[0] == b[0]
    assert [r.forecast for r in a[1]] == [r.forecast for r in b[1]]


def test_cv_zero_r_rae_is_100(experimental):
    metrics, records = cross_validate(experimental, "zeror", k=10, seed=3)
    assert metrics.rae_pct == pytest.approx(100.0, abs=1e-9)
    assert metrics.correlation < 0  # fold means move against the held-out values


def test_holdout_memorization():
    rng = np.random.default_rng(4)
    lh = rng.uniform(0.1, 0.3, 20)
    X = np.tile([0.2, 60, 200, 2, 20, 0.4, 0], (20, 1)).astype(float)
    X[:, 0] = lh
    ds = make_dataset(X, 2 * lh + 1)
    metrics, records = holdout_evaluate(ds, ds, "lr")
    assert metrics.correlation == pytest.approx(1.0, abs=1e-12)
    assert metrics.mape_pct == pytest.approx(0.0, abs=1e-9)
    assert len(records) == 20


def test_holdout_zero_r_exact(experimental):
    rng = np.random.default_rng(0)
    X = random_design(rng, 30)
    train = make_dataset(X, rng.uniform(4, 30, 30))
    metrics, _ = holdout_evaluate(train, experimental, "zeror")
    assert metrics.correlation == 0.0
    assert metrics.rae_pct == 100.0


def test_histogram_hand_bucketing():
    recs = [PredictionRecord(10.0, 10.5, 0), PredictionRecord(10.0, 11.5, 1),
            PredictionRecord(10.0, 8.4, 2)]
    hist = error_histogram(recs, 1.0)
    assert hist.bins == ((0.0, 1), (1.0, 2))
    assert hist.total == 3
    assert hist.to_text() == "0\t1\n1\t2\n"


def test_histogram_perfect_and_params():
    recs = [PredictionRecord(5.0, 5.0, i) for i in range(4)]
    assert error_histogram(recs, 0.5).bins == ((0.0, 4),)
    with pytest.raises(ParameterError):
        error_histogram(recs, 0)
    with pytest.raises(ParameterError):
        error_histogram([], 1.0)


@given(st.lists(st.tuples(st.floats(1, 40), st.floats(0, 60)), min_size=1, max_size=80),
       st.floats(0.05, 5))
def test_histogram_conservation(pairs, width):
    recs = [PredictionRecord(a, f, i) for i, (a, f) in enumerate(pairs)]
    hist = error_histogram(recs, width)
    assert sum(c for _, c in hist.bins) == hist.total == len(recs)
    edges = [e for e, _ in hist.bins]
    assert all(b > a for a, b in zip(edges, edges[1:]))
    assert all(c >= 0 for _, c in hist.bins)


def test_rank_by_correlation_target_copy_first():
    rng = np.random.default_rng(1)
    X = random_design(rng, 40)
    y = rng.uniform(5, 25, 40)
    X[:, 1] = y * 3 + 1  # printing speed copies the target
    ranking = rank_arrays_by_correlation(X, y)
    assert ranking.order[0] == "printing_speed"
    assert ranking.score("printing_speed") == pytest.approx(1.0, abs=1e-12)


def test_rank_by_correlation_flags_constants(experimental):
    ranking = rank_by_correlation(experimental)
    assert set(ranking.flagged) == {"infill_density", "nozzle_diameter", "shape"}
    assert ranking.score("nozzle_diameter") == 0.0
    assert ranking.order[0] == "layer_height"
    scores = [s for _, s in ranking.entries]
    assert scores == sorted(scores, reverse=True)


def test_rank_by_correlation_scale_free():
    rng = np.random.default_rng(2)
    X = random_design(rng, 50)
    y = 5 + 40 * X[:, 0] + 0.1 * X[:, 1] + rng.normal(0, 1, 50)
    scaled = X * np.array([10, 0.5, 2, 3, 1, 7, 1]) + np.array([1, 2, 3, 4, 0, 5, 0])
    a = rank_arrays_by_correlation(X, y)
    b = rank_arrays_by_correlation(scaled, y)
    assert a.order == b.order
    for name, score in a.entries:
        assert b.score(name) == pytest.approx(score, abs=1e-12)


def test_wrapper_finds_the_only_relevant_feature():
    rng = np.random.default_rng(6)
    X = random_design(rng, 80)
    y = 4 + 60 * X[:, 0]  # Ra depends on layer height only
    ranking = rank_arrays_by_wrapper(X, y, "rf", ForestConfig(n_trees=30), k=5, seed=2)
    assert ranking.order[0] == "layer_height"
    assert ranking.score("layer_height") > 0.5
    for name, score in ranking.entries[1:]:
        assert score <= 0.05 * ranking.score("layer_height")


def test_holdout_schema_mismatch(experimental):
    from roughness.models import make_model
    with pytest.raises(SchemaError):
        make_model("zeror").fit(*experimental.arrays()).predict(np.ones((2, 6)))
