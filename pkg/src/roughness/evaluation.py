"""Cross-validation, holdout scoring, error histograms and feature ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Sequence

import numpy as np

from .core import FEATURES, Dataset, PredictionRecord
from .errors import ParameterError, PlanError, SchemaError
from .metrics import MetricSet, evaluate, pearson
from .models import make_model, resolve_kind
from .rng import SplitMix64

DEFAULT_SEED = 1
DEFAULT_K = 10


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: tuple[int, ...]
    seed: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.assignment) == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.assignment) != fold)

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for f in self.assignment:
            counts[f] += 1
        return counts


def make_fold_plan(n: int, k: int = DEFAULT_K, seed: int = DEFAULT_SEED) -> FoldPlan:
    """Shuffle indices with the seeded stream, then deal them round-robin."""
    if k < 2:
        raise PlanError(f"k must be >= 2, got {k}")
    if k > n:
        raise PlanError(f"k = {k} exceeds the {n} available samples")
    order = SplitMix64(seed).permutation(n)
    assignment = [0] * n
    for pos, idx in enumerate(order):
        assignment[idx] = pos % k
    return FoldPlan(k, tuple(assignment), seed)


def _records(y_true, y_pred, indices, baseline) -> list[PredictionRecord]:
    return [PredictionRecord(float(a), float(f), int(i), baseline)
            for a, f, i in zip(y_true, y_pred, indices)]


def cross_validate_arrays(X: np.ndarray, y: np.ndarray, kind: str, config: Any = None,
                          k: int = DEFAULT_K, seed: int = DEFAULT_SEED,
                          plan: Optional[FoldPlan] = None) -> list[PredictionRecord]:
    """Pooled out-of-fold records, sorted by sample index."""
    plan = plan or make_fold_plan(len(y), k, seed)
    records: list[PredictionRecord] = []
    for fold in range(plan.k):
        train = plan.train_indices(fold)
        test = plan.test_indices(fold)
        model = make_model(kind, config, seed).fit(X[train], y[train])
        records.extend(_records(y[test], model.predict(X[test]), test, model.train_mean))
    records.sort(key=lambda r: r.sample_index)
    return records


def cross_validate(ds: Dataset, kind: str, config: Any = None, k: int = DEFAULT_K,
                   seed: int = DEFAULT_SEED) -> tuple[MetricSet, list[PredictionRecord]]:
    """k-fold CV: each fold is predicted by a model fitted on the other folds.

    Metrics are computed once on the pooled out-of-fold predictions; RAE is
    taken relative to each fold's training mean.
    """
    X, y = ds.arrays()
    if k > len(ds):
        raise PlanError(f"k = {k} exceeds the {len(ds)} available samples")
    records = cross_validate_arrays(X, y, kind, config, k, seed)
    return evaluate(records, rae_reference="prior"), records


def holdout_evaluate(train: Dataset, test: Dataset, kind: str, config: Any = None,
                     seed: int = DEFAULT_SEED) -> tuple[MetricSet, list[PredictionRecord]]:
    """Fit once on ``train`` and score every row of ``test``."""
    X_train, y_train = train.arrays()
    X_test, y_test = test.arrays()
    if X_train.shape[1] != X_test.shape[1]:
        raise SchemaError("train and test feature schemas differ")
    model = make_model(kind, config, seed).fit(X_train, y_train)
    records = _records(y_test, model.predict(X_test), range(len(y_test)), model.train_mean)
    return evaluate(records, rae_reference="prior"), records


@dataclass(frozen=True)
class ErrorHistogram:
    bin_width: float
    bins: tuple[tuple[float, int], ...]  # (lower edge, count)
    total: int

    def to_text(self) -> str:
        """Two columns, lower edge and count, one bin per line."""
        return "".join(f"{edge:g}\t{count}\n" for edge, count in self.bins)


def error_histogram(records: Sequence[PredictionRecord], bin_width: float = 1.0) -> ErrorHistogram:
    """Absolute errors bucketed into [m*w, (m+1)*w) from 0 up to the largest error."""
    if not bin_width > 0 or not math.isfinite(bin_width):
        raise ParameterError(f"bin width must be > 0, got {bin_width}")
    if not records:
        raise ParameterError("histogram needs at least one record")
    errors = np.array([r.abs_error for r in records])
    slots = np.floor(errors / bin_width).astype(np.int64)
    counts = np.bincount(slots)
    bins = tuple((float(m * bin_width), int(c)) for m, c in enumerate(counts))
    return ErrorHistogram(float(bin_width), bins, len(records))


@dataclass(frozen=True)
class SignificanceRanking:
    entries: tuple[tuple[str, float], ...]
    method: Literal["pearson", "wrapper"]
    flagged: tuple[str, ...] = field(default=())  # constant features scored 0

    @property
    def order(self) -> list[str]:
        return [name for name, _ in self.entries]

    def score(self, name: str) -> float:
        return dict(self.entries)[name]

    def rank(self, name: str) -> int:
        """1-based position."""
        return self.order.index(name) + 1


def _ranked(scores: dict[str, float], method, flagged=()) -> SignificanceRanking:
    position = {name: i for i, name in enumerate(scores)}
    entries = sorted(scores.items(), key=lambda kv: (-kv[1], position[kv[0]]))
    return SignificanceRanking(tuple(entries), method, tuple(flagged))


def _feature_names(p: int, names: Optional[Sequence[str]]) -> list[str]:
    if names is not None:
        return list(names)
    return list(FEATURES) if p == len(FEATURES) else [f"x{j}" for j in range(p)]


def rank_by_correlation(ds: Dataset) -> SignificanceRanking:
    X, y = ds.arrays()
    return rank_arrays_by_correlation(X, y)


def rank_arrays_by_correlation(X: np.ndarray, y: np.ndarray,
                               names: Optional[Sequence[str]] = None) -> SignificanceRanking:
    """Pearson correlation of each feature column with the target, descending."""
    names = _feature_names(X.shape[1], names)
    scores = {}
    flagged = []
    for j, name in enumerate(names):
        if np.ptp(X[:, j]) == 0:
            flagged.append(name)
        scores[name] = pearson(X[:, j], y)
    return _ranked(scores, "pearson", flagged)


def _mean_abs_error(records: Sequence[PredictionRecord]) -> float:
    return float(np.mean([r.abs_error for r in records]))


def rank_arrays_by_wrapper(X: np.ndarray, y: np.ndarray, kind: str = "random_forest",
                           config: Any = None, k: int = DEFAULT_K, seed: int = DEFAULT_SEED,
                           names: Optional[Sequence[str]] = None) -> SignificanceRanking:
    """Leave-one-feature-out CV error delta.

    score(f) = MAE(CV without f) - MAE(CV with all features), every run on
    the same fold plan. Positive means the model is worse without ``f``.
    """
    n, p = X.shape
    if p < 2:
        raise ParameterError("wrapper ranking needs at least 2 features")
    names = _feature_names(p, names)
    kind = resolve_kind(kind)
    plan = make_fold_plan(n, k, seed)
    base = _mean_abs_error(cross_validate_arrays(X, y, kind, config, plan=plan, seed=seed))
    scores = {}
    for j, name in enumerate(names):
        keep = [c for c in range(p) if c != j]
        reduced = cross_validate_arrays(X[:, keep], y, kind, config, plan=plan, seed=seed)
        scores[name] = _mean_abs_error(reduced) - base
    return _ranked(scores, "wrapper")


def rank_by_wrapper(ds: Dataset, kind: str = "random_forest", config: Any = None,
                    seed: int = DEFAULT_SEED, k: int = DEFAULT_K) -> SignificanceRanking:
    X, y = ds.arrays()
    return rank_arrays_by_wrapper(X, y, kind, config, k, seed)
