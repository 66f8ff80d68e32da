"""Correlation, relative absolute error and mean absolute percentage error
over pooled prediction records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import PredictionRecord
from .errors import DegenerateTargetError, DomainError, ParameterError

RaeReference = Literal["actual", "prior"]


@dataclass(frozen=True)
class MetricSet:
    correlation: float
    rae_pct: float
    mape_pct: float
    n: int = 0

    def rounded(self, digits: int = 2) -> tuple[float, float, float]:
        return (round(self.correlation, digits), round(self.rae_pct, digits),
                round(self.mape_pct, digits))


def _arrays(records: Sequence[PredictionRecord]) -> tuple[np.ndarray, np.ndarray]:
    f = np.array([r.forecast for r in records], dtype=np.float64)
    a = np.array([r.actual for r in records], dtype=np.float64)
    return f, a


def rae(records: Sequence[PredictionRecord], reference: RaeReference = "actual") -> float:
    """100 * sum|f - a| / sum|ref - a|.

    ``reference="actual"`` uses the mean of the actual values. ``"prior"``
    uses each record's ``baseline`` (the training mean of the model that
    produced it), which makes a mean-rule model score exactly 100 % even when
    train and test means differ.
    """
    if len(records) < 2:
        raise ParameterError("RAE needs at least 2 records")
    f, a = _arrays(records)
    if reference == "actual":
        ref = np.full_like(a, a.mean())
    elif reference == "prior":
        if any(r.baseline is None for r in records):
            raise ParameterError("prior-relative RAE needs a baseline on every record")
        ref = np.array([r.baseline for r in records], dtype=np.float64)
    else:
        raise ParameterError(f"unknown RAE reference {reference!r}")
    denom = float(np.sum(np.abs(ref - a)))
    if denom == 0.0:
        raise DegenerateTargetError("RAE undefined: actual values do not deviate from the reference")
    return 100.0 * float(np.sum(np.abs(f - a))) / denom


def mape(records: Sequence[PredictionRecord]) -> float:
    if len(records) < 1:
        raise ParameterError("MAPE needs at least 1 record")
    f, a = _arrays(records)
    if np.any(a == 0):
        raise DomainError("MAPE undefined for a zero actual value")
    return 100.0 / len(a) * float(np.sum(np.abs((f - a) / a)))


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation; 0 when ``x`` has no variance."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.ptp(y) == 0:
        raise DegenerateTargetError("correlation undefined: constant actual values")
    if np.ptp(x) == 0:
        return 0.0
    dx = x - x.mean()
    dy = y - y.mean()
    r = float(dx @ dy) / float(np.sqrt(float(dx @ dx) * float(dy @ dy)))
    return max(-1.0, min(1.0, r))


def correlation(records: Sequence[PredictionRecord]) -> float:
    if len(records) < 2:
        raise ParameterError("correlation needs at least 2 records")
    f, a = _arrays(records)
    return pearson(f, a)


def evaluate(records: Sequence[PredictionRecord],
             rae_reference: RaeReference = "actual") -> MetricSet:
    return MetricSet(correlation(records), rae(records, rae_reference), mape(records),
                     len(records))
