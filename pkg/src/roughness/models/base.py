from __future__ import annotations

import dataclasses
from typing import Any, ClassVar, Optional

import numpy as np

from ..core import N_FEATURES, Dataset, FloatArray, check_matrix, check_vector
from ..errors import EmptyDatasetError, ModelStateError, SchemaError


class RegressionModel:
    """Fit/predict contract shared by every model family.

    Subclasses implement ``_fit`` and ``_predict`` on plain arrays and
    ``get_state``/``set_state`` for persistence.
    """

    kind: ClassVar[str] = ""

    def __init__(self, config: Any = None, seed: Optional[int] = None):
        self.config = config
        self.seed = seed
        self.fitted = False
        self.n_features = N_FEATURES
        self.train_mean: Optional[float] = None

    def fit(self, X: FloatArray, y: FloatArray) -> "RegressionModel":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise EmptyDatasetError("training set is empty")
        if y.shape != (X.shape[0],):
            raise SchemaError(f"target length {y.shape} does not match {X.shape[0]} rows")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise SchemaError("training data contains non-finite values")
        self.n_features = X.shape[1]
        self.train_mean = float(np.mean(y))
        self._fit(X, y)
        self.fitted = True
        return self

    def fit_dataset(self, ds: Dataset) -> "RegressionModel":
        X, y = ds.arrays()
        return self.fit(X, y)

    def predict(self, X: FloatArray) -> FloatArray:
        """Predictions for each row of ``X`` (a single vector is accepted)."""
        if not self.fitted:
            raise ModelStateError(f"{self.kind} model must be fitted before predict")
        X = check_matrix(X, self.n_features)
        return self._predict(X)

    def predict_one(self, x) -> float:
        if not self.fitted:
            raise ModelStateError(f"{self.kind} model must be fitted before predict")
        if self.n_features == N_FEATURES:
            x = check_vector(x)
        return float(self.predict(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])

    def _fit(self, X: FloatArray, y: FloatArray) -> None:
        raise NotImplementedError

    def _predict(self, X: FloatArray) -> FloatArray:
        raise NotImplementedError

    def get_state(self) -> dict:
        raise NotImplementedError

    def set_state(self, state: dict) -> None:
        raise NotImplementedError

    def config_dict(self) -> dict:
        return {} if self.config is None else dataclasses.asdict(self.config)

    def __repr__(self) -> str:
        status = "fitted" if self.fitted else "unfitted"
        return f"<{type(self).__name__} {status} config={self.config_dict()}>"
