from __future__ import annotations

import numpy as np

from .base import RegressionModel


class ZeroR(RegressionModel):
    """Predicts the training-target mean for every input."""

    kind = "zero_r"

    def _fit(self, X, y):
        self.mean_ = float(np.mean(y))

    def _predict(self, X):
        return np.full(X.shape[0], self.mean_)

    def get_state(self):
        return {"mean": self.mean_}

    def set_state(self, state):
        self.mean_ = float(state["mean"])
