from __future__ import annotations

import numpy as np

from .base import RegressionModel

TIE_TOL = 1e-9  # fraction of the root SSE


def split_candidates(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thresholds at midpoints of sorted distinct values and the total
    within-leaf squared error each one leaves behind."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(ys)
    boundary = np.flatnonzero(xs[1:] > xs[:-1])  # split after position k
    if len(boundary) == 0:
        return np.empty(0), np.empty(0)
    csum = np.cumsum(ys)
    csq = np.cumsum(ys * ys)
    total, total_sq = csum[-1], csq[-1]
    n_left = boundary + 1.0
    n_right = n - n_left
    s_left = csum[boundary]
    s_right = total - s_left
    sse = (csq[boundary] - s_left * s_left / n_left) + \
        ((total_sq - csq[boundary]) - s_right * s_right / n_right)
    thresholds = (xs[boundary] + xs[boundary + 1]) / 2.0
    return thresholds, sse


def best_split(X: np.ndarray, y: np.ndarray) -> tuple[int, float, float] | None:
    """(feature, threshold, sse) minimizing within-leaf squared error.

    Ties go to the lowest feature index, then the lowest threshold. Returns
    None when no split beats the unsplit node.
    """
    root_sse = float(np.sum((y - y.mean()) ** 2))
    tol = TIE_TOL * root_sse
    best = None
    for j in range(X.shape[1]):
        thresholds, sse = split_candidates(X[:, j], y)
        if len(sse) == 0:
            continue
        k = int(np.flatnonzero(sse <= sse.min() + tol)[0])  # lowest near-optimal threshold
        if best is None or sse[k] < best[2] - tol:
            best = (j, float(thresholds[k]), float(sse[k]))
    if best is None or not best[2] < root_sse - tol:
        return None
    return best


class DecisionStump(RegressionModel):
    """Single threshold split; each side predicts its training mean."""

    kind = "decision_stump"

    def _fit(self, X, y):
        split = best_split(X, y)
        if split is None:
            self.feature_ = -1
            self.threshold_ = 0.0
            self.left_ = self.right_ = float(np.mean(y))
            return
        j, t, _ = split
        mask = X[:, j] <= t
        self.feature_ = j
        self.threshold_ = t
        self.left_ = float(np.mean(y[mask]))
        self.right_ = float(np.mean(y[~mask]))

    @property
    def is_degenerate(self) -> bool:
        return self.feature_ < 0

    def _predict(self, X):
        if self.is_degenerate:
            return np.full(X.shape[0], self.left_)
        return np.where(X[:, self.feature_] <= self.threshold_, self.left_, self.right_)

    def get_state(self):
        return {"feature": self.feature_, "threshold": self.threshold_,
                "left": self.left_, "right": self.right_}

    def set_state(self, state):
        self.feature_ = int(state["feature"])
        self.threshold_ = float(state["threshold"])
        self.left_ = float(state["left"])
        self.right_ = float(state["right"])
