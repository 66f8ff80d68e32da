from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import FEATURES
from ..errors import ParameterError, SingularityError
from .base import RegressionModel


@dataclass(frozen=True)
class LinearConfig:
    attribute_selection: bool = True


def aic(sse: float, n: int, k: int, sse_floor: float = 0.0) -> float:
    """n ln(SSE/n) + 2k, with k counting the intercept."""
    return n * math.log(max(sse, sse_floor) / n) + 2 * k


def _column_name(j: int, p: int) -> str:
    return FEATURES[j] if p == len(FEATURES) else f"x{j}"


def least_squares(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Intercept + coefficients by least squares on standardized columns.

    One step of iterative refinement in the original units keeps the normal
    equation residual near machine precision.
    """
    n, p = X.shape
    if p == 0:
        return np.empty(0), float(np.mean(y))
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Z = (X - mu) / sd
    A = np.column_stack([np.ones(n), Z])
    theta, *_ = np.linalg.lstsq(A, y, rcond=None)
    coef = theta[1:] / sd
    intercept = theta[0] - float(mu @ coef)
    D = np.column_stack([np.ones(n), X])
    beta = np.concatenate([[intercept], coef])
    r = y - D @ beta
    delta, *_ = np.linalg.lstsq(D, r, rcond=None)
    beta = beta + delta
    return beta[1:], float(beta[0])


def _check_rank(X: np.ndarray, cols: list[int], p: int) -> None:
    if not cols:
        return
    sub = X[:, cols]
    Z = (sub - sub.mean(axis=0)) / sub.std(axis=0)
    A = np.column_stack([np.ones(len(Z)), Z])
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    tol = s.max() * max(A.shape) * np.finfo(float).eps * 1e3
    null = vt[s <= tol]
    if len(null):
        involved = np.flatnonzero(np.abs(null).max(axis=0)[1:] > 1e-6)
        names = tuple(_column_name(cols[i], p) for i in involved)
        raise SingularityError(
            f"singular normal equations: colinear columns {', '.join(names)}", names)


class LinearRegression(RegressionModel):
    """Ordinary least squares with greedy backward AIC attribute elimination.

    Constant columns carry no information beyond the intercept and are
    dropped before selection. Each round removes the attribute whose
    removal lowers AIC the most; selection stops when no removal helps.
    """

    kind = "linear"

    def __init__(self, config: LinearConfig | None = None, seed=None):
        super().__init__(config or LinearConfig(), seed)

    def _fit(self, X, y):
        n, p = X.shape
        varying = [j for j in range(p) if np.ptp(X[:, j]) > 0]
        if n < len(varying) + 2:
            raise ParameterError(
                f"linear regression needs at least {len(varying) + 2} samples, got {n}")
        _check_rank(X, varying, p)

        # noise floor so exact fits compare on the penalty term alone
        floor = 1e-24 * max(float(np.sum((y - y.mean()) ** 2)), np.finfo(float).tiny)

        def score(cols: list[int]) -> float:
            coef, b = least_squares(X[:, cols], y)
            sse = float(np.sum((y - X[:, cols] @ coef - b) ** 2))
            return aic(sse, n, len(cols) + 1, floor)

        selected = list(varying)
        current = score(selected)
        self.aic_path_ = [(tuple(selected), current)]
        while self.config.attribute_selection and selected:
            trials = [(score([c for c in selected if c != j]), j) for j in selected]
            best, drop = min(trials, key=lambda t: (t[0], t[1]))
            if best >= current:
                break
            selected.remove(drop)
            current = best
            self.aic_path_.append((tuple(selected), current))
        coef, b = least_squares(X[:, selected], y)
        self.selected_ = selected
        self.coef_ = coef
        self.intercept_ = b
        self.aic_ = current

    def _predict(self, X):
        return X[:, self.selected_] @ self.coef_ + self.intercept_

    @property
    def coefficients(self) -> np.ndarray:
        """Full-width coefficient vector, zero for eliminated attributes."""
        full = np.zeros(self.n_features)
        full[self.selected_] = self.coef_
        return full

    def get_state(self):
        return {"selected": list(self.selected_), "coef": self.coef_.tolist(),
                "intercept": self.intercept_, "aic": self.aic_}

    def set_state(self, state):
        self.selected_ = [int(j) for j in state["selected"]]
        self.coef_ = np.array(state["coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
        self.aic_ = float(state["aic"])
