"""Epsilon-insensitive support vector regression trained by SMO.

The dual is written over 2n variables ``a = [alpha, alpha_star]`` with
labels ``s = [+1]*n + [-1]*n``::

    min  1/2 a'Qa + p'a   s.t.  s'a = 0,  0 <= a <= C
    Q = s s' * [[K, K], [K, K]],   p = [eps - z, eps + z]

and solved by pairwise updates on the maximal violating pair, chosen with
second-order gain. Inputs and target are min-max normalized on the
training set; the tube width and tolerance refer to normalized units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceError, ParameterError
from .base import RegressionModel

TAU = 1e-12


@dataclass(frozen=True)
class SvrConfig:
    C: float = 1.0
    epsilon: float = 1e-3
    tolerance: float = 1e-3
    kernel: str = "linear"
    normalization: str = "minmax"
    max_iter: int = 1_000_000

    def __post_init__(self):
        if not self.C > 0:
            raise ParameterError(f"C must be > 0, got {self.C}")
        if not self.epsilon >= 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon}")
        if not self.tolerance > 0:
            raise ParameterError(f"tolerance must be > 0, got {self.tolerance}")
        if self.kernel != "linear":
            raise ParameterError(f"unsupported kernel {self.kernel!r}; only 'linear'")
        if self.normalization != "minmax":
            raise ParameterError(f"unsupported normalization {self.normalization!r}")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be >= 1")


def minmax_params(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    # constant columns map to 0
    scale = np.where(span > 0, span, 1.0)
    return lo, scale


@dataclass
class SmoResult:
    alpha: np.ndarray
    alpha_star: np.ndarray
    b: float
    iterations: int
    max_violation: float


def _violation(a, G, s, C):
    minus_sG = -s * G
    up = ((s > 0) & (a < C)) | ((s < 0) & (a > 0))
    low = ((s > 0) & (a > 0)) | ((s < 0) & (a < C))
    m = minus_sG[up].max() if up.any() else -np.inf
    M = minus_sG[low].min() if low.any() else np.inf
    return m, M, up, low, minus_sG


def solve_smo(K: np.ndarray, z: np.ndarray, C: float, epsilon: float,
              tolerance: float, max_iter: int = 1_000_000) -> SmoResult:
    """Solve the SVR dual for kernel matrix ``K`` and targets ``z``."""
    n = len(z)
    s = np.concatenate([np.ones(n), -np.ones(n)])
    KK = np.block([[K, K], [K, K]])
    Q = np.outer(s, s) * KK
    QD = np.diag(Q).copy()
    p = np.concatenate([epsilon - z, epsilon + z])
    a = np.zeros(2 * n)
    G = p.copy()

    it = 0
    while True:
        m, M, up, low, minus_sG = _violation(a, G, s, C)
        if m - M <= tolerance:
            break
        if it >= max_iter:
            raise ConvergenceError(
                f"SMO did not converge in {max_iter} pair updates "
                f"(max KKT violation {m - M:.3g})", float(m - M))
        i = int(np.flatnonzero(up & (minus_sG == m))[0])
        # second-order choice of j among violating candidates
        cand = low & (minus_sG < m)
        b_ij = m - minus_sG
        quad = QD[i] + QD - 2.0 * s[i] * s * Q[i]
        quad = np.where(quad > 0, quad, TAU)
        gain = np.where(cand, -(b_ij * b_ij) / quad, np.inf)
        j = int(np.argmin(gain))

        Qi, Qj = Q[i], Q[j]
        old_ai, old_aj = a[i], a[j]
        if s[i] != s[j]:
            qd = QD[i] + QD[j] + 2 * Qi[j]
            delta = (-G[i] - G[j]) / max(qd, TAU)
            diff = a[i] - a[j]
            a[i] += delta
            a[j] += delta
            if diff > 0:
                if a[j] < 0:
                    a[j] = 0
                    a[i] = diff
            else:
                if a[i] < 0:
                    a[i] = 0
                    a[j] = -diff
            if diff > 0:
                if a[i] > C:
                    a[i] = C
                    a[j] = C - diff
            else:
                if a[j] > C:
                    a[j] = C
                    a[i] = C + diff
        else:
            qd = QD[i] + QD[j] - 2 * Qi[j]
            delta = (G[i] - G[j]) / max(qd, TAU)
            total = a[i] + a[j]
            a[i] -= delta
            a[j] += delta
            if total > C:
                if a[i] > C:
                    a[i] = C
                    a[j] = total - C
            else:
                if a[j] < 0:
                    a[j] = 0
                    a[i] = total
            if total > C:
                if a[j] > C:
                    a[j] = C
                    a[i] = total - C
            else:
                if a[i] < 0:
                    a[i] = 0
                    a[j] = total
        G += Qi * (a[i] - old_ai) + Qj * (a[j] - old_aj)
        it += 1

    # bias from free variables, else midpoint of the feasible interval
    sG = s * G
    free = (a > 0) & (a < C)
    if free.any():
        rho = float(sG[free].mean())
    else:
        at_upper = a >= C
        at_lower = a <= 0
        upper_set = (at_upper & (s < 0)) | (at_lower & (s > 0))
        lower_set = (at_upper & (s > 0)) | (at_lower & (s < 0))
        ub = sG[upper_set].min() if upper_set.any() else np.inf
        lb = sG[lower_set].max() if lower_set.any() else -np.inf
        rho = float((ub + lb) / 2) if np.isfinite(ub) and np.isfinite(lb) else \
            float(ub if np.isfinite(ub) else lb)
    return SmoResult(a[:n].copy(), a[n:].copy(), -rho, it, float(max(m - M, 0.0)))


class SMOreg(RegressionModel):
    kind = "smo_reg"

    def __init__(self, config: SvrConfig | None = None, seed=None):
        super().__init__(config or SvrConfig(), seed)

    def _fit(self, X, y):
        cfg = self.config
        self.x_lo_, self.x_scale_ = minmax_params(X)
        self.y_lo_ = float(y.min())
        span = float(y.max() - y.min())
        self.y_scale_ = span if span > 0 else 1.0
        Xn = (X - self.x_lo_) / self.x_scale_
        z = (y - self.y_lo_) / self.y_scale_
        K = Xn @ Xn.T
        res = solve_smo(K, z, cfg.C, cfg.epsilon, cfg.tolerance, cfg.max_iter)
        self.alpha_ = res.alpha
        self.alpha_star_ = res.alpha_star
        self.b_ = res.b
        self.iterations_ = res.iterations
        self.max_violation_ = res.max_violation
        self.support_ = Xn
        self.weights_ = (res.alpha - res.alpha_star) @ Xn

    def decision_normalized(self, Xn: np.ndarray) -> np.ndarray:
        """Kernel expansion sum (alpha - alpha*) K(x_i, x) + b in normalized units."""
        return (self.alpha_ - self.alpha_star_) @ (self.support_ @ Xn.T) + self.b_

    def _predict(self, X):
        Xn = (X - self.x_lo_) / self.x_scale_
        return (Xn @ self.weights_ + self.b_) * self.y_scale_ + self.y_lo_

    def get_state(self):
        return {
            "x_lo": self.x_lo_.tolist(), "x_scale": self.x_scale_.tolist(),
            "y_lo": self.y_lo_, "y_scale": self.y_scale_,
            "alpha": self.alpha_.tolist(), "alpha_star": self.alpha_star_.tolist(),
            "support": self.support_.tolist(), "weights": self.weights_.tolist(),
            "b": self.b_, "iterations": self.iterations_,
            "max_violation": self.max_violation_,
        }

    def set_state(self, state):
        self.x_lo_ = np.array(state["x_lo"], dtype=np.float64)
        self.x_scale_ = np.array(state["x_scale"], dtype=np.float64)
        self.y_lo_ = float(state["y_lo"])
        self.y_scale_ = float(state["y_scale"])
        self.alpha_ = np.array(state["alpha"], dtype=np.float64)
        self.alpha_star_ = np.array(state["alpha_star"], dtype=np.float64)
        self.support_ = np.array(state["support"], dtype=np.float64).reshape(
            len(self.alpha_), len(self.x_lo_))
        self.weights_ = np.array(state["weights"], dtype=np.float64)
        self.b_ = float(state["b"])
        self.iterations_ = int(state["iterations"])
        self.max_violation_ = float(state["max_violation"])
