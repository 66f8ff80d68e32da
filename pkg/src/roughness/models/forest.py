"""Random forest of CART regression trees.

Tree growth is jit-compiled; each tree owns a SplitMix64 stream seeded from
the master seed, so the fitted forest does not depend on thread scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numba as nb
import numpy as np

from ..errors import ParameterError
from ..rng import derive_seeds
from .base import RegressionModel

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# split gains closer than this fraction of the node SSE are treated as ties
TIE_TOL = 1e-9


@nb.njit(cache=True, nogil=True)
def _next_u64(state):
    s = state[0] + _GAMMA
    state[0] = s
    z = (s ^ (s >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@nb.njit(cache=True, nogil=True)
def _randbelow(state, n):
    un = np.uint64(n)
    threshold = (np.uint64(0) - un) % un
    while True:
        x = _next_u64(state)
        if x >= threshold:
            return np.int64(x % un)


@nb.njit(cache=True, nogil=True)
def _best_split_on(X, y, idx, start, end, j, min_leaf, tol, buf_x, buf_y):
    """Best (sse, threshold) for feature j over idx[start:end]; sse=inf if none.

    Candidates within ``tol`` of the incumbent count as ties and keep the
    lower threshold.
    """
    n = end - start
    for k in range(n):
        buf_x[k] = X[idx[start + k], j]
    order = np.argsort(buf_x[:n], kind="mergesort")
    for k in range(n):
        buf_y[k] = y[idx[start + order[k]]]
    total = 0.0
    total_sq = 0.0
    for k in range(n):
        total += buf_y[k]
        total_sq += buf_y[k] * buf_y[k]
    best_sse = np.inf
    best_t = 0.0
    s_left = 0.0
    sq_left = 0.0
    for k in range(n - 1):
        v = buf_y[k]
        s_left += v
        sq_left += v * v
        n_left = k + 1
        n_right = n - n_left
        lo = buf_x[order[k]]
        hi = buf_x[order[k + 1]]
        if not hi > lo:
            continue
        if n_left < min_leaf or n_right < min_leaf:
            continue
        s_right = total - s_left
        sse = (sq_left - s_left * s_left / n_left) + \
            ((total_sq - sq_left) - s_right * s_right / n_right)
        if sse < best_sse - tol:
            best_sse = sse
            t = (lo + hi) / 2.0
            if not t < hi:
                t = lo
            best_t = t
    return best_sse, best_t


@nb.njit(cache=True, nogil=True)
def _grow(X, y, idx, n_sub, min_leaf, seed):
    """Grow one tree on rows ``idx``; returns flat node arrays."""
    n, p = X.shape
    m = idx.shape[0]
    cap = 2 * m + 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros(cap)
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    buf_x = np.empty(m)
    buf_y = np.empty(m)
    tmp = np.empty(m, dtype=np.int64)
    perm = np.empty(p, dtype=np.int64)

    # stack of (node, start, end)
    stack = np.empty((cap, 3), dtype=np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = m
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        cnt = end - start
        total = 0.0
        ymin = np.inf
        ymax = -np.inf
        for k in range(start, end):
            v = y[idx[k]]
            total += v
            if v < ymin:
                ymin = v
            if v > ymax:
                ymax = v
        mean = total / cnt
        value[node] = mean
        if cnt < 2 * min_leaf or not ymax > ymin:
            continue
        node_sse = 0.0
        for k in range(start, end):
            d = y[idx[k]] - mean
            node_sse += d * d

        for k in range(p):
            perm[k] = k
        for k in range(p - 1, 0, -1):
            r = _randbelow(state, k + 1)
            t = perm[k]
            perm[k] = perm[r]
            perm[r] = t

        tol = TIE_TOL * node_sse
        best_j = -1
        best_sse = np.inf
        best_t = 0.0
        tried = 0
        for q in range(p):
            # past the sampled subset, keep drawing only until a useful split appears
            if tried >= n_sub and best_j >= 0:
                break
            j = perm[q]
            tried += 1
            sse, t = _best_split_on(X, y, idx, start, end, j, min_leaf, tol, buf_x, buf_y)
            if not sse < node_sse - tol:
                continue
            if sse < best_sse - tol or (sse <= best_sse + tol and j < best_j):
                best_sse = sse
                best_j = j
                best_t = t
        if best_j < 0:
            continue

        # stable partition of idx[start:end] on x <= t
        nl = 0
        for k in range(start, end):
            if X[idx[k], best_j] <= best_t:
                tmp[nl] = idx[k]
                nl += 1
        nr = nl
        for k in range(start, end):
            if not X[idx[k], best_j] <= best_t:
                tmp[nr] = idx[k]
                nr += 1
        for k in range(cnt):
            idx[start + k] = tmp[k]

        feature[node] = best_j
        threshold[node] = best_t
        lchild = n_nodes
        rchild = n_nodes + 1
        n_nodes += 2
        left[node] = lchild
        right[node] = rchild
        # push right first so the left subtree is numbered first
        stack[top, 0] = rchild
        stack[top, 1] = start + nl
        stack[top, 2] = end
        top += 1
        stack[top, 0] = lchild
        stack[top, 1] = start
        stack[top, 2] = start + nl
        top += 1
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy())


@nb.njit(cache=True, nogil=True)
def _bootstrap(n, seed):
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    out = np.empty(n, dtype=np.int64)
    for k in range(n):
        out[k] = _randbelow(state, n)
    return out, state[0]


@nb.njit(cache=True, nogil=True)
def _tree_predict(feature, threshold, left, right, value, X):
    out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[r, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[r] = value[node]
    return out


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return _tree_predict(self.feature, self.threshold, self.left, self.right, self.value,
                             np.ascontiguousarray(X, dtype=np.float64))

    def to_dict(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": self.value.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(np.array(d["feature"], dtype=np.int64),
                   np.array(d["threshold"], dtype=np.float64),
                   np.array(d["left"], dtype=np.int64),
                   np.array(d["right"], dtype=np.int64),
                   np.array(d["value"], dtype=np.float64))


def grow_tree(X: np.ndarray, y: np.ndarray, rows: Optional[np.ndarray] = None,
              n_sub: Optional[int] = None, min_leaf: int = 1, seed: int = 0) -> Tree:
    """Grow a regression tree on ``rows`` (default all) of X.

    ``n_sub`` features are drawn per node (default all of them); with every
    feature available the result is a deterministic fully-grown CART tree.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    rows = np.arange(len(y), dtype=np.int64) if rows is None else \
        np.array(rows, dtype=np.int64)
    p = X.shape[1]
    return Tree(*_grow(X, y, rows, p if n_sub is None else n_sub, min_leaf,
                       np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))


def default_subset_size(p: int) -> int:
    return int(math.floor(math.log2(p))) + 1 if p > 0 else 1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    feature_subset_size: Optional[int] = None  # None -> floor(log2 p) + 1
    min_leaf: int = 1
    seed: int = 1
    bootstrap: bool = True
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_trees < 1:
            raise ParameterError("n_trees must be >= 1")
        if self.feature_subset_size is not None and self.feature_subset_size < 1:
            raise ParameterError("feature_subset_size must be >= 1")
        if self.min_leaf < 1:
            raise ParameterError("min_leaf must be >= 1")
        if self.n_jobs < 1:
            raise ParameterError("n_jobs must be >= 1")

    def subset_size(self, p: int) -> int:
        k = default_subset_size(p) if self.feature_subset_size is None \
            else self.feature_subset_size
        if not 1 <= k <= p:
            raise ParameterError(f"feature_subset_size must be in [1, {p}], got {k}")
        return k


class RandomForest(RegressionModel):
    """Bagged CART trees; prediction is the mean of the tree predictions."""

    kind = "random_forest"

    def __init__(self, config: ForestConfig | None = None, seed: Optional[int] = None):
        config = config or ForestConfig()
        super().__init__(config, config.seed if seed is None else seed)

    def _fit(self, X, y):
        cfg = self.config
        X = np.ascontiguousarray(X)
        y = np.ascontiguousarray(y)
        n, p = X.shape
        k = cfg.subset_size(p)
        seeds = derive_seeds(self.seed, cfg.n_trees)

        def build(tree_seed: int) -> Tree:
            s = np.uint64(tree_seed)
            if cfg.bootstrap:
                rows, s = _bootstrap(n, s)
            else:
                rows = np.arange(n, dtype=np.int64)
            return Tree(*_grow(X, y, rows, k, cfg.min_leaf, np.uint64(s)))

        if cfg.n_jobs > 1:
            with ThreadPoolExecutor(cfg.n_jobs) as pool:
                self.trees_ = list(pool.map(build, seeds))
        else:
            self.trees_ = [build(s) for s in seeds]

    def tree_predictions(self, X: np.ndarray) -> np.ndarray:
        """(n_trees, n_rows) matrix of individual tree outputs."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        return np.vstack([t.predict(X) for t in self.trees_])

    def _predict(self, X):
        preds = self.tree_predictions(X)
        total = np.zeros(preds.shape[1])
        for row in preds:
            total += row
        return total / len(self.trees_)

    def get_state(self):
        return {"trees": [t.to_dict() for t in self.trees_]}

    def set_state(self, state):
        self.trees_ = [Tree.from_dict(d) for d in state["trees"]]
