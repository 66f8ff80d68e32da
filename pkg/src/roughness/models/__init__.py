"""Regression model families behind a single fit/predict contract."""

from __future__ import annotations

import dataclasses
from typing import Any, Optional

from ..core import Dataset
from ..errors import ParameterError
from .base import RegressionModel
from .forest import ForestConfig, RandomForest, Tree, grow_tree
from .linear import LinearConfig, LinearRegression
from .persist import load_model, save_model
from .stump import DecisionStump
from .svr import SMOreg, SvrConfig
from .zero_r import ZeroR

MODEL_CLASSES: dict[str, type[RegressionModel]] = {
    "zero_r": ZeroR,
    "linear": LinearRegression,
    "smo_reg": SMOreg,
    "decision_stump": DecisionStump,
    "random_forest": RandomForest,
}
CONFIG_CLASSES: dict[str, Optional[type]] = {
    "zero_r": None,
    "linear": LinearConfig,
    "smo_reg": SvrConfig,
    "decision_stump": None,
    "random_forest": ForestConfig,
}
# CLI spellings
ALIASES = {
    "zeror": "zero_r", "zero_r": "zero_r",
    "lr": "linear", "linear": "linear",
    "smoreg": "smo_reg", "smo_reg": "smo_reg", "svr": "smo_reg",
    "stump": "decision_stump", "ds": "decision_stump", "decision_stump": "decision_stump",
    "rf": "random_forest", "random_forest": "random_forest",
}
STOCHASTIC = {"random_forest"}


def resolve_kind(name: str) -> str:
    try:
        return ALIASES[name.lower()]
    except KeyError:
        raise ParameterError(
            f"unknown model {name!r}; choose from {', '.join(sorted(set(ALIASES)))}") from None


def make_config(kind: str, params: Optional[dict] = None) -> Any:
    cls = CONFIG_CLASSES[resolve_kind(kind)]
    params = dict(params or {})
    if cls is None:
        if params:
            raise ParameterError(f"{kind} takes no hyperparameters, got {sorted(params)}")
        return None
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(params) - names
    if unknown:
        raise ParameterError(f"unknown {kind} parameter(s): {', '.join(sorted(unknown))}")
    return cls(**params)


def make_model(kind: str, config: Any = None, seed: Optional[int] = None) -> RegressionModel:
    """Unfitted model; ``config`` may be a config object or a parameter dict."""
    kind = resolve_kind(kind)
    if config is None or isinstance(config, dict):
        config = make_config(kind, config)
    return MODEL_CLASSES[kind](config, seed)


def fit_zero_r(train: Dataset) -> ZeroR:
    return ZeroR().fit_dataset(train)


def fit_linear(train: Dataset, cfg: LinearConfig | None = None) -> LinearRegression:
    return LinearRegression(cfg).fit_dataset(train)


def fit_smo_reg(train: Dataset, cfg: SvrConfig | None = None) -> SMOreg:
    return SMOreg(cfg).fit_dataset(train)


def fit_decision_stump(train: Dataset) -> DecisionStump:
    return DecisionStump().fit_dataset(train)


def fit_random_forest(train: Dataset, cfg: ForestConfig | None = None) -> RandomForest:
    return RandomForest(cfg).fit_dataset(train)


def predict(model: RegressionModel, x) -> float:
    """Ra estimate (um) for one feature vector."""
    return model.predict_one(x)


__all__ = [
    "RegressionModel", "ZeroR", "LinearRegression", "LinearConfig", "SMOreg", "SvrConfig",
    "DecisionStump", "RandomForest", "ForestConfig", "Tree", "grow_tree",
    "MODEL_CLASSES", "STOCHASTIC", "resolve_kind", "make_config", "make_model",
    "fit_zero_r", "fit_linear", "fit_smo_reg", "fit_decision_stump", "fit_random_forest",
    "predict", "save_model", "load_model",
]
