"""Versioned JSON model files.

Layout: ``{"magic": MAGIC, "format_version": N, "kind": ..., "config": {...},
"seed": ..., "n_features": ..., "train_mean": ..., "state": {...}}``.
Floats are written with ``repr`` precision so a round trip is exact.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import FormatError, IngestIOError
from .base import RegressionModel

MAGIC = "roughness-model"
FORMAT_VERSION = 1


def model_to_dict(model: RegressionModel) -> dict:
    if not model.fitted:
        from ..errors import ModelStateError
        raise ModelStateError("only fitted models can be saved")
    return {
        "magic": MAGIC,
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "config": model.config_dict(),
        "seed": model.seed,
        "n_features": model.n_features,
        "train_mean": model.train_mean,
        "state": model.get_state(),
    }


def model_from_dict(doc: dict) -> RegressionModel:
    from . import MODEL_CLASSES, make_config

    if not isinstance(doc, dict) or doc.get("magic") != MAGIC:
        raise FormatError("not a model file (bad magic header)")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatError(
            f"unsupported model format version {version!r}; this build reads {FORMAT_VERSION}")
    kind = doc.get("kind")
    if kind not in MODEL_CLASSES:
        raise FormatError(f"unknown model kind {kind!r}")
    try:
        model = MODEL_CLASSES[kind](make_config(kind, doc.get("config") or {}), doc.get("seed"))
        model.n_features = int(doc["n_features"])
        model.train_mean = doc.get("train_mean")
        model.set_state(doc["state"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"corrupt model file: {exc}") from exc
    model.fitted = True
    return model


def save_model(model: RegressionModel, path: str | Path) -> None:
    text = json.dumps(model_to_dict(model), sort_keys=True)
    try:
        Path(path).write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise IngestIOError(f"cannot write model file {path}: {exc}") from exc


def load_model(path: str | Path) -> RegressionModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestIOError(f"cannot read model file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"corrupt model file {path}: {exc}") from exc
    return model_from_dict(doc)
