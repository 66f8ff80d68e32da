"""Canonical data model: printed samples, datasets and prediction records."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from typing import Iterator, Optional, Sequence

import numpy as np
import numpy.typing as npt

from .errors import EmptyDatasetError, SchemaError

FloatArray = npt.NDArray[np.float64]

FEATURES: tuple[str, ...] = (
    "layer_height",
    "printing_speed",
    "printing_temperature",
    "wall_thickness",
    "infill_density",
    "nozzle_diameter",
    "shape",
)
N_FEATURES = len(FEATURES)

# Shape codes used by the bundled data. Literature files may assign further codes.
SHAPE_CODES = {0: "cylinder"}

UNITS = {
    "layer_height": "mm",
    "printing_speed": "mm/s",
    "printing_temperature": "degC",
    "wall_thickness": "mm",
    "infill_density": "%",
    "nozzle_diameter": "mm",
    "shape": "code",
    "ra": "um",
}


class Provenance(str, enum.Enum):
    LITERATURE = "literature"
    EXPERIMENTAL = "experimental"


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise SchemaError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True, slots=True)
class PrintSample:
    """Process parameters of one printed specimen plus its measured Ra.

    ``ra`` is None for pure prediction inputs.
    """

    layer_height: float
    printing_speed: float
    printing_temperature: float
    wall_thickness: float
    infill_density: float
    nozzle_diameter: float
    shape: int = 0
    ra: Optional[float] = None

    def __post_init__(self) -> None:
        for name in FEATURES:
            value = getattr(self, name)
            if value is None:
                raise SchemaError(f"missing required field '{name}'")
            _check_finite(name, float(value))
        for name in ("layer_height", "printing_speed", "wall_thickness", "nozzle_diameter"):
            if getattr(self, name) <= 0:
                raise SchemaError(f"{name} must be > 0, got {getattr(self, name)!r}")
        if not 0 <= self.infill_density <= 100:
            raise SchemaError(f"infill_density must be in [0, 100], got {self.infill_density!r}")
        if int(self.shape) != self.shape or self.shape < 0:
            raise SchemaError(f"shape must be a non-negative integer code, got {self.shape!r}")
        if self.ra is not None:
            _check_finite("ra", float(self.ra))
            if self.ra <= 0:
                raise SchemaError(f"ra must be > 0, got {self.ra!r}")

    @property
    def has_target(self) -> bool:
        return self.ra is not None


def encode(sample: PrintSample) -> FloatArray:
    """Numeric feature vector in ``FEATURES`` order; shape is its integer code."""
    values = []
    for name in FEATURES:
        value = getattr(sample, name, None)
        if value is None:
            raise SchemaError(f"missing required field '{name}'")
        values.append(float(value))
    return np.array(values, dtype=np.float64)


def check_vector(x: Sequence[float] | FloatArray) -> FloatArray:
    """Validate a single feature vector (arity and finiteness)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != N_FEATURES:
        raise SchemaError(f"feature vector must have {N_FEATURES} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError("feature vector contains non-finite values")
    return arr


def check_matrix(X: FloatArray, n_features: int = N_FEATURES) -> FloatArray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != n_features:
        raise SchemaError(f"feature matrix must have {n_features} columns, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise SchemaError("feature matrix contains non-finite values")
    return arr


@dataclass(frozen=True, slots=True)
class Dataset:
    """Ordered, validated collection of samples from one provenance."""

    samples: tuple[PrintSample, ...]
    provenance: Provenance
    source_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "source_labels", tuple(self.source_labels))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if len(self.source_labels) != len(self.samples):
            raise SchemaError("source_labels must have one entry per sample")
        if len({s.has_target for s in self.samples}) > 1:
            raise SchemaError("samples mix rows with and without ra")

    @classmethod
    def from_samples(cls, samples: Sequence[PrintSample], provenance: Provenance | str,
                     source: str | Sequence[str] = "") -> "Dataset":
        labels = [source] * len(samples) if isinstance(source, str) else list(source)
        return cls(tuple(samples), Provenance(provenance), tuple(labels))

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[PrintSample]:
        return iter(self.samples)

    def __getitem__(self, i: int) -> PrintSample:
        return self.samples[i]

    @property
    def has_target(self) -> bool:
        return bool(self.samples) and self.samples[0].has_target

    def require_nonempty(self) -> None:
        if not self.samples:
            raise EmptyDatasetError("dataset is empty")

    def features(self) -> FloatArray:
        """(n, 7) design matrix."""
        if not self.samples:
            return np.empty((0, N_FEATURES))
        return np.vstack([encode(s) for s in self.samples])

    def target(self) -> FloatArray:
        if self.samples and not self.has_target:
            raise SchemaError("dataset has no ra column")
        return np.array([s.ra for s in self.samples], dtype=np.float64)

    def arrays(self) -> tuple[FloatArray, FloatArray]:
        self.require_nonempty()
        return self.features(), self.target()

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.samples[i] for i in indices), self.provenance,
                       tuple(self.source_labels[i] for i in indices))


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    """One forecast next to its measured value.

    ``baseline`` is the training-target mean of the model that produced the
    forecast; it is the reference used by prior-relative RAE.
    """

    actual: float
    forecast: float
    sample_index: int
    baseline: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.actual > 0:
            raise SchemaError(f"actual must be > 0, got {self.actual!r}")
        if not math.isfinite(self.forecast):
            raise SchemaError(f"forecast must be finite, got {self.forecast!r}")

    @property
    def abs_error(self) -> float:
        return abs(self.forecast - self.actual)


def sample_field_names() -> tuple[str, ...]:
    return tuple(f.name for f in fields(PrintSample))
