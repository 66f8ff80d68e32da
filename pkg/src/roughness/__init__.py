"""Surface roughness (Ra) prediction for material-extrusion printed parts."""

from .core import FEATURES, Dataset, PredictionRecord, PrintSample, Provenance, encode
from .ingest import build_experimental_dataset, load_csv, summarize

__version__ = "0.1.0"

__all__ = [
    "FEATURES", "Dataset", "PredictionRecord", "PrintSample", "Provenance", "encode",
    "build_experimental_dataset", "load_csv", "summarize",
]
