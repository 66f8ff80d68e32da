import os
from pathlib import Path

import numpy as np
import pytest

from roughness.core import Dataset, PrintSample, Provenance
from roughness.ingest import build_experimental_dataset, load_csv

ROOT = Path(__file__).resolve().parents[1]


def literature_path() -> Path:
    env = os.environ.get("ROUGHNESS_DATA_DIR")
    base = Path(env) if env else ROOT / "data"
    return base / "literature.csv"


@pytest.fixture(scope="session")
def experimental():
    return build_experimental_dataset()


@pytest.fixture(scope="session")
def literature():
    path = literature_path()
    if not path.exists():
        pytest.skip(f"published literature dataset not found at {path}")
    ds, _ = load_csv(path, Provenance.LITERATURE)
    return ds


def make_dataset(X, y, provenance=Provenance.LITERATURE) -> Dataset:
    """Wrap raw arrays as samples; columns must respect the sample invariants."""
    samples = [PrintSample(*map(float, row[:6]), int(row[6]), float(t)) for row, t in zip(X, y)]
    return Dataset.from_samples(samples, provenance, "synthetic")


def random_design(rng: np.random.Generator, n: int) -> np.ndarray:
    """Feature matrix inside the sample invariants."""
    return np.column_stack([
        rng.uniform(0.05, 0.4, n),
        rng.uniform(20, 100, n),
        rng.uniform(180, 240, n),
        rng.uniform(0.5, 3.0, n),
        rng.uniform(0, 100, n),
        rng.uniform(0.2, 0.8, n),
        rng.integers(0, 3, n).astype(float),
    ])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
