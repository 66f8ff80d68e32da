"""CSV ingestion, validation and the bundled experimental dataset."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .core import FEATURES, Dataset, PrintSample, Provenance
from .errors import EmptyDatasetError, IngestIOError, SchemaError

# canonical CSV column -> PrintSample field
COLUMNS: dict[str, str] = {
    "layer_height_mm": "layer_height",
    "printing_speed_mm_s": "printing_speed",
    "printing_temp_c": "printing_temperature",
    "wall_thickness_mm": "wall_thickness",
    "infill_density_pct": "infill_density",
    "nozzle_diameter_mm": "nozzle_diameter",
    "shape": "shape",
    "ra_um": "ra",
    "source": "source",
}
HEADER: tuple[str, ...] = tuple(COLUMNS)
FEATURE_COLUMNS: tuple[str, ...] = HEADER[:7]
OPTIONAL_COLUMNS = {"ra_um", "source"}

EXPERIMENTAL_CSV = "experimental.csv"

# Experimental plan: (printer, layer height mm, speed mm/s, temperature C, wall mm).
# Infill 20 %, nozzle 0.4 mm and cylindrical specimens throughout.
EXPERIMENTAL_PLAN: tuple[tuple[str, float, float, float, float], ...] = (
    ("US5", 0.15, 60, 200, 2),
    ("US5", 0.23, 60, 200, 2),
    ("US5", 0.30, 60, 200, 2),
    ("US5", 0.23, 60, 215, 2),
    ("US5", 0.23, 60, 230, 2),
    ("US5", 0.23, 60, 200, 1),
    ("US5", 0.23, 60, 200, 3),
    ("US5", 0.23, 40, 200, 2),
    ("U3", 0.15, 60, 200, 2),
    ("U3", 0.23, 60, 200, 2),
    ("U3", 0.30, 60, 200, 2),
    ("U3", 0.23, 60, 215, 2),
    ("U3", 0.23, 60, 230, 2),
    ("U3", 0.23, 60, 200, 1),
    ("U3", 0.23, 60, 200, 3),
    ("U3", 0.23, 40, 200, 2),
)
EXPERIMENTAL_INFILL = 20.0
EXPERIMENTAL_NOZZLE = 0.4
EXPERIMENTAL_SHAPE = 0

# Ra (um) at the eight measuring positions, 45 degrees apart, per plan row.
EXPERIMENTAL_RA: tuple[tuple[float, ...], ...] = (
    (8.64, 9.39, 9.22, 9.84, 9.70, 8.53, 8.84, 9.28),
    (15.70, 15.95, 15.83, 16.63, 16.34, 16.26, 16.22, 16.33),
    (22.61, 22.76, 22.33, 21.89, 20.87, 22.17, 22.11, 22.52),
    (15.28, 15.64, 15.86, 16.77, 14.98, 15.16, 15.95, 16.15),
    (16.29, 16.35, 16.53, 15.51, 16.99, 15.26, 15.91, 16.55),
    (15.70, 15.52, 15.53, 14.81, 16.58, 15.82, 15.37, 15.82),
    (15.14, 15.44, 14.93, 15.76, 15.83, 14.48, 15.61, 15.51),
    (15.68, 16.30, 16.19, 17.01, 15.95, 15.30, 16.62, 16.18),
    (10.19, 11.79, 11.29, 11.87, 10.90, 10.84, 9.55, 10.53),
    (17.62, 18.57, 19.74, 18.14, 16.10, 16.81, 16.79, 17.29),
    (21.65, 21.90, 21.98, 22.00, 21.14, 22.08, 21.99, 21.41),
    (17.10, 16.36, 17.65, 18.44, 16.61, 18.31, 15.66, 18.27),
    (17.55, 18.84, 17.60, 17.26, 16.06, 15.76, 15.55, 17.73),
    (26.49, 27.02, 26.25, 26.00, 22.70, 21.57, 21.47, 21.81),
    (17.17, 17.31, 18.31, 16.97, 16.11, 17.44, 16.25, 17.42),
    (18.09, 18.72, 19.03, 18.53, 17.09, 16.89, 17.80, 18.97),
)
# Published per-sample averages, kept for comparison against recomputed means.
EXPERIMENTAL_AVG_RA: tuple[float, ...] = (
    9.18, 16.16, 22.03, 15.72, 16.17, 15.64, 15.34, 16.15,
    10.87, 17.63, 21.77, 17.30, 16.99, 24.16, 17.12, 18.14,
)


@dataclass(frozen=True)
class Rejection:
    row: int  # line number in the file, header is line 1
    reason: str  # machine-readable code, e.g. "missing_ra", "invalid_value"
    detail: str = ""

    def __str__(self) -> str:
        text = f"row {self.row}: {self.reason}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass
class IngestReport:
    provenance: Provenance
    accepted_rows: int = 0
    rejected_rows: list[Rejection] = field(default_factory=list)
    path: Optional[str] = None

    @property
    def total_rows(self) -> int:
        return self.accepted_rows + len(self.rejected_rows)

    @property
    def ok(self) -> bool:
        return not self.rejected_rows

    def reason_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.rejected_rows:
            counts[r.reason] = counts.get(r.reason, 0) + 1
        return counts


def _parse_number(text: str) -> float:
    return float(text.strip().replace(",", "."))


def _parse_row(row: dict[str, str], require_ra: bool) -> tuple[PrintSample, str]:
    """Returns the sample and its source label, or raises _RowError."""
    values: dict[str, object] = {}
    for column in FEATURE_COLUMNS:
        name = COLUMNS[column]
        raw = (row.get(column) or "").strip()
        if not raw:
            raise _RowError("missing_field", name)
        try:
            number = _parse_number(raw)
        except ValueError:
            raise _RowError("non_numeric", f"{name}={raw!r}") from None
        if not math.isfinite(number):
            raise _RowError("non_numeric", f"{name}={raw!r}")
        if name == "shape":
            if number != int(number):
                raise _RowError("invalid_value", f"shape={raw!r} is not an integer code")
            number = int(number)
        values[name] = number
    raw_ra = (row.get("ra_um") or "").strip()
    if raw_ra:
        try:
            values["ra"] = _parse_number(raw_ra)
        except ValueError:
            raise _RowError("non_numeric", f"ra={raw_ra!r}") from None
    elif require_ra:
        raise _RowError("missing_ra", "")
    try:
        sample = PrintSample(**values)
    except SchemaError as exc:
        raise _RowError("invalid_value", str(exc)) from None
    return sample, (row.get("source") or "").strip()


class _RowError(Exception):
    def __init__(self, reason: str, detail: str):
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


def read_csv_text(text: str, provenance: Provenance | str, *, require_ra: bool = True,
                  path: Optional[str] = None) -> tuple[Dataset, IngestReport]:
    provenance = Provenance(provenance)
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise SchemaError("file has no header row")
    # semicolon-delimited files are European style, commas are decimal marks there
    delimiter = ";" if ";" in lines[0] else ","
    reader = csv.DictReader(io.StringIO(text), delimiter=delimiter)
    header = [h.strip() for h in (reader.fieldnames or [])]
    unknown = [h for h in header if h not in COLUMNS]
    if unknown:
        raise SchemaError(f"unknown column(s): {', '.join(unknown)}; expected {', '.join(HEADER)}")
    missing = [c for c in HEADER if c not in header and c not in OPTIONAL_COLUMNS]
    if require_ra and "ra_um" not in header:
        missing.append("ra_um")
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}")
    reader.fieldnames = header

    report = IngestReport(provenance=provenance, path=path)
    samples: list[PrintSample] = []
    labels: list[str] = []
    for row in reader:
        line_no = reader.line_num
        if None in row:
            report.rejected_rows.append(Rejection(line_no, "wrong_arity", "too many values"))
            continue
        if all(not (v or "").strip() for v in row.values()):
            report.rejected_rows.append(Rejection(line_no, "blank_row"))
            continue
        try:
            sample, label = _parse_row(row, require_ra)
        except _RowError as exc:
            report.rejected_rows.append(Rejection(line_no, exc.reason, exc.detail))
            continue
        samples.append(sample)
        labels.append(label or ("lab" if provenance is Provenance.EXPERIMENTAL else ""))
    report.accepted_rows = len(samples)
    if not samples:
        err = EmptyDatasetError(
            f"no valid rows in {path or 'input'}: {len(report.rejected_rows)} of "
            f"{report.total_rows} rejected")
        err.report = report  # type: ignore[attr-defined]
        raise err
    if len({s.has_target for s in samples}) > 1:
        raise SchemaError("file mixes rows with and without ra_um")
    return Dataset(tuple(samples), provenance, tuple(labels)), report


def load_csv(path: str | Path, provenance: Provenance | str = Provenance.LITERATURE, *,
             require_ra: bool = True) -> tuple[Dataset, IngestReport]:
    """Load and validate a canonical-header CSV file.

    Invalid rows are rejected with a reason code in the report rather than
    dropped silently. With ``require_ra=False`` the ``ra_um`` column may be
    absent (prediction inputs).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestIOError(f"cannot read {path}: {exc}") from exc
    return read_csv_text(text, provenance, require_ra=require_ra, path=str(path))


def build_experimental_dataset() -> Dataset:
    """The 16 plan rows x 8 measuring positions = 128 samples, row-major."""
    samples = []
    labels = []
    for (printer, lh, speed, temp, wall), readings in zip(EXPERIMENTAL_PLAN, EXPERIMENTAL_RA):
        for ra in readings:
            samples.append(PrintSample(lh, speed, temp, wall, EXPERIMENTAL_INFILL,
                                       EXPERIMENTAL_NOZZLE, EXPERIMENTAL_SHAPE, ra))
            labels.append("lab")
    return Dataset(tuple(samples), Provenance.EXPERIMENTAL, tuple(labels))


def format_number(value: float) -> str:
    return repr(float(value)) if not float(value).is_integer() else str(int(value))


def to_csv_text(ds: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    with_ra = ds.has_target
    writer.writerow([c for c in HEADER if with_ra or c != "ra_um"])
    for sample, label in zip(ds.samples, ds.source_labels):
        row = [format_number(getattr(sample, COLUMNS[c])) for c in FEATURE_COLUMNS]
        if with_ra:
            row.append(format_number(sample.ra))
        row.append(label)
        writer.writerow(row)
    return buf.getvalue()


def write_csv(ds: Dataset, path: str | Path) -> None:
    try:
        Path(path).write_text(to_csv_text(ds), encoding="utf-8")
    except OSError as exc:
        raise IngestIOError(f"cannot write {path}: {exc}") from exc


def bundled_experimental_path() -> Path:
    return Path(str(resources.files("roughness") / "data" / EXPERIMENTAL_CSV))


@dataclass(frozen=True)
class FeatureSummary:
    minimum: float
    maximum: float
    mean: float


@dataclass(frozen=True)
class DatasetSummary:
    n: int
    features: dict[str, FeatureSummary]
    ra: Optional[FeatureSummary]

    @property
    def ra_range(self) -> tuple[float, float]:
        if self.ra is None:
            raise SchemaError("dataset has no ra column")
        return self.ra.minimum, self.ra.maximum


def summarize(ds: Dataset) -> DatasetSummary:
    if len(ds) == 0:
        raise EmptyDatasetError("cannot summarize an empty dataset")
    X = ds.features()

    def stats(col) -> FeatureSummary:
        return FeatureSummary(float(col.min()), float(col.max()), float(col.mean()))

    per_feature = {name: stats(X[:, j]) for j, name in enumerate(FEATURES)}
    ra = stats(ds.target()) if ds.has_target else None
    return DatasetSummary(len(ds), per_feature, ra)
