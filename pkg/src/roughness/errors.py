"""Exception hierarchy shared across the package.

Each class carries a distinct CLI exit code so scripts can tell failure
modes apart.
"""

from __future__ import annotations


class RoughnessError(Exception):
    exit_code = 1


class IngestIOError(RoughnessError):
    """A data or model file could not be read or written."""

    exit_code = 3


class SchemaError(RoughnessError, ValueError):
    """Input does not match the canonical feature schema."""

    exit_code = 4


class EmptyDatasetError(SchemaError):
    exit_code = 4


class ConvergenceError(RoughnessError):
    """An iterative solver hit its iteration cap."""

    exit_code = 5

    def __init__(self, message: str, max_violation: float = float("nan")):
        super().__init__(message)
        self.max_violation = max_violation


class ParameterError(RoughnessError, ValueError):
    exit_code = 6


class PlanError(ParameterError):
    """Fold plan cannot be built for the requested k."""


class SingularityError(RoughnessError, ValueError):
    exit_code = 7

    def __init__(self, message: str, columns: tuple[str, ...] = ()):
        super().__init__(message)
        self.columns = columns


class DegenerateTargetError(RoughnessError, ValueError):
    """Metric undefined because actual values carry no spread."""

    exit_code = 7


class DomainError(RoughnessError, ValueError):
    """Metric undefined for a zero actual value."""

    exit_code = 7


class ModelStateError(RoughnessError):
    exit_code = 8


class FormatError(RoughnessError):
    """Model file is corrupt, truncated or of an unsupported version."""

    exit_code = 9


EXIT_CODES = {
    "rejected rows (validate)": 1,
    "I/O error": IngestIOError.exit_code,
    "schema / empty dataset": SchemaError.exit_code,
    "solver did not converge": ConvergenceError.exit_code,
    "bad parameter": ParameterError.exit_code,
    "degenerate data (singular fit, constant target)": SingularityError.exit_code,
    "model not fitted": ModelStateError.exit_code,
    "model file format": FormatError.exit_code,
}
