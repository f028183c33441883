"""
Summary Merge - Error Types
Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional


class SummaryMergeError(Exception):
    """Base class for all summary-merge failures."""

    exit_code: int = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class MalformedInputError(SummaryMergeError):
    """Input that cannot be read or parsed into valid records."""

    exit_code = 1

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        field: Optional[str] = None
    ):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


class EmptyInputError(SummaryMergeError):
    """Nothing to combine, or a statistic of an empty union."""

    exit_code = 1


class UndefinedVarianceError(SummaryMergeError):
    """A variance was supplied or requested where it cannot exist."""

    exit_code = 1


class InfeasibleRecoveryError(SummaryMergeError):
    """The claimed total leaves no elements for the missing group."""

    exit_code = 2


class InconsistentSummaryError(SummaryMergeError):
    """Summaries that no real dataset could have produced."""

    exit_code = 2

    def __init__(self, message: str, minimal_variance: Optional[float] = None):
        super().__init__(message)
        self.minimal_variance = minimal_variance


class NumericOverflowError(SummaryMergeError):
    """Finite inputs whose statistics leave the double range."""

    exit_code = 1
