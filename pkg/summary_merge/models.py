"""
Summary Merge - Pydantic Models
"""
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, model_validator

from .config import get_settings

_settings = get_settings()


class Kernel(str, Enum):
    """Merge kernels."""
    TEXTBOOK = "textbook"
    STABLE = "stable"


class OutputFormat(str, Enum):
    """Rendered output formats."""
    TABLE = "table"
    JSONL = "jsonl"


class InputFormat(str, Enum):
    """Study record input formats."""
    CSV = "csv"
    JSONL = "jsonl"


class SampleSummary(BaseModel):
    """
    A dataset reduced to its size, mean and sum of squared deviations.

    The empty summary (n=0, mean=0, m2=0) is the identity of every merge.
    Variance is a derived view and is None below two observations.
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(default=0, ge=0)
    mean: float = Field(default=0.0, allow_inf_nan=False)
    m2: float = Field(default=0.0, ge=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def check_degenerate_sizes(self) -> "SampleSummary":
        if self.n == 0 and (self.mean != 0.0 or self.m2 != 0.0):
            raise ValueError("empty summary must have mean = 0 and m2 = 0")
        if self.n == 1 and self.m2 != 0.0:
            raise ValueError("singleton summary must have m2 = 0")
        return self

    @property
    def is_empty(self) -> bool:
        return self.n == 0

    @property
    def sample_variance(self) -> Optional[float]:
        """Bessel-corrected variance, m2 / (n - 1)."""
        if self.n < 2:
            return None
        return self.m2 / (self.n - 1)

    @property
    def sample_sd(self) -> Optional[float]:
        variance = self.sample_variance
        return None if variance is None else math.sqrt(variance)

    @property
    def population_variance(self) -> Optional[float]:
        """Divisor-n view; never used by the merge algebra."""
        if self.n == 0:
            return None
        return self.m2 / self.n


class PowerSums(BaseModel):
    """Raw power sums (n, sum of x, sum of x squared)."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(default=0, ge=0)
    sum: float = Field(default=0.0, allow_inf_nan=False)
    sum_sq: float = Field(default=0.0, ge=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def check_empty(self) -> "PowerSums":
        if self.n == 0 and (self.sum != 0.0 or self.sum_sq != 0.0):
            raise ValueError("empty power sums must be zero")
        return self


class MergeReport(BaseModel):
    """
    Merge result with the cross-group contribution to m2.

    combined.m2 = m2x + m2y + between_term holds exactly for the stable
    kernel and up to rounding for the textbook kernel.
    """
    model_config = ConfigDict(frozen=True)

    combined: SampleSummary
    between_term: float
    kernel: Kernel


class RawDataset(BaseModel):
    """Ordered finite real values; oracle input only."""
    model_config = ConfigDict(frozen=True)

    values: Tuple[FiniteFloat, ...] = ()

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def concat(self, other: "RawDataset") -> "RawDataset":
        return RawDataset(values=self.values + other.values)


class StudyRecord(BaseModel):
    """A labeled summary as ingested from a study table."""
    model_config = ConfigDict(frozen=True)

    label: str = Field(min_length=1)
    summary: SampleSummary

    @property
    def sd(self) -> Optional[float]:
        return self.summary.sample_sd

    @property
    def variance(self) -> Optional[float]:
        return self.summary.sample_variance


class RunConfig(BaseModel):
    """Per-invocation CLI choices."""
    model_config = ConfigDict(frozen=True)

    kernel: Kernel = Kernel(_settings.DEFAULT_KERNEL)
    variance_input: bool = False
    output_format: OutputFormat = OutputFormat.TABLE
    precision: int = Field(
        default=_settings.DEFAULT_PRECISION,
        ge=_settings.MIN_PRECISION,
        le=_settings.MAX_PRECISION
    )


class KernelCheck(BaseModel):
    """One kernel's merged summary judged against the oracle."""
    kernel: Kernel
    report: MergeReport
    mean_error: float
    variance_error: float
    tolerance: float
    variance_tolerance: float
    within_tolerance: bool
    judged: bool = True


class CheckReport(BaseModel):
    """Outcome of comparing both kernels with the concatenation oracle."""
    oracle: SampleSummary
    x: SampleSummary
    y: SampleSummary
    results: List[KernelCheck]
    selected: Kernel
    passed: bool


class CommandResult(BaseModel):
    """Rendered output of one subcommand and its exit code."""
    output: str
    exit_code: int = 0
