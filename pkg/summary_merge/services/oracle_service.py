"""
Summary Merge - Oracle Service
Brute-force reference summaries computed from raw values, plus the
seeded dataset generators used by the property tests.
"""
import math
from typing import Iterable, Optional, Tuple

import numpy as np

from ..exceptions import NumericOverflowError
from ..models import PowerSums, RawDataset, SampleSummary


class OracleService:
    """Definitional (two-pass, compensated) statistics over raw data."""

    @staticmethod
    def dataset(values: Iterable[float]) -> RawDataset:
        return RawDataset(values=tuple(float(v) for v in values))

    def summarize(self, data: RawDataset) -> SampleSummary:
        """
        Summary of raw data by the defining formulas.

        The mean comes from an exactly rounded sum; m2 is a second pass
        over the deviations, also summed with math.fsum.
        """
        n = len(data)
        if n == 0:
            return SampleSummary()

        values = data.as_array()
        try:
            mean = math.fsum(values) / n
            if n == 1:
                return SampleSummary(n=1, mean=mean, m2=0.0)

            with np.errstate(over="ignore"):
                deviations = values - mean
                m2 = math.fsum(deviations * deviations)
        except OverflowError as e:
            raise NumericOverflowError(f"raw data sums overflow: {e}") from e
        if not math.isfinite(m2):
            raise NumericOverflowError("raw data m2 overflows the floating point range")
        return SampleSummary(n=n, mean=mean, m2=m2)

    def concat_summarize(self, x: RawDataset, y: RawDataset) -> SampleSummary:
        """Summary of the multiset union x followed by y."""
        return self.summarize(x.concat(y))

    @staticmethod
    def power_sums(data: RawDataset) -> PowerSums:
        """(n, sum of x, sum of x^2), each summed with math.fsum."""
        if len(data) == 0:
            return PowerSums()
        values = data.as_array()
        try:
            with np.errstate(over="ignore"):
                total, total_sq = math.fsum(values), math.fsum(values * values)
        except OverflowError as e:
            raise NumericOverflowError(f"raw data sums overflow: {e}") from e
        if not math.isfinite(total_sq):
            raise NumericOverflowError("sum of squares overflows the floating point range")
        return PowerSums(n=len(values), sum=total, sum_sq=total_sq)

    def random_dataset(
        self,
        rng: np.random.Generator,
        size: int,
        low: float = -1e3,
        high: float = 1e3
    ) -> RawDataset:
        """Values uniform on [low, high)."""
        return self.dataset(rng.uniform(low, high, size=size))

    def shifted_dataset(
        self,
        rng: np.random.Generator,
        size: int,
        offset: float = 1e8,
        spread: float = 0.5
    ) -> RawDataset:
        """
        Tightly clustered values far from zero.

        Values sit on a 1/16 grid as mirrored pairs around a grid centre
        near offset, so the group mean is exactly representable and
        only the merge kernel can lose precision. An odd size adds the
        centre itself.
        """
        grid = 1.0 / 16.0
        centre = offset + grid * int(rng.integers(-16, 17))
        half_widths = np.round(np.abs(rng.normal(0.0, spread, size=size // 2)) / grid) * grid

        values = []
        for width in half_widths:
            values.extend((centre - width, centre + width))
        if size % 2:
            values.append(centre)
        rng.shuffle(values)
        return self.dataset(values)

    def random_split(
        self,
        rng: np.random.Generator,
        max_size: int = 50,
        min_union: int = 2
    ) -> Tuple[RawDataset, RawDataset]:
        """Two benign datasets of sizes in [0, max_size] with a large enough union."""
        while True:
            x_size, y_size = (int(s) for s in rng.integers(0, max_size + 1, size=2))
            if x_size + y_size >= min_union:
                return self.random_dataset(rng, x_size), self.random_dataset(rng, y_size)


def relative_error(actual: float, expected: float, floor: float = 0.0) -> float:
    """
    |actual - expected| / max(|expected|, floor).

    Equal values give 0; a zero denominator with unequal values gives inf.
    """
    if actual == expected:
        return 0.0
    denominator = max(abs(expected), floor)
    if denominator == 0:
        return math.inf
    return abs(actual - expected) / denominator


def mean_rounding_allowance(
    x: SampleSummary,
    y: SampleSummary,
    union: SampleSummary
) -> float:
    """
    Relative variance error any merge of x and y inherits from their means.

    Each group mean is a rounded double, so their difference d carries an
    error e of up to 2 * (ulp(x.mean) + ulp(y.mean)), and the between-group
    term d^2 * R*A / (R + A) moves by up to (2|d| + e) * e * R*A / (R + A).
    Negligible for benign data; it dominates when |mean| / sd is near 1e8.
    """
    if x.is_empty or y.is_empty or union.m2 == 0:
        return 0.0
    error = 2.0 * (math.ulp(x.mean) + math.ulp(y.mean))
    delta = abs(y.mean - x.mean)
    weight = x.n * y.n / union.n
    return (2.0 * delta + error) * error * weight / union.m2


# Singleton instance
_oracle_service: Optional[OracleService] = None


def get_oracle_service() -> OracleService:
    """Get the oracle service singleton."""
    global _oracle_service
    if _oracle_service is None:
        _oracle_service = OracleService()
    return _oracle_service
