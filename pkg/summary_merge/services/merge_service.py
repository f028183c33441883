"""
Summary Merge - Merge Service
Pooled mean/variance algebra over (n, mean, m2) summaries: two merge
kernels, k-way folds, and recovery of a missing subgroup.
"""
import logging
import math
from typing import List, Optional, Sequence

from ..config import get_settings
from ..exceptions import (
    EmptyInputError,
    InconsistentSummaryError,
    InfeasibleRecoveryError,
    MalformedInputError,
    NumericOverflowError,
    UndefinedVarianceError,
)
from ..models import Kernel, MergeReport, PowerSums, SampleSummary

logger = logging.getLogger(__name__)


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise NumericOverflowError(f"{what} overflows the floating point range")
    return value


class MergeService:
    """Service for combining and splitting sample summaries."""

    def __init__(self):
        self.settings = get_settings()

    @staticmethod
    def empty() -> SampleSummary:
        """The identity summary."""
        return SampleSummary()

    @staticmethod
    def singleton(value: float) -> SampleSummary:
        if not math.isfinite(value):
            raise MalformedInputError("value must be finite", field="mean")
        return SampleSummary(n=1, mean=value, m2=0.0)

    def from_stats(self, n: int, mean: float, variance: float) -> SampleSummary:
        """
        Build a summary from a reported size, mean and sample variance.

        Args:
            n: Number of observations (at least 2)
            mean: Sample mean
            variance: Bessel-corrected sample variance

        Returns:
            SampleSummary with m2 = (n - 1) * variance
        """
        if not math.isfinite(mean):
            raise MalformedInputError("mean must be finite", field="mean")
        if n < 2:
            raise UndefinedVarianceError(
                f"variance is undefined for n = {n}; it needs at least 2 observations"
            )
        if not math.isfinite(variance) or variance < 0:
            raise UndefinedVarianceError(
                f"variance must be a finite non-negative number, got {variance}"
            )
        return SampleSummary(n=n, mean=mean, m2=_finite((n - 1) * variance, "m2"))

    def from_sd(self, n: int, mean: float, sd: float) -> SampleSummary:
        """Build a summary from a reported standard deviation."""
        if not math.isfinite(sd) or sd < 0:
            raise UndefinedVarianceError(
                f"standard deviation must be a finite non-negative number, got {sd}"
            )
        return self.from_stats(n, mean, _finite(sd * sd, "variance"))

    @staticmethod
    def sum_of_squares(s: SampleSummary) -> float:
        """Sum of squared observations, m2 + n * mean^2 (0 when empty)."""
        if s.n == 0:
            return 0.0
        return _finite(s.m2 + s.n * (s.mean * s.mean), "sum of squares")

    def to_power_sums(self, s: SampleSummary) -> PowerSums:
        return PowerSums(n=s.n, sum=_finite(s.n * s.mean, "sum"), sum_sq=self.sum_of_squares(s))

    @staticmethod
    def merge_power_sums(a: PowerSums, b: PowerSums) -> PowerSums:
        """Power sums of a union: every component adds."""
        return PowerSums(
            n=a.n + b.n,
            sum=_finite(a.sum + b.sum, "sum"),
            sum_sq=_finite(a.sum_sq + b.sum_sq, "sum of squares")
        )

    def variance_from_power_sums(self, ps: PowerSums) -> float:
        """
        Sample variance from raw power sums.

        Computes [sum_sq - n * (sum / n)^2] / (n - 1). Rounding-level
        negative numerators are clamped to 0.

        Raises:
            UndefinedVarianceError: n < 2
            InconsistentSummaryError: n * sum_sq < sum^2 beyond tolerance
        """
        if ps.n < 2:
            raise UndefinedVarianceError(
                f"variance is undefined for n = {ps.n}; it needs at least 2 observations"
            )

        gap = _finite(ps.n * ps.sum_sq - ps.sum * ps.sum, "n * sum_sq - sum^2")
        if gap < -self.settings.CLAMP_RTOL * max(1.0, ps.n * ps.sum_sq):
            raise InconsistentSummaryError(
                f"power sums violate n * sum_sq >= sum^2 "
                f"(n={ps.n}, sum={ps.sum!r}, sum_sq={ps.sum_sq!r})"
            )

        mean = ps.sum / ps.n
        numerator = ps.sum_sq - ps.n * (mean * mean)
        if numerator < 0:
            logger.debug("Clamping power-sum numerator %r to 0", numerator)
            numerator = 0.0
        return numerator / (ps.n - 1)

    @staticmethod
    def combined_mean(a: SampleSummary, b: SampleSummary) -> float:
        """Mean of the union, (R * x_mean + A * y_mean) / (R + A)."""
        total = a.n + b.n
        if total == 0:
            raise EmptyInputError("mean of an empty union is undefined")
        if b.n == 0 or a.mean == b.mean:
            return a.mean
        if a.n == 0:
            return b.mean
        return _finite((a.n * a.mean + b.n * b.mean) / total, "combined mean")

    def combine_textbook(self, a: SampleSummary, b: SampleSummary) -> MergeReport:
        """
        Merge two summaries with the expanded sums-of-squares formula.

        The numerator m2x + m2y + R*x^2 + A*y^2 - (R*x + A*y)^2 / (R + A)
        is evaluated left to right as written, so large means cancel
        the within-group terms. Use combine_stable for real workloads.

        between_term is evaluated on its own, so combined.m2 equals
        m2x + m2y + between_term only up to rounding.
        """
        if b.is_empty:
            return MergeReport(combined=a, between_term=0.0, kernel=Kernel.TEXTBOOK)
        if a.is_empty:
            return MergeReport(combined=b, between_term=0.0, kernel=Kernel.TEXTBOOK)

        r, k = a.n, b.n
        n = r + k
        mean = self.combined_mean(a, b)

        weighted = r * a.mean + k * b.mean
        cross = weighted * weighted / n
        between = _finite(r * (a.mean * a.mean) + k * (b.mean * b.mean) - cross, "between-group term")
        m2 = _finite(a.m2 + b.m2 + r * (a.mean * a.mean) + k * (b.mean * b.mean) - cross, "m2")

        if m2 < 0:
            logger.debug("Textbook kernel produced m2=%r; clamping to 0", m2)
            m2 = 0.0

        return MergeReport(
            combined=SampleSummary(n=n, mean=mean, m2=m2),
            between_term=between,
            kernel=Kernel.TEXTBOOK
        )

    @staticmethod
    def combine_stable(a: SampleSummary, b: SampleSummary) -> MergeReport:
        """
        Merge two summaries through the mean difference.

        mean = x + A * d / (R + A) and m2 = m2x + m2y + d^2 * R*A / (R + A)
        with d = y - x. No large terms are subtracted.
        """
        if b.is_empty:
            return MergeReport(combined=a, between_term=0.0, kernel=Kernel.STABLE)
        if a.is_empty:
            return MergeReport(combined=b, between_term=0.0, kernel=Kernel.STABLE)

        r, k = a.n, b.n
        n = r + k
        delta = b.mean - a.mean
        between = _finite(delta * delta * (r * k / n), "between-group term")

        return MergeReport(
            combined=SampleSummary(
                n=n,
                mean=_finite(a.mean + k * delta / n, "combined mean"),
                m2=_finite(a.m2 + b.m2 + between, "m2")
            ),
            between_term=between,
            kernel=Kernel.STABLE
        )

    def combine(
        self,
        a: SampleSummary,
        b: SampleSummary,
        kernel: Kernel = Kernel.STABLE
    ) -> MergeReport:
        if kernel == Kernel.TEXTBOOK:
            return self.combine_textbook(a, b)
        return self.combine_stable(a, b)

    def _non_empty(self, parts: Sequence[SampleSummary]) -> List[SampleSummary]:
        if not parts:
            raise EmptyInputError("nothing to combine")
        kept = [p for p in parts if not p.is_empty]
        if not kept:
            raise EmptyInputError("every summary to combine is empty")
        if len(kept) < len(parts):
            logger.debug("Dropped %d empty summaries", len(parts) - len(kept))
        return kept

    def combine_all(
        self,
        parts: Sequence[SampleSummary],
        kernel: Kernel = Kernel.STABLE
    ) -> MergeReport:
        """
        Left fold of pairwise merges in input order.

        between_term is the sum of every step's between term, so
        combined.m2 equals the parts' m2 plus between_term.
        """
        kept = self._non_empty(parts)

        combined = kept[0]
        between = 0.0
        for part in kept[1:]:
            step = self.combine(combined, part, kernel)
            combined = step.combined
            between += step.between_term

        return MergeReport(combined=combined, between_term=between, kernel=kernel)

    def combine_tree(
        self,
        parts: Sequence[SampleSummary],
        kernel: Kernel = Kernel.STABLE
    ) -> MergeReport:
        """Balanced pairwise fold; rounds differently from combine_all."""
        kept = self._non_empty(parts)

        def fold(items: List[SampleSummary]) -> MergeReport:
            if len(items) == 1:
                return MergeReport(combined=items[0], between_term=0.0, kernel=kernel)
            mid = len(items) // 2
            left = fold(items[:mid])
            right = fold(items[mid:])
            step = self.combine(left.combined, right.combined, kernel)
            return MergeReport(
                combined=step.combined,
                between_term=left.between_term + right.between_term + step.between_term,
                kernel=kernel
            )

        return fold(kept)

    def _missing_mean(self, total: SampleSummary, known: SampleSummary) -> float:
        if total.mean == known.mean:
            return total.mean
        return _finite(
            (total.n * total.mean - known.n * known.mean) / (total.n - known.n),
            "missing mean"
        )

    def minimal_total_variance(
        self,
        total: SampleSummary,
        known: SampleSummary
    ) -> Optional[float]:
        """
        Smallest total variance consistent with the known part, reached
        when the missing group has no dispersion.
        """
        if total.n <= known.n or total.n < 2:
            return None
        missing_n = total.n - known.n
        delta = self._missing_mean(total, known) - known.mean
        m2 = known.m2 + delta * delta * (known.n * missing_n / total.n)
        return m2 / (total.n - 1)

    def recover_component(
        self,
        total: SampleSummary,
        known: SampleSummary
    ) -> SampleSummary:
        """
        Solve for the summary of the group missing from a total.

        Args:
            total: Summary of the full dataset
            known: Summary of the part that is available

        Returns:
            Summary of the missing part

        Raises:
            InfeasibleRecoveryError: total.n <= known.n
            InconsistentSummaryError: the total cannot contain the known part
            NumericOverflowError: an intermediate leaves the double range
        """
        if total.n <= known.n:
            raise InfeasibleRecoveryError(
                f"total has {total.n} observations but the known part has "
                f"{known.n}; nothing is missing"
            )
        if known.is_empty:
            return total

        missing_n = total.n - known.n
        mean = self._missing_mean(total, known)
        delta = mean - known.mean
        between = _finite(delta * delta * (known.n * missing_n / total.n), "between-group term")
        m2 = total.m2 - known.m2 - between

        tolerance = self.settings.CLAMP_RTOL * max(1.0, total.m2, known.m2, between)
        if m2 < -tolerance:
            minimal = self.minimal_total_variance(total, known)
            raise InconsistentSummaryError(
                f"total cannot contain the known part: the missing group would "
                f"have m2 = {m2!r}; the minimal consistent total variance is "
                f"{minimal!r}",
                minimal_variance=minimal
            )
        if missing_n == 1:
            if m2 > tolerance:
                required = self.minimal_total_variance(total, known)
                raise InconsistentSummaryError(
                    f"a single missing observation has no dispersion; the total "
                    f"variance must be {required!r}",
                    minimal_variance=required
                )
            m2 = 0.0
        elif m2 < 0:
            logger.debug("Clamping recovered m2=%r to 0", m2)
            m2 = 0.0

        return SampleSummary(n=missing_n, mean=mean, m2=m2)


# Singleton instance
_merge_service: Optional[MergeService] = None


def get_merge_service() -> MergeService:
    """Get the merge service singleton."""
    global _merge_service
    if _merge_service is None:
        _merge_service = MergeService()
    return _merge_service
