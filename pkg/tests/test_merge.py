"""
Summary Merge - Test Suite for the Merge Algebra
Worked examples, degenerate sizes and error paths of every operation.
"""
import math

import pytest
from pydantic import ValidationError

from summary_merge.exceptions import (
    EmptyInputError,
    InconsistentSummaryError,
    InfeasibleRecoveryError,
    MalformedInputError,
    NumericOverflowError,
    UndefinedVarianceError,
)
from summary_merge.models import Kernel, PowerSums, SampleSummary
from tests.helpers import assert_close


@pytest.fixture
def x_summary(merge_service):
    """{1, 2, 3}: n=3, mean=2, variance=1."""
    return merge_service.from_stats(3, 2.0, 1.0)


@pytest.fixture
def y_summary(merge_service):
    """{4, 6}: n=2, mean=5, variance=2."""
    return merge_service.from_stats(2, 5.0, 2.0)


class TestSampleSummary:
    """Test the summary model and its derived views."""

    def test_empty_is_identity_convention(self):
        """Empty summary has zero mean and m2 and no variance."""
        s = SampleSummary()
        assert s.is_empty
        assert s.sample_variance is None
        assert s.sample_sd is None
        assert s.population_variance is None

    def test_singleton_has_no_sample_variance(self):
        """n=1 reports variance as absent, never 0/0."""
        s = SampleSummary(n=1, mean=4.0)
        assert s.sample_variance is None
        assert s.population_variance == 0.0

    def test_views(self):
        """Sample, population and sd views follow m2."""
        s = SampleSummary(n=5, mean=3.2, m2=14.8)
        assert s.sample_variance == 14.8 / 4
        assert s.population_variance == 14.8 / 5
        assert s.sample_sd == math.sqrt(14.8 / 4)

    def test_rejects_negative_m2(self):
        with pytest.raises(ValidationError):
            SampleSummary(n=3, mean=0.0, m2=-1.0)

    def test_rejects_singleton_dispersion(self):
        with pytest.raises(ValidationError):
            SampleSummary(n=1, mean=0.0, m2=0.5)

    def test_rejects_non_finite_mean(self):
        with pytest.raises(ValidationError):
            SampleSummary(n=2, mean=math.inf, m2=0.0)

    def test_is_immutable(self):
        s = SampleSummary(n=2, mean=1.0, m2=1.0)
        with pytest.raises(ValidationError):
            s.n = 3


class TestFromStats:
    """Test construction from reported statistics."""

    def test_worked_example(self, merge_service):
        """(3, 2.0, 1.0) has m2 = 2."""
        assert merge_service.from_stats(3, 2.0, 1.0).m2 == 2.0

    def test_symmetric_pair(self, merge_service):
        """{-0.5, 0.5} as (2, 0.0, 0.5) has m2 = 0.5."""
        assert merge_service.from_stats(2, 0.0, 0.5).m2 == 0.5

    def test_constant_data(self, merge_service):
        """Zero variance gives zero m2 whatever the mean."""
        assert merge_service.from_stats(5, 123.25, 0.0).m2 == 0.0

    def test_variance_round_trip(self, merge_service):
        """sample_variance reproduces the supplied variance."""
        s = merge_service.from_stats(7, 1.5, 0.1)
        assert s.sample_variance == pytest.approx(0.1, rel=1e-15)

    def test_from_sd(self, merge_service):
        """Standard deviation input is squared."""
        s = merge_service.from_sd(2, 5.0, math.sqrt(2.0))
        assert s.sample_variance == pytest.approx(2.0, rel=1e-15)

    def test_rejects_small_n(self, merge_service):
        """Variance cannot be supplied for fewer than 2 observations."""
        with pytest.raises(UndefinedVarianceError):
            merge_service.from_stats(1, 0.0, 1.0)

    def test_rejects_negative_variance(self, merge_service):
        with pytest.raises(UndefinedVarianceError):
            merge_service.from_stats(4, 0.0, -0.5)


class TestSumOfSquares:
    """Test recovery of the sum of squared observations."""

    def test_worked_example(self, merge_service, x_summary):
        """1 + 4 + 9 = 14."""
        assert merge_service.sum_of_squares(x_summary) == 14.0

    def test_singleton(self, merge_service):
        assert merge_service.sum_of_squares(SampleSummary(n=1, mean=-3.5)) == 12.25

    def test_symmetric_pair(self, merge_service):
        s = merge_service.from_stats(2, 0.0, 0.5)
        assert merge_service.sum_of_squares(s) == 0.5

    def test_empty(self, merge_service):
        assert merge_service.sum_of_squares(SampleSummary()) == 0.0


class TestPowerSums:
    """Test the power-sum route to the variance."""

    def test_variance_worked_example(self, merge_service):
        assert merge_service.variance_from_power_sums(PowerSums(n=3, sum=6.0, sum_sq=14.0)) == 1.0

    def test_variance_symmetric_pair(self, merge_service):
        assert merge_service.variance_from_power_sums(PowerSums(n=2, sum=0.0, sum_sq=0.5)) == 0.5

    def test_variance_constant_data(self, merge_service):
        """Four copies of 2.5 have zero variance."""
        ps = PowerSums(n=4, sum=10.0, sum_sq=25.0)
        assert merge_service.variance_from_power_sums(ps) == 0.0

    def test_variance_needs_two(self, merge_service):
        with pytest.raises(UndefinedVarianceError):
            merge_service.variance_from_power_sums(PowerSums(n=1, sum=2.0, sum_sq=4.0))

    def test_cauchy_schwarz_violation(self, merge_service):
        """n * sum_sq < sum^2 cannot come from real data."""
        with pytest.raises(InconsistentSummaryError):
            merge_service.variance_from_power_sums(PowerSums(n=2, sum=10.0, sum_sq=1.0))

    def test_to_power_sums(self, merge_service, x_summary):
        ps = merge_service.to_power_sums(x_summary)
        assert (ps.n, ps.sum, ps.sum_sq) == (3, 6.0, 14.0)

    def test_merge_power_sums_adds(self, merge_service, x_summary, y_summary):
        """Sums of the union are sums of the parts; variance is 3.7."""
        merged = merge_service.merge_power_sums(
            merge_service.to_power_sums(x_summary),
            merge_service.to_power_sums(y_summary)
        )
        assert (merged.n, merged.sum, merged.sum_sq) == (5, 16.0, 66.0)
        assert_close(merge_service.variance_from_power_sums(merged), 3.7, 1e-12)

    def test_rejects_non_zero_empty(self):
        with pytest.raises(ValidationError):
            PowerSums(n=0, sum=1.0, sum_sq=1.0)


class TestCombinedMean:
    """Test the pooled mean."""

    def test_worked_example(self, merge_service, x_summary, y_summary):
        assert merge_service.combined_mean(x_summary, y_summary) == 3.2

    def test_equal_means_fixed_point(self, merge_service):
        a = merge_service.from_stats(3, 0.1, 1.0)
        b = merge_service.from_stats(7, 0.1, 4.0)
        assert merge_service.combined_mean(a, b) == 0.1

    def test_identity(self, merge_service):
        a = SampleSummary(n=4, mean=-2.75, m2=1.0)
        assert merge_service.combined_mean(a, SampleSummary()) == -2.75
        assert merge_service.combined_mean(SampleSummary(), a) == -2.75

    def test_empty_union(self, merge_service):
        with pytest.raises(EmptyInputError):
            merge_service.combined_mean(SampleSummary(), SampleSummary())


class TestCombineTextbook:
    """Test the kernel that keeps the expanded formula."""

    def test_worked_example(self, merge_service, x_summary, y_summary):
        """{1,2,3} and {4,6} pool to (5, 3.2, 3.7)."""
        report = merge_service.combine_textbook(x_summary, y_summary)
        assert report.kernel == Kernel.TEXTBOOK
        assert report.combined.n == 5
        assert report.combined.mean == 3.2
        assert_close(report.combined.sample_variance, 3.7, 1e-12)

    def test_duplicated_dataset(self, merge_service):
        """{0,2} twice pools to (4, 1.0, 4/3)."""
        s = merge_service.from_stats(2, 1.0, 2.0)
        report = merge_service.combine_textbook(s, s)
        assert report.combined.n == 4
        assert report.combined.mean == 1.0
        assert report.combined.sample_variance == pytest.approx(4 / 3, rel=1e-12)

    def test_identity(self, merge_service, x_summary):
        assert merge_service.combine_textbook(x_summary, SampleSummary()).combined == x_summary
        assert merge_service.combine_textbook(SampleSummary(), x_summary).combined == x_summary

    def test_between_term_decomposition(self, merge_service, x_summary, y_summary):
        """m2 = m2x + m2y + between, and between = R*A/(R+A) * d^2."""
        report = merge_service.combine_textbook(x_summary, y_summary)
        assert_close(report.between_term, 6 / 5 * 9, 1e-12)
        assert_close(report.combined.m2, x_summary.m2 + y_summary.m2 + report.between_term, 1e-12)

    def test_cancellation_at_large_offset(self, merge_service):
        """Within-group spread vanishes when |mean| / sd is 1e8."""
        s = merge_service.from_stats(2, 1e8, 0.5)
        report = merge_service.combine_textbook(s, s)
        error = abs(report.combined.sample_variance - 1 / 3) / (1 / 3)
        assert error > 1e-6


class TestCombineStable:
    """Test the production kernel."""

    def test_worked_example(self, merge_service, x_summary, y_summary):
        report = merge_service.combine_stable(x_summary, y_summary)
        assert report.kernel == Kernel.STABLE
        assert report.combined.n == 5
        assert report.combined.mean == 3.2
        assert_close(report.combined.sample_variance, 3.7, 1e-12)

    def test_large_offset(self, merge_service):
        """{1e8 - 0.5, 1e8 + 0.5} twice pools to (4, 1e8, 1/3)."""
        s = merge_service.from_stats(2, 1e8, 0.5)
        report = merge_service.combine_stable(s, s)
        assert report.combined.n == 4
        assert report.combined.mean == 1e8
        assert report.combined.sample_variance == 1 / 3

    def test_zero_between_term(self, merge_service):
        """Equal means add m2 exactly."""
        a = merge_service.from_stats(3, 7.0, 1.5)
        b = merge_service.from_stats(6, 7.0, 0.25)
        report = merge_service.combine_stable(a, b)
        assert report.between_term == 0.0
        assert report.combined.m2 == a.m2 + b.m2
        assert report.combined.mean == 7.0

    def test_singletons(self, merge_service):
        """Two single observations pool to their pair variance."""
        report = merge_service.combine_stable(
            merge_service.singleton(1.0), merge_service.singleton(4.0)
        )
        assert report.combined.n == 2
        assert report.combined.mean == 2.5
        assert report.combined.sample_variance == 4.5

    def test_identity_returns_operand(self, merge_service, y_summary):
        assert merge_service.combine_stable(y_summary, SampleSummary()).combined is y_summary
        assert merge_service.combine_stable(SampleSummary(), y_summary).combined is y_summary

    def test_dispatch(self, merge_service, x_summary, y_summary):
        assert merge_service.combine(x_summary, y_summary).kernel == Kernel.STABLE
        assert merge_service.combine(x_summary, y_summary, Kernel.TEXTBOOK).kernel == Kernel.TEXTBOOK


class TestCombineAll:
    """Test k-way folds."""

    def test_single_part(self, merge_service, x_summary):
        report = merge_service.combine_all([x_summary])
        assert report.combined == x_summary
        assert report.between_term == 0.0

    def test_two_parts(self, merge_service, x_summary, y_summary):
        report = merge_service.combine_all([x_summary, y_summary])
        assert report.combined.n == 5
        assert_close(report.combined.sample_variance, 3.7, 1e-12)

    def test_with_singletons(self, merge_service):
        """{0,2}, {0}, {2} pool to (4, 1.0, 4/3)."""
        parts = [
            merge_service.from_stats(2, 1.0, 2.0),
            merge_service.singleton(0.0),
            merge_service.singleton(2.0),
        ]
        for kernel in Kernel:
            report = merge_service.combine_all(parts, kernel)
            assert report.combined.n == 4
            assert_close(report.combined.mean, 1.0, 1e-12)
            assert_close(report.combined.sample_variance, 4 / 3, 1e-12)

    def test_drops_empty_parts(self, merge_service, x_summary, y_summary):
        with_empty = merge_service.combine_all([SampleSummary(), x_summary, SampleSummary(), y_summary])
        without = merge_service.combine_all([x_summary, y_summary])
        assert with_empty.combined == without.combined

    def test_between_terms_accumulate(self, merge_service):
        parts = [
            merge_service.from_stats(3, 2.0, 1.0),
            merge_service.from_stats(2, 5.0, 2.0),
            merge_service.from_stats(4, -1.0, 0.5),
        ]
        report = merge_service.combine_all(parts)
        assert_close(report.combined.m2, sum(p.m2 for p in parts) + report.between_term, 1e-12)

    def test_tree_fold_matches(self, merge_service, x_summary, y_summary):
        parts = [x_summary, y_summary, merge_service.singleton(10.0)]
        left = merge_service.combine_all(parts)
        tree = merge_service.combine_tree(parts)
        assert tree.combined.n == left.combined.n
        assert_close(tree.combined.sample_variance, left.combined.sample_variance, 1e-12)

    def test_empty_list(self, merge_service):
        with pytest.raises(EmptyInputError):
            merge_service.combine_all([])

    def test_only_empty_parts(self, merge_service):
        with pytest.raises(EmptyInputError):
            merge_service.combine_all([SampleSummary(), SampleSummary()])


class TestRecoverComponent:
    """Test solving for a missing subgroup."""

    def test_worked_example(self, merge_service, y_summary):
        """Removing {1,2,3} from the pooled (5, 3.2, 3.7) leaves {4,6}."""
        total = merge_service.from_stats(5, 3.2, 3.7)
        known = merge_service.from_stats(3, 2.0, 1.0)
        missing = merge_service.recover_component(total, known)
        assert missing.n == 2
        assert_close(missing.mean, 5.0, 1e-9)
        assert_close(missing.sample_variance, 2.0, 1e-9)

    def test_nothing_missing(self, merge_service, x_summary):
        with pytest.raises(InfeasibleRecoveryError):
            merge_service.recover_component(x_summary, x_summary)

    def test_known_larger_than_total(self, merge_service, x_summary, y_summary):
        with pytest.raises(InfeasibleRecoveryError):
            merge_service.recover_component(y_summary, x_summary)

    def test_equal_means(self, merge_service):
        """No between-group term: m2 subtracts directly."""
        total = merge_service.from_stats(4, 1.25, 2.0)
        known = merge_service.from_stats(2, 1.25, 1.0)
        missing = merge_service.recover_component(total, known)
        assert missing.n == 2
        assert missing.mean == 1.25
        assert missing.m2 == total.m2 - known.m2

    def test_missing_singleton(self, merge_service, x_summary):
        """A single missing value comes back with no variance."""
        total = merge_service.combine_stable(x_summary, merge_service.singleton(9.5)).combined
        missing = merge_service.recover_component(total, x_summary)
        assert missing.n == 1
        assert_close(missing.mean, 9.5, 1e-9)
        assert missing.m2 == 0.0
        assert missing.sample_sd is None

    def test_empty_known(self, merge_service, x_summary):
        assert merge_service.recover_component(x_summary, SampleSummary()) == x_summary

    def test_inconsistent_total(self, merge_service):
        """A total less dispersed than its known part is rejected."""
        total = SampleSummary(n=4, mean=0.0, m2=0.0)
        known = merge_service.from_stats(2, 0.0, 2.0)
        with pytest.raises(InconsistentSummaryError) as excinfo:
            merge_service.recover_component(total, known)
        assert excinfo.value.exit_code == 2
        assert excinfo.value.minimal_variance == pytest.approx(2 / 3)

    def test_singleton_with_spread_is_inconsistent(self, merge_service, x_summary):
        """One missing value cannot account for extra dispersion."""
        exact = merge_service.combine_stable(x_summary, merge_service.singleton(2.0)).combined
        inflated = SampleSummary(n=exact.n, mean=exact.mean, m2=exact.m2 + 5.0)
        with pytest.raises(InconsistentSummaryError):
            merge_service.recover_component(inflated, x_summary)

    def test_minimal_total_variance(self, merge_service, x_summary, y_summary):
        """Minimal total keeps the known spread plus the between term."""
        total = merge_service.combine_stable(x_summary, y_summary).combined
        minimal = merge_service.minimal_total_variance(total, x_summary)
        assert_close(minimal, (x_summary.m2 + 10.8) / 4, 1e-12)


class TestOverflow:
    """Finite inputs whose statistics leave the double range."""

    def test_variance_times_count(self, merge_service):
        with pytest.raises(NumericOverflowError):
            merge_service.from_stats(3, 0.0, 1e308)

    def test_sd_squared_times_count(self, merge_service):
        """sd^2 = 1e308 is finite; (n - 1) * sd^2 is not."""
        with pytest.raises(NumericOverflowError) as excinfo:
            merge_service.from_sd(3, 0.0, 1e154)
        assert excinfo.value.exit_code == 1

    @pytest.mark.parametrize("kernel", list(Kernel))
    def test_far_apart_means(self, merge_service, kernel):
        a = merge_service.from_stats(3, 1e200, 1.0)
        b = merge_service.from_stats(3, -1e200, 1.0)
        with pytest.raises(NumericOverflowError):
            merge_service.combine(a, b, kernel)

    def test_non_finite_singleton(self, merge_service):
        with pytest.raises(MalformedInputError):
            merge_service.singleton(math.inf)

    def test_recovery_mean(self, merge_service):
        total = SampleSummary(n=4, mean=1e308, m2=0.0)
        known = SampleSummary(n=2, mean=-1e308, m2=0.0)
        with pytest.raises(NumericOverflowError):
            merge_service.recover_component(total, known)

    def test_power_sums(self, merge_service):
        with pytest.raises(NumericOverflowError):
            merge_service.to_power_sums(SampleSummary(n=2, mean=1e200, m2=0.0))
