"""
Test helpers: closeness assertions and hypothesis strategies.
"""
from hypothesis import strategies as st

from summary_merge.models import SampleSummary
from summary_merge.services import relative_error


def assert_close(actual, expected, rel, floor=0.0):
    """
    Assert |actual - expected| <= rel * max(|expected|, floor).

    The floor is the natural magnitude of the data (a mean's scale, or a
    second raw moment for m2 and variance) for references near zero.
    """
    error = relative_error(actual, expected, floor)
    assert error <= rel, (
        f"{actual!r} vs {expected!r}: relative error {error:.3e} exceeds {rel:.0e}"
    )


def second_moment_scale(*parts: SampleSummary) -> float:
    """Sum of squared observations across parts, m2 + n * mean^2 each."""
    return sum(p.m2 + p.n * p.mean ** 2 for p in parts)


def variance_floor(*parts: SampleSummary) -> float:
    n = sum(p.n for p in parts)
    return second_moment_scale(*parts) / max(n - 1, 1)


def mean_floor(*parts: SampleSummary) -> float:
    return max((abs(p.mean) for p in parts), default=0.0)


def _benign(bound):
    # zero, or far enough from zero that squares stay normal
    return st.floats(-bound, bound, allow_nan=False, allow_infinity=False).filter(
        lambda v: v == 0 or abs(v) >= 1e-6
    )


@st.composite
def summaries(draw, min_n=0, max_n=50, mean_bound=1e3, sd_max=1e3):
    """Valid summaries with benign magnitudes."""
    n = draw(st.integers(min_n, max_n))
    if n == 0:
        return SampleSummary()
    mean = draw(_benign(mean_bound))
    if n == 1:
        return SampleSummary(n=1, mean=mean)
    sd = abs(draw(_benign(sd_max)))
    return SampleSummary(n=n, mean=mean, m2=(n - 1) * sd * sd)
