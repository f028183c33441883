"""
Shared fixtures for the summary-merge test suite.
"""
import numpy as np
import pytest

from summary_merge.services import MergeService, OracleService

# Fixed seeds so every randomized run reproduces
SEED_PAIRS = 20240611
SEED_SHIFTED = 31415
SEED_RECOVERY = 27182
SEED_ADVERSARIAL = 16180
SEED_FOLDS = 14142
SEED_OFF_GRID = 17320


@pytest.fixture
def merge_service():
    """Create merge service instance."""
    return MergeService()


@pytest.fixture
def oracle_service():
    """Create oracle service instance."""
    return OracleService()


@pytest.fixture
def rng():
    """Seeded generator for single-shot randomized tests."""
    return np.random.default_rng(SEED_PAIRS)
