"""
Summary Merge - Services Module
"""
from .merge_service import MergeService, get_merge_service
from .oracle_service import (
    OracleService,
    get_oracle_service,
    mean_rounding_allowance,
    relative_error,
)

__all__ = [
    "MergeService",
    "get_merge_service",
    "OracleService",
    "get_oracle_service",
    "mean_rounding_allowance",
    "relative_error",
]
