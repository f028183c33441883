"""
Summary Merge - Application Package
Mergeable (n, mean, variance) summaries and the aggregator CLI.
"""
from .models import MergeReport, PowerSums, RawDataset, SampleSummary, StudyRecord
from .services import get_merge_service, get_oracle_service

__all__ = [
    "MergeReport",
    "PowerSums",
    "RawDataset",
    "SampleSummary",
    "StudyRecord",
    "get_merge_service",
    "get_oracle_service",
]
