"""
Summary Merge - Utility Modules
"""
from .record_parser import (
    build_summary,
    detect_format,
    format_value,
    parse_count,
    parse_numeric_value,
    parse_raw_values,
    parse_records,
)

__all__ = [
    "build_summary",
    "detect_format",
    "format_value",
    "parse_count",
    "parse_numeric_value",
    "parse_raw_values",
    "parse_records",
]
