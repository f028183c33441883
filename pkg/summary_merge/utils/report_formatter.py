"""
Summary Merge - Report Formatting
Table and JSON-lines renderings of summaries.
"""
import json
from typing import Any, Dict, List, Optional, Tuple

from ..models import SampleSummary
from .record_parser import format_value

Row = Tuple[str, str]


def summary_fields(
    label: str,
    summary: SampleSummary,
    precision: int,
    extra: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """
    JSON object for one summary.

    Full-precision numbers sit next to their display-rounded strings, so
    downstream tools can re-parse the object without loss.
    """
    mean = None if summary.is_empty else summary.mean
    fields: Dict[str, Any] = {
        "label": label,
        "n": summary.n,
        "mean": mean,
        "sd": summary.sample_sd,
        "variance": summary.sample_variance,
        "mean_display": format_value(mean, precision),
        "sd_display": format_value(summary.sample_sd, precision),
        "variance_display": format_value(summary.sample_variance, precision),
    }
    if extra:
        fields.update(extra)
    return fields


def to_json_line(fields: Dict[str, Any]) -> str:
    return json.dumps(fields, allow_nan=False) + "\n"


def summary_rows(summary: SampleSummary, precision: int) -> List[Row]:
    mean = None if summary.is_empty else summary.mean
    return [
        ("n", str(summary.n)),
        ("mean", format_value(mean, precision)),
        ("sd", format_value(summary.sample_sd, precision)),
        ("variance", format_value(summary.sample_variance, precision)),
    ]


def render_table(title: str, rows: List[Row]) -> str:
    """Title line followed by aligned name/value rows."""
    width = max((len(name) for name, _ in rows), default=0)
    lines = [title]
    lines.extend(f"  {name.ljust(width)}  {value}" for name, value in rows)
    return "\n".join(lines) + "\n"
