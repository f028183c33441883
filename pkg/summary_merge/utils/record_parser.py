"""
Summary Merge - Record Parsing Utilities
Turn study tables (CSV or JSON-lines) and raw value files into models.
"""
import csv
import io
import json
import math
import re
from typing import Any, Dict, List, Optional, Set

from pydantic import ValidationError

from ..exceptions import MalformedInputError, SummaryMergeError
from ..models import InputFormat, RawDataset, SampleSummary, StudyRecord
from ..services.merge_service import get_merge_service

CSV_HEADER = ("label", "n", "mean", "sd")

# Plain decimal reals: optional sign, digits with '.' separator, optional exponent
DECIMAL_PATTERN = re.compile(r'^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$')
COUNT_PATTERN = re.compile(r'^\+?\d+$')


def parse_numeric_value(
    value_str: str,
    line: Optional[int] = None,
    field: Optional[str] = None
) -> float:
    """
    Parse a finite decimal real written with a '.' separator.

    Args:
        value_str: Raw text of the value
        line: Line number for error messages
        field: Field name for error messages

    Returns:
        The parsed float
    """
    cleaned = value_str.strip()
    if not DECIMAL_PATTERN.match(cleaned):
        raise MalformedInputError(f"not a decimal number: {value_str!r}", line, field)

    value = float(cleaned)
    if not math.isfinite(value):
        raise MalformedInputError(f"value is not finite: {value_str!r}", line, field)
    return value


def parse_count(value_str: str, line: Optional[int] = None) -> int:
    """Parse a non-negative integer observation count."""
    cleaned = value_str.strip()
    if not COUNT_PATTERN.match(cleaned):
        raise MalformedInputError(
            f"not a non-negative integer: {value_str!r}", line, "n"
        )
    return int(cleaned)


def detect_format(text: str) -> InputFormat:
    """JSON-lines when the first significant character opens an object."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return InputFormat.JSONL
    return InputFormat.CSV


def build_summary(
    n: int,
    mean: Optional[float],
    spread: Optional[float],
    spread_is_variance: bool,
    line: Optional[int] = None
) -> SampleSummary:
    """
    Convert one reported (n, mean, sd-or-variance) triple to a summary.

    A blank spread is required for n <= 1 and forbidden for n >= 2.
    """
    spread_field = "variance" if spread_is_variance else "sd"
    merge = get_merge_service()

    if n == 0:
        if spread is not None:
            raise MalformedInputError("an empty study has no spread", line, spread_field)
        if mean not in (None, 0.0):
            raise MalformedInputError("an empty study has no mean", line, "mean")
        return merge.empty()

    if mean is None:
        raise MalformedInputError("mean is required", line, "mean")

    if n == 1:
        if spread is not None:
            raise MalformedInputError(
                "a single observation has no spread; leave it blank",
                line,
                spread_field
            )
        return merge.singleton(mean)

    if spread is None:
        raise MalformedInputError(f"{spread_field} is required for n >= 2", line, spread_field)

    try:
        if spread_is_variance:
            return merge.from_stats(n, mean, spread)
        return merge.from_sd(n, mean, spread)
    except SummaryMergeError as e:
        raise MalformedInputError(e.message, line, spread_field) from e


def _make_record(
    label: str,
    summary: SampleSummary,
    line: int,
    seen: Set[str]
) -> StudyRecord:
    if label in seen:
        raise MalformedInputError(f"duplicate label {label!r}", line, "label")
    try:
        record = StudyRecord(label=label, summary=summary)
    except ValidationError as e:
        raise MalformedInputError(str(e.errors()[0]["msg"]), line, "label") from e
    seen.add(label)
    return record


def _parse_csv(text: str, variance_input: bool) -> List[StudyRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return []

    header = tuple(name.strip() for name in reader.fieldnames)
    missing = [name for name in CSV_HEADER if name not in header]
    if missing:
        raise MalformedInputError(
            f"header must be {','.join(CSV_HEADER)}; missing {', '.join(missing)}",
            line=1
        )

    records: List[StudyRecord] = []
    seen: Set[str] = set()
    for row in reader:
        line = reader.line_num
        if None in row:
            raise MalformedInputError("more fields than the header declares", line)
        row = {k.strip(): (v or "") for k, v in row.items()}
        if not any(value.strip() for value in row.values()):
            continue

        label = row["label"].strip()
        n = parse_count(row["n"], line)
        mean_str = row["mean"].strip()
        sd_str = row["sd"].strip()
        mean = parse_numeric_value(mean_str, line, "mean") if mean_str else None
        spread = parse_numeric_value(sd_str, line, "sd") if sd_str else None

        summary = build_summary(n, mean, spread, variance_input, line)
        records.append(_make_record(label, summary, line, seen))

    return records


def _reject_constant(token: str) -> float:
    raise ValueError(f"non-finite constant {token}")


def _json_number(obj: Dict[str, Any], field: str, line: int) -> Optional[float]:
    value = obj.get(field)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedInputError(f"expected a number, got {value!r}", line, field)
    try:
        number = float(value)
    except OverflowError as e:
        raise MalformedInputError(f"value is not finite: {value!r}", line, field) from e
    if not math.isfinite(number):
        raise MalformedInputError(f"value is not finite: {value!r}", line, field)
    return number


def _parse_jsonl(text: str, variance_input: bool) -> List[StudyRecord]:
    records: List[StudyRecord] = []
    seen: Set[str] = set()
    for line, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw, parse_constant=_reject_constant)
        except ValueError as e:
            raise MalformedInputError(f"invalid JSON: {e}", line) from e
        if not isinstance(obj, dict):
            raise MalformedInputError("expected a JSON object", line)

        label = obj.get("label")
        if not isinstance(label, str):
            raise MalformedInputError("label must be a string", line, "label")

        n = obj.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise MalformedInputError(f"not a non-negative integer: {n!r}", line, "n")

        mean = _json_number(obj, "mean", line)
        variance = _json_number(obj, "variance", line)
        if variance is not None:
            summary = build_summary(n, mean, variance, True, line)
        else:
            sd = _json_number(obj, "sd", line)
            summary = build_summary(n, mean, sd, variance_input, line)

        records.append(_make_record(label.strip(), summary, line, seen))

    return records


def parse_records(
    text: str,
    variance_input: bool = False,
    input_format: Optional[InputFormat] = None
) -> List[StudyRecord]:
    """
    Parse study records in file order.

    Args:
        text: Whole input (CSV with header label,n,mean,sd, or JSON-lines)
        variance_input: Interpret the sd column as a variance
        input_format: Force a format instead of detecting it

    Returns:
        List of StudyRecord, labels unique
    """
    input_format = input_format or detect_format(text)
    if input_format == InputFormat.JSONL:
        return _parse_jsonl(text, variance_input)
    return _parse_csv(text, variance_input)


def parse_raw_values(text: str) -> RawDataset:
    """One real per line; blank lines and '#' comments are skipped."""
    values: List[float] = []
    for line, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        values.append(parse_numeric_value(stripped, line))
    return RawDataset(values=tuple(values))


def format_value(value: Optional[float], precision: int) -> str:
    """
    Format a value with `precision` significant digits.

    17 digits reproduce any double exactly. Absent values print as n/a.
    """
    if value is None:
        return "n/a"
    return f"{value:.{precision}g}"
