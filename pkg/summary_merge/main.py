"""
Summary Merge - Command Line Entry Point
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional

from pydantic import ValidationError

from .commands import cmd_check, cmd_combine, cmd_recover, select_recovery_pair
from .config import get_settings
from .exceptions import MalformedInputError, SummaryMergeError
from .models import CommandResult, InputFormat, Kernel, OutputFormat, RunConfig
from .utils import parse_raw_values, parse_records

logger = logging.getLogger(__name__)

EXIT_MALFORMED = 1


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors reported as malformed input (exit 1)."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


def configure_logging(verbosity: int = 0) -> None:
    """Send log records to stderr; -v for INFO, -vv for DEBUG."""
    settings = get_settings()
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, settings.LOG_LEVEL)
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, stream=sys.stderr)
    logging.getLogger("summary_merge").setLevel(level)


def read_text(path: str) -> str:
    """Read a whole UTF-8 input, with or without a BOM; '-' is stdin."""
    try:
        if path == "-":
            stream = getattr(sys.stdin, "buffer", None)
            if stream is None:
                return sys.stdin.read()
            return stream.read().decode("utf-8-sig")
        return Path(path).read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        source = "stdin" if path == "-" else path
        raise MalformedInputError(f"cannot read {source}: {e}") from e


def build_run_config(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig(
            kernel=Kernel(args.kernel),
            variance_input=args.variance_input,
            output_format=OutputFormat(args.format),
            precision=args.precision
        )
    except ValidationError as e:
        raise MalformedInputError(str(e.errors()[0]["msg"]), field="precision") from e


def _input_format(args: argparse.Namespace) -> Optional[InputFormat]:
    return InputFormat(args.input_format) if args.input_format else None


def handle_combine(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    records = parse_records(read_text(args.input), cfg.variance_input, _input_format(args))
    return cmd_combine(records, cfg)


def handle_recover(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    records = parse_records(read_text(args.input), cfg.variance_input, _input_format(args))
    total, known = select_recovery_pair(records, args.total, args.known)
    return cmd_recover(total, known, cfg)


def handle_check(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    x = parse_raw_values(read_text(args.x_file))
    y = parse_raw_values(read_text(args.y_file))
    return cmd_check(x, y, cfg)


def build_parser() -> ArgumentParser:
    settings = get_settings()

    common = ArgumentParser(add_help=False)
    common.add_argument(
        "--kernel",
        choices=[k.value for k in Kernel],
        default=settings.DEFAULT_KERNEL,
        help="merge kernel (default: %(default)s)"
    )
    common.add_argument(
        "--variance-input",
        action="store_true",
        help="read the sd column as a variance"
    )
    common.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.TABLE.value,
        help="output format (default: %(default)s)"
    )
    common.add_argument(
        "--precision",
        type=int,
        default=settings.DEFAULT_PRECISION,
        help="significant digits for display, 1-17 (default: %(default)s)"
    )
    common.add_argument(
        "-v", "--verbose",
        action="count",
        default=0,
        help="log progress to stderr (repeat for debug)"
    )

    records_input = ArgumentParser(add_help=False)
    records_input.add_argument(
        "input",
        nargs="?",
        default="-",
        help="CSV (label,n,mean,sd) or JSON-lines file; '-' for stdin"
    )
    records_input.add_argument(
        "--input-format",
        choices=[f.value for f in InputFormat],
        help="skip format detection"
    )

    parser = ArgumentParser(
        prog="summary-merge",
        description="Combine (n, mean, sd) study summaries exactly, or recover a missing group."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    combine = subparsers.add_parser(
        "combine",
        parents=[common, records_input],
        help="pool all records into one summary"
    )
    combine.set_defaults(handler=handle_combine)

    recover = subparsers.add_parser(
        "recover",
        parents=[common, records_input],
        help="recover the summary missing from a total"
    )
    recover.add_argument("--total", help="label of the total record")
    recover.add_argument("--known", help="label of the known record")
    recover.set_defaults(handler=handle_recover)

    check = subparsers.add_parser(
        "check",
        parents=[common],
        help="compare both kernels with the summary of concatenated raw data"
    )
    check.add_argument("x_file", help="first raw data file, one value per line")
    check.add_argument("y_file", help="second raw data file, one value per line")
    check.set_defaults(handler=handle_check)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    handler: Callable[[argparse.Namespace, RunConfig], CommandResult] = args.handler
    try:
        cfg = build_run_config(args)
        result = handler(args, cfg)
    except SummaryMergeError as e:
        logger.debug("%s failed: %s", args.command, e, exc_info=True)
        print(f"summary-merge {args.command}: error: {e.message}", file=sys.stderr)
        return e.exit_code

    sys.stdout.write(result.output)
    return result.exit_code
