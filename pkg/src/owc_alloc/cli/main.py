"""``owc-alloc`` command line entry point."""

import argparse
import sys
from typing import Callable, Dict, List, Optional

import structlog

from owc_alloc import __version__
from owc_alloc.cli.commands import (
    cmd_allocate,
    cmd_report,
    cmd_schema,
    cmd_simulate,
    cmd_sweep_orientation,
)
from owc_alloc.config import ExecutionBackend, ObjectiveMode, get_settings
from owc_alloc.errors import InfeasibleAllocationError, OwcAllocError, ReportError
from owc_alloc.logging_config import configure_logging
from owc_alloc.parallel.factory import reset_execution_backend

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

Command = Callable[[argparse.Namespace], int]


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--output-dir",
        help="Directory runs are written under (default: OWC_ALLOC_OUTPUT_DIR or ./results)",
    )
    parser.add_argument("--threads", type=int, help="Worker threads for channel tracing")
    parser.add_argument("--log-level", help="Log level (default from settings)")


def _scenario_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", type=int, choices=[1, 2], help="Built-in user layout")
    parser.add_argument(
        "--system", type=int, choices=[1, 2, 3], help="Receiver orientation system (default 1)"
    )
    parser.add_argument("--config", help="Scenario document (JSON or YAML)")


def _trace_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--orders", help="Comma list of reflection orders to trace (los,first,second)"
    )
    parser.add_argument(
        "--fine-element", type=float, help="First-order patch edge in metres (default 0.05)"
    )


def _objective_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--objective",
        choices=[mode.value for mode in ObjectiveMode],
        help="Maximise the sum of linear SINRs or the sum of SINRs in dB",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="owc-alloc",
        description="Indoor visible-light channel tracing and WDMA resource allocation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Trace the gain tensor of a scenario")
    _common(simulate)
    _scenario_args(simulate)
    _trace_args(simulate)
    simulate.add_argument(
        "--impulse-responses",
        action="store_true",
        help="Also write every link's impulse response as CSV",
    )
    simulate.set_defaults(handler=cmd_simulate)

    allocate = commands.add_parser("allocate", help="Solve the optimal allocation")
    _common(allocate)
    _scenario_args(allocate)
    _trace_args(allocate)
    _objective_arg(allocate)
    allocate.add_argument("--tensor", help="Use a saved tensor.json instead of tracing")
    allocate.add_argument(
        "--toy", choices=["wdma"], help="Solve the built-in three-user WDMA instance"
    )
    allocate.add_argument("--lp", action="store_true", help="Also export the MILP as LP file")
    allocate.set_defaults(handler=cmd_allocate)

    report = commands.add_parser("report", help="Summarise allocate outputs")
    _common(report)
    report.add_argument(
        "--results-dir", help="Directory holding allocate runs (default: the output directory)"
    )
    report.set_defaults(handler=cmd_report)

    sweep = commands.add_parser(
        "sweep-orientation", help="Re-solve over a range of receiver azimuth offsets"
    )
    _common(sweep)
    _scenario_args(sweep)
    _trace_args(sweep)
    _objective_arg(sweep)
    sweep.add_argument("--start", type=float, default=0.0, help="First offset in degrees")
    sweep.add_argument("--stop", type=float, default=90.0, help="Offsets stay below this")
    sweep.add_argument("--step", type=float, default=30.0, help="Offset step in degrees")
    sweep.set_defaults(handler=cmd_sweep_orientation)

    schema = commands.add_parser("schema", help="Print the scenario document JSON schema")
    schema.add_argument("--output", help="Write the schema to this file instead")
    schema.set_defaults(handler=cmd_schema)
    return parser


def _apply_process_options(args: argparse.Namespace) -> None:
    settings = get_settings()
    if getattr(args, "log_level", None):
        settings.log_level = args.log_level
    configure_logging(settings.log_level, settings.log_json)
    threads = getattr(args, "threads", None)
    if threads is not None:
        if threads < 1:
            raise ValueError(f"--threads must be >= 1, got {threads}")
        settings.threads = threads
        settings.execution_backend = (
            ExecutionBackend.THREADS if threads > 1 else ExecutionBackend.SERIAL
        )
        reset_execution_backend()


_EXIT_CODES: Dict[type, int] = {
    InfeasibleAllocationError: EXIT_INFEASIBLE,
    ReportError: EXIT_IO,
    OSError: EXIT_IO,
    OwcAllocError: EXIT_INVALID_INPUT,
    ValueError: EXIT_INVALID_INPUT,
}


def exit_code_for(exc: BaseException) -> Optional[int]:
    for kind, code in _EXIT_CODES.items():
        if isinstance(exc, kind):
            return code
    return None


def main(argv: Optional[List[str]] = None) -> int:
    """Run one sub-command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Command = args.handler
    try:
        _apply_process_options(args)
        return handler(args)
    except Exception as exc:
        code = exit_code_for(exc)
        if code is None:
            raise
        logger.error("command_failed", command=args.command, error=type(exc).__name__)
        print(f"error: {exc}", file=sys.stderr)
        return code
    finally:
        reset_execution_backend()


if __name__ == "__main__":
    sys.exit(main())
