"""
Autocrat - Command Line Interface
"""

import sys
from typing import Optional, Sequence

import structlog
from rich.console import Console

from autocrat.core.exceptions import EXIT_OTHER, AutocratError
from autocrat.core.logging import setup_logging
from autocrat.commands.handlers import COMMANDS
from autocrat.commands.parser import build_parser

logger = structlog.get_logger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command and return its exit code.

    Exit codes: 0 ok, 1 other, 2 parse, 3 empty with --strict,
    4 value out of range, 5 verification failed.
    """
    setup_logging()
    args = build_parser().parse_args(argv)
    console = Console(highlight=False, width=160)
    try:
        return COMMANDS[args.command](args, console)
    except AutocratError as e:
        print(f"autocrat: error: {e.message}", file=sys.stderr)
        logger.debug("Command failed", command=args.command, exit_code=e.exit_code, details=e.details)
        return e.exit_code
    except ValueError as e:
        print(f"autocrat: error: {e}", file=sys.stderr)
        return EXIT_OTHER


__all__ = ["main"]
