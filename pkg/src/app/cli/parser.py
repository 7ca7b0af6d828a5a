"""
Argument parsing and dispatch.

Every subcommand module exposes ``register(subparsers)`` and
``handle(args, settings) -> int``. Library errors are turned into one-line
messages on stderr and mapped to exit codes: 0 success, 1 validation or
usage error, 2 numerical abort.
"""
import argparse
import sys
from typing import List, Optional

from app.cli.commands import COMMANDS
from app.cli.commands.common import SCHEDULE_KEYS
from infrastructure.error_handling.exceptions import (
    EXIT_OK,
    EXIT_VALIDATION,
    OkPhaseError,
    exit_code_for,
    get_user_friendly_message,
)
from infrastructure.logging.structured_logger import configure_structured_logging
from infrastructure.logging_config import get_logger, setup_logging
from infrastructure.settings import load_settings

logger = get_logger(__name__)


class UsageError(Exception):
    """Raised instead of exiting when argparse rejects the command line."""


class OkPhaseArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = OkPhaseArgumentParser(
        prog="okphase",
        description="Energy minimizers of the 2D Ohta-Kawasaki functional and their phase diagram.",
    )
    parser.add_argument("--config", help="master config file of key=value lines")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-dir", help="also write structured JSON logs here")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=OkPhaseArgumentParser)
    subparsers.required = True
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def parse_and_dispatch(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv`` and run the selected command.

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as e:
        # --help
        return int(e.code or EXIT_OK)

    try:
        settings = load_settings(
            args.config,
            passthrough=SCHEDULE_KEYS,
            log_level=args.log_level,
            log_dir=args.log_dir,
        )
        setup_logging(settings.log_level, settings.log_dir / "okphase.log" if settings.log_dir else None)
        configure_structured_logging(settings.log_dir)
        return args.handler(args, settings)
    except OkPhaseError as e:
        logger.debug(f"Command failed: {e.to_dict()}")
        print(get_user_friendly_message(e), file=sys.stderr)
        return exit_code_for(e)
