"""Command-line entry point `jamdet`.

Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or configuration error. Detection verdicts never
change the exit code.
"""

import argparse
from typing import List, Optional, Sequence

from pydantic import ValidationError

from jamming_detector import TOOL_NAME, __version__
from jamming_detector.base import logger
from jamming_detector.command_utils import initialize_logger
from jamming_detector.exceptions import ConfigurationError, JammingDetectorError

from . import detect, encode, evaluate, report, simulate, train
from .base import BaseCommand

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMANDS: List[BaseCommand] = [
    simulate.Command(),
    encode.Command(),
    train.Command(),
    detect.Command(),
    evaluate.Command(),
    report.Command(),
]


def create_parser() -> argparse.ArgumentParser:
    """Parser with one subparser per command."""
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Early jamming detection from I-Q samples.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbosity", action="count", default=0, help="Increase log verbosity (-v info, -vvv debug)."
    )
    parser.add_argument("--force-color", action="store_true", dest="force_color", help="Force colored logs.")
    parser.add_argument("--no-color", action="store_true", dest="no_color", help="Don't color logs.")

    subparsers = parser.add_subparsers(dest="command_name", metavar="COMMAND")
    subparsers.required = True
    for command in COMMANDS:
        subparser = subparsers.add_parser(command.name, help=command.help, description=command.help)
        command.add_arguments(subparser)
        subparser.set_defaults(command=command)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run a command and return its exit code."""
    parser = create_parser()
    try:
        options = vars(parser.parse_args(argv))
    except SystemExit as error:
        return error.code if isinstance(error.code, int) else EXIT_USAGE

    initialize_logger(options)
    command: BaseCommand = options.pop("command")
    for key in ("command_name", "verbosity", "force_color", "no_color"):
        options.pop(key, None)

    try:
        command.handle(**options)
    except (ConfigurationError, ValidationError) as error:
        logger.error("Invalid configuration", command=command.name, error=str(error))
        return EXIT_USAGE
    except (JammingDetectorError, OSError) as error:
        logger.error("Command failed", command=command.name, error=str(error))
        return EXIT_FAILURE
    return EXIT_OK
