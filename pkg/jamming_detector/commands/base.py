"""Base class and shared argument helpers of the jamdet subcommands."""

import argparse
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, TextIO

from jamming_detector.base import Pathable
from jamming_detector.iq_io import MANIFEST_FORMAT_VERSION


class BaseCommand:
    """Subcommand with a `help` text, argument definitions and a handler."""

    name = ""
    help = ""

    def add_arguments(self, parser: argparse.ArgumentParser):
        """Add parser arguments to the subcommand."""

    def handle(self, **options):
        """Handle execution of the subcommand."""
        raise NotImplementedError


def non_negative_int(value: str) -> int:
    """Argparse type for counts."""
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return number


def positive_int(value: str) -> int:
    """Argparse type for factors and sizes."""
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def seed(value: str) -> int:
    """Argparse type for 64-bit seeds."""
    number = int(value, 0)
    if not 0 <= number < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {value}")
    return number


def is_manifest(path: Pathable) -> bool:
    """True when the file starts with a manifest version line."""
    with open(path, "rb") as file:
        first_line = file.readline(128)
    return first_line.strip() == f"# format_version={MANIFEST_FORMAT_VERSION}".encode("ascii")


@contextmanager
def output_stream(path: Optional[Pathable]) -> Iterator[TextIO]:
    """Open `path` for writing, or use stdout when no path is given."""
    if path is None:
        yield sys.stdout
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as file:
        yield file
