"""Console logging for the jamdet commands: structlog events rendered with colorama on stderr."""

import logging
import pprint
import sys
import textwrap
from io import StringIO
from typing import Any, Mapping, Optional, TextIO

import colorama
import numpy as np
import structlog

LEVEL_COLORS = {
    "debug": colorama.Style.DIM,
    "warning": colorama.Fore.YELLOW,
    "error": colorama.Fore.RED,
    "critical": colorama.Fore.RED + colorama.Style.BRIGHT,
}
MAX_MAPPING_LINES = 40
MAX_ARRAY_ITEMS = 8


def format_value(value: Any) -> str:
    """Compact text for one event field; arrays are summarized, mappings pretty-printed."""
    if isinstance(value, np.ndarray):
        if value.size > MAX_ARRAY_ITEMS:
            return f"array(shape={value.shape}, min={value.min():.6g}, max={value.max():.6g})"
        return np.array2string(value, precision=6, separator=", ")
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    if isinstance(value, tuple) and all(isinstance(item, (int, float)) for item in value):
        return "(" + ", ".join(format_value(item) for item in value) + ")"
    if isinstance(value, Mapping):
        lines = pprint.pformat(dict(value), compact=True).splitlines()
        if len(lines) > MAX_MAPPING_LINES:
            lines = [*lines[:MAX_MAPPING_LINES], "...}"]
        return "\n" + textwrap.indent("\n".join(lines), "    ")
    return str(value)


class LogRenderer:  # pylint: disable=too-few-public-methods
    """Render structured events as one headline plus one indented line per field.

    Example:
        19:48:19 warning  Samples outside of the image extent
          n_discarded: 2210
          discard_ratio: 0.0221
    """

    def __call__(self, logger: Any, name: str, event_dict: structlog.types.EventDict) -> str:
        """Render the given event_dict to a string."""
        out = StringIO()

        timestamp = event_dict.pop("timestamp", None)
        if timestamp is not None:
            out.write(f"{colorama.Style.DIM}{timestamp}{colorama.Style.RESET_ALL} ")

        level = event_dict.pop("level", name)
        color = LEVEL_COLORS.get(level, "")
        out.write(f"{color}{level:<9}{colorama.Style.RESET_ALL}")
        out.write(f"{colorama.Style.BRIGHT}{event_dict.pop('event', '')}{colorama.Style.RESET_ALL}")

        for key, value in event_dict.items():
            out.write(
                f"\n  {colorama.Fore.CYAN}{key}{colorama.Style.RESET_ALL}: "
                f"{colorama.Fore.MAGENTA}{format_value(value)}{colorama.Style.RESET_ALL}"
            )
        return out.getvalue()


def log_level(verbosity: int) -> int:
    """Map `-v` counts to levels: none is WARNING, one or two INFO, three or more DEBUG."""
    if verbosity >= 3:  # noqa: PLR2004
        return logging.DEBUG
    if verbosity >= 1:
        return logging.INFO
    return logging.WARNING


def enable_logging(verbosity: int = 0, color: Optional[bool] = None, stream: Optional[TextIO] = None):
    """Send structlog events to `stream` (stderr by default) so stdout carries command output only."""
    if color is None:
        # colorama strips color codes when the stream isn't a terminal
        colorama.init()
    else:
        colorama.init(strip=not color)

    structlog.configure(
        processors=[
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="%H:%M:%S"),
            LogRenderer(),
        ],
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(stream or sys.stderr),
        wrapper_class=structlog.make_filtering_bound_logger(log_level(verbosity)),
        cache_logger_on_first_use=False,
    )


def initialize_logger(options: Mapping[str, Any]) -> Optional[bool]:
    """Configure logging from the global command options and return the color choice."""
    color = None
    if options.get("force_color"):
        color = True
    if options.get("no_color"):
        color = False

    enable_logging(verbosity=options.get("verbosity", 0), color=color)
    return color
