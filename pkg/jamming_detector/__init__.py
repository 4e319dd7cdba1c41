"""Early jamming detection from raw I-Q samples."""

from importlib import metadata

try:
    __version__ = metadata.version("jamming-detector")
except metadata.PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0.dev0"

TOOL_NAME = "jamdet"
