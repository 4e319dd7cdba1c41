"""Utility functions for jamming_detector."""

import hashlib
import json
from typing import Any, Iterable, Mapping

import numpy as np

from . import TOOL_NAME, __version__

_SEED_BYTES = 8


def derive_seed(master_seed: int, stage: str, index: Any = 0) -> int:
    """Derive a 64-bit child seed from the master seed, a stage name and an index.

    The derivation is `blake2b(f"{master}:{stage}:{index}")`, truncated to 8 bytes, so any stage can be
    reproduced on its own from the master seed.
    """
    digest = hashlib.blake2b(f"{int(master_seed)}:{stage}:{index}".encode("utf-8"), digest_size=_SEED_BYTES)
    return int.from_bytes(digest.digest(), "big")


def format_float(value: float) -> str:
    """Format a float with 17 significant digits, enough for an exact double round-trip."""
    return format(float(value), ".17g")


def canonical_json(value: Any) -> str:
    """Serialize a JSON-compatible value with sorted keys and no whitespace."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(value: Any) -> str:
    """Short, stable hash of a configuration echo."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()[:16]


def rms(values: np.ndarray) -> float:
    """Root mean square amplitude of a real or complex array."""
    if values.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


def provenance(master_seed: Any = None, config: Any = None, **extra: Any) -> Mapping[str, str]:
    """Build the provenance header embedded in every output file."""
    result = {"tool": TOOL_NAME, "tool_version": __version__}
    if master_seed is not None:
        result["master_seed"] = str(master_seed)
    if config is not None:
        result["config_hash"] = config_hash(config)
    for key, value in extra.items():
        if value is not None:
            result[key] = str(value)
    return result


def comment_lines(header: Mapping[str, str]) -> Iterable[str]:
    """Render a provenance header as `# key=value` lines."""
    for key, value in header.items():
        yield f"# {key}={value}"


def is_truthy(arg) -> bool:
    """Convert "truthy" strings into Booleans.

    Examples:
        >>> is_truthy('yes')
        True
    Args:
        arg (str): Truthy string (True values are y, yes, t, true, on and 1; false values are n, no,
        f, false, off and 0. Raises ValueError if val is anything else.
    """
    if isinstance(arg, bool):
        return arg

    val = str(arg).lower()
    if val in ("y", "yes", "t", "true", "on", "1"):
        return True
    if val in ("n", "no", "f", "false", "off", "0"):
        return False
    raise ValueError(f"Invalid truthy value: `{arg}`")
