"""BPSK symbol mapping."""

from typing import Iterable, Union

import numpy as np

Bits = Union[np.ndarray, Iterable[int]]


def payload_bits(payload: bytes, count: int) -> np.ndarray:
    """Repeat the payload, MSB-first within each byte, until `count` bits are produced."""
    if count < 0:
        raise ValueError("count must not be negative")
    pattern = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    if not pattern.size:
        raise ValueError("payload must not be empty")
    repeats = -(-count // pattern.size)
    return np.tile(pattern, repeats)[:count]


def modulate_bpsk(bits: Bits) -> np.ndarray:
    """Map bit 0 to (-1, 0) and bit 1 to (+1, 0)."""
    array = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits))
    if array.size and not np.isin(array, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    return (2.0 * array.astype(np.float64) - 1.0).astype(np.complex128)


def demodulate_bpsk(samples: np.ndarray) -> np.ndarray:
    """Nearest-symbol decision: non-negative I decodes as 1."""
    return (np.asarray(samples).real >= 0).astype(np.uint8)
