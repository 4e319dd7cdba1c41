"""Raw interleaved I-Q capture files."""

from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from jamming_detector.base import Metadata, Pathable, logger
from jamming_detector.exceptions import FileFormatError, NonFiniteSampleError
from jamming_detector.simulation import IQRecording

_INT16_FULL_SCALE = 32768.0


class IQFormat(Enum):
    """On-disk sample layouts, I first then Q, little-endian."""

    FLOAT32 = "InterleavedFloat32LE"
    INT16 = "InterleavedInt16LE"

    @classmethod
    def parse(cls, value) -> "IQFormat":
        """Parse a format by value or by short name (`float32`, `int16`)."""
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for item in cls:
            if text.lower() in (item.value.lower(), item.name.lower()):
                return item
        raise ValueError(f"Unknown I-Q format `{value}`")

    @property
    def dtype(self) -> np.dtype:
        """Numpy dtype of one component."""
        return np.dtype("<f4") if self is IQFormat.FLOAT32 else np.dtype("<i2")

    @property
    def sample_size(self) -> int:
        """Bytes per complex sample."""
        return 2 * self.dtype.itemsize


def read_raw_iq(
    path: Pathable,
    iq_format: IQFormat = IQFormat.FLOAT32,
    samples_per_symbol: int = 1,
    metadata: Optional[Metadata] = None,
) -> IQRecording:
    """Read a capture; `int16` components are scaled by 1/32768."""
    data = Path(path).read_bytes()
    if len(data) % iq_format.sample_size:
        raise FileFormatError(
            f"{path}: {len(data)} bytes is not a whole number of {iq_format.sample_size}-byte samples"
        )

    components = np.frombuffer(data, dtype=iq_format.dtype).astype(np.float64)
    if iq_format is IQFormat.INT16:
        components /= _INT16_FULL_SCALE

    finite = np.isfinite(components)
    if not finite.all():
        raise NonFiniteSampleError(int(np.argmin(finite)) // 2)

    samples = components[0::2] + 1j * components[1::2]
    logger.debug("Read I-Q capture", path=str(path), samples=samples.size, format=iq_format.value)
    return IQRecording(samples, samples_per_symbol, dict(metadata or {}))


def write_raw_iq(rec: IQRecording, path: Pathable, iq_format: IQFormat = IQFormat.FLOAT32):
    """Write a capture; float32 output of float32-representable samples reads back bit-exact."""
    components = np.empty(2 * rec.samples.size, dtype=np.float64)
    components[0::2] = rec.samples.real
    components[1::2] = rec.samples.imag
    if not np.isfinite(components).all():
        raise NonFiniteSampleError(int(np.argmin(np.isfinite(components))) // 2)

    if iq_format is IQFormat.INT16:
        scaled = np.clip(np.rint(components * _INT16_FULL_SCALE), -_INT16_FULL_SCALE, _INT16_FULL_SCALE - 1)
        data = scaled.astype(iq_format.dtype).tobytes()
    else:
        data = components.astype(iq_format.dtype).tobytes()
    Path(path).write_bytes(data)
