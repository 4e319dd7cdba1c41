"""Types shared by the link simulator."""

import math
from typing import Dict, Iterator, NamedTuple, Optional

import numpy as np
from pydantic import Field, validator

from jamming_detector.base import ConfigModel, JammerKind, Metadata

# Repeating 256-byte pattern carried by every simulated packet.
DEFAULT_PAYLOAD = bytes(range(256))

_MAX_SEED = 2**64 - 1


class IQSample(NamedTuple):
    """Single complex baseband measurement."""

    i: float
    q: float


class HardwareProfile(ConfigModel):
    """Radio front-end imperfections applied at complex baseband.

    Gain and phase imbalance act on the Q branch, the DC offset is added to both branches.
    """

    tag: str = "ideal"
    gain_imbalance_db: float = 0.0
    phase_imbalance_deg: float = 0.0
    dc_offset_i: float = 0.0
    dc_offset_q: float = 0.0

    @property
    def is_ideal(self) -> bool:
        """True when the profile leaves samples untouched."""
        return not (self.gain_imbalance_db or self.phase_imbalance_deg or self.dc_offset_i or self.dc_offset_q)


HARDWARE_PROFILES: Dict[str, HardwareProfile] = {
    "ideal": HardwareProfile(),
    "x310": HardwareProfile(tag="x310", gain_imbalance_db=0.05, phase_imbalance_deg=0.5, dc_offset_i=0.002),
    "limesdr": HardwareProfile(
        tag="limesdr",
        gain_imbalance_db=0.4,
        phase_imbalance_deg=2.5,
        dc_offset_i=0.01,
        dc_offset_q=-0.008,
    ),
}


def hardware_profile(tag: str) -> HardwareProfile:
    """Look up a named hardware preset."""
    try:
        return HARDWARE_PROFILES[tag.lower()]
    except KeyError as error:
        raise ValueError(f"Unknown hardware profile `{tag}`, expected one of {sorted(HARDWARE_PROFILES)}") from error


def _seed_in_range(value: int) -> int:
    if not 0 <= value <= _MAX_SEED:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return value


def _hardware_from_tag(value):
    if isinstance(value, str):
        return hardware_profile(value)
    return value


class LinkConfig(ConfigModel):
    """Legitimate BPSK link as seen by the receiver."""

    payload: bytes = DEFAULT_PAYLOAD
    num_symbols: int = Field(100_000, ge=1)
    snr_db: float = 15.0
    ror: int = Field(1, ge=1)
    agc: bool = True
    phase_noise_std: float = Field(0.0, ge=0.0)
    seed: int = 0
    receiver: HardwareProfile = HardwareProfile()

    _check_seed = validator("seed", allow_reuse=True)(_seed_in_range)
    _parse_receiver = validator("receiver", pre=True, allow_reuse=True)(_hardware_from_tag)

    @validator("payload", pre=True)
    def _parse_payload(cls, value):  # pylint: disable=no-self-argument
        if isinstance(value, str):
            value = bytes.fromhex(value)
        if not value:
            raise ValueError("payload must not be empty")
        return value

    @validator("snr_db")
    def _finite_snr(cls, value):  # pylint: disable=no-self-argument
        if not math.isfinite(value):
            raise ValueError("snr_db must be finite")
        return value


class JammerConfig(ConfigModel):
    """Jammer as seen by the receiver.

    `rjp` is the ratio between the jam RMS amplitude and the RMS amplitude of the jam-free received signal.
    """

    kind: JammerKind = JammerKind.NONE
    rjp: float = Field(0.0, ge=0.0)
    jor: int = Field(1, ge=1)
    tone_offset: float = 0.0
    tone_phase: Optional[float] = None
    seed: int = 0
    hardware: HardwareProfile = HardwareProfile()

    _check_seed = validator("seed", allow_reuse=True)(_seed_in_range)
    _parse_hardware = validator("hardware", pre=True, allow_reuse=True)(_hardware_from_tag)

    @validator("kind", pre=True)
    def _parse_kind(cls, value):  # pylint: disable=no-self-argument
        return JammerKind.parse(value)

    @validator("rjp", "tone_offset")
    def _finite(cls, value):  # pylint: disable=no-self-argument
        if not math.isfinite(value):
            raise ValueError("value must be finite")
        return value

    @property
    def active(self) -> bool:
        """True when the jammer actually adds energy to the channel."""
        return self.kind is not JammerKind.NONE and self.rjp > 0


class IQRecording(NamedTuple):
    """Timed sequence of complex baseband samples plus provenance."""

    samples: np.ndarray
    samples_per_symbol: int = 1
    metadata: Metadata = {}
    tx_bits: Optional[np.ndarray] = None

    @property
    def num_samples(self) -> int:
        """Number of complex samples."""
        return int(self.samples.size)

    def iq_samples(self) -> Iterator[IQSample]:
        """Iterate the recording as I-Q pairs."""
        for value in self.samples:
            yield IQSample(float(value.real), float(value.imag))

    @classmethod
    def from_iq(cls, samples, samples_per_symbol: int = 1, metadata: Optional[Metadata] = None) -> "IQRecording":
        """Build a recording from an iterable of `(i, q)` pairs."""
        pairs = np.asarray(list(samples), dtype=np.float64).reshape(-1, 2)
        return cls(pairs[:, 0] + 1j * pairs[:, 1], samples_per_symbol, dict(metadata or {}))
