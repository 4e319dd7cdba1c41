"""Jam waveform generators."""

import math
from typing import Callable, Dict

import numpy as np

from jamming_detector.base import JammerKind
from jamming_detector.exceptions import ConfigurationError

from .base import DEFAULT_PAYLOAD, JammerConfig
from .modulation import modulate_bpsk, payload_bits

_WaveformGenerator = Callable[[JammerConfig, int, int, bytes, np.random.Generator], np.ndarray]


def _tone(cfg: JammerConfig, length: int, ror: int, _payload: bytes, rng: np.random.Generator) -> np.ndarray:
    phase = rng.uniform(0.0, 2.0 * math.pi) if cfg.tone_phase is None else cfg.tone_phase
    # tone_offset is in cycles per symbol, receiver samples are 1/ror symbols apart
    symbol_time = np.arange(length, dtype=np.float64) / ror
    return np.exp(1j * (2.0 * math.pi * cfg.tone_offset * symbol_time + phase))


def _gaussian(cfg: JammerConfig, length: int, ror: int, _payload: bytes, rng: np.random.Generator) -> np.ndarray:
    hold = -(-ror // cfg.jor)
    count = -(-length // hold)
    values = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / math.sqrt(2.0)
    return np.repeat(values, hold)[:length]


def _deceptive(cfg: JammerConfig, length: int, ror: int, payload: bytes, rng: np.random.Generator) -> np.ndarray:
    period = 8 * len(payload)
    symbols = modulate_bpsk(payload_bits(payload, period))
    rotation = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
    delay = int(rng.integers(0, period))
    # Jammer symbol clock is shifted by a whole number of jammer samples inside the symbol.
    clock_offset = int(rng.integers(0, cfg.jor))
    sample_index = np.arange(length, dtype=np.int64)
    symbol_index = (sample_index * cfg.jor + clock_offset * ror) // (ror * cfg.jor) + delay
    return symbols[symbol_index % period] * rotation


_GENERATORS: Dict[JammerKind, _WaveformGenerator] = {
    JammerKind.TONE: _tone,
    JammerKind.GAUSSIAN: _gaussian,
    JammerKind.DECEPTIVE: _deceptive,
}


def jam_waveform(
    cfg: JammerConfig,
    num_receiver_samples: int,
    ror: int = 1,
    payload: bytes = DEFAULT_PAYLOAD,
) -> np.ndarray:
    """Unit-RMS jam waveform sampled at the receiver's instants.

    Gaussian values are held for `ceil(ror / jor)` receiver samples, the tone is a unit complex exponential and the
    deceptive jammer replays the BPSK-modulated payload with a random rotation and delay.
    """
    if num_receiver_samples < 0:
        raise ValueError("num_receiver_samples must not be negative")
    if cfg.jor < 1:
        raise ConfigurationError(f"jor must be >= 1, got {cfg.jor}")
    if ror < 1:
        raise ConfigurationError(f"ror must be >= 1, got {ror}")

    if cfg.kind is JammerKind.NONE:
        return np.zeros(num_receiver_samples, dtype=np.complex128)

    rng = np.random.default_rng(cfg.seed)
    return _GENERATORS[cfg.kind](cfg, num_receiver_samples, ror, payload, rng)
