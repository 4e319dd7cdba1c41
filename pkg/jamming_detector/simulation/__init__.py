"""Synthetic I-Q recordings of a jammed BPSK link."""

from .base import (
    DEFAULT_PAYLOAD,
    HARDWARE_PROFILES,
    HardwareProfile,
    IQRecording,
    IQSample,
    JammerConfig,
    LinkConfig,
    hardware_profile,
)
from .jammers import jam_waveform
from .link import apply_hardware, ber_sweep, measure_ber, simulate_link, theoretical_ber
from .modulation import demodulate_bpsk, modulate_bpsk, payload_bits

__all__ = (
    "DEFAULT_PAYLOAD",
    "HARDWARE_PROFILES",
    "HardwareProfile",
    "IQRecording",
    "IQSample",
    "JammerConfig",
    "LinkConfig",
    "apply_hardware",
    "ber_sweep",
    "demodulate_bpsk",
    "hardware_profile",
    "jam_waveform",
    "measure_ber",
    "modulate_bpsk",
    "payload_bits",
    "simulate_link",
    "theoretical_ber",
)
