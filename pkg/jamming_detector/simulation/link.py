"""BPSK link simulation and bit error rate measurement."""

import math
from typing import Iterable, List, Tuple

import numpy as np
from scipy.special import erfc

from jamming_detector.base import JammerKind, logger
from jamming_detector.exceptions import DimensionMismatchError, MissingGroundTruthError
from jamming_detector.utils import rms

from .base import HardwareProfile, IQRecording, JammerConfig, LinkConfig
from .jammers import jam_waveform
from .modulation import demodulate_bpsk, modulate_bpsk, payload_bits


def apply_hardware(samples: np.ndarray, profile: HardwareProfile) -> np.ndarray:
    """Apply I-Q gain/phase imbalance and DC offset of a radio front-end."""
    if profile.is_ideal:
        return samples
    gain = 10.0 ** (profile.gain_imbalance_db / 20.0)
    phase = math.radians(profile.phase_imbalance_deg)
    in_phase = samples.real
    quadrature = gain * (samples.imag * math.cos(phase) + samples.real * math.sin(phase))
    return (in_phase + profile.dc_offset_i) + 1j * (quadrature + profile.dc_offset_q)


def _warn_inconsistent_jammer(jam: JammerConfig):
    if jam.kind is JammerKind.NONE and jam.rjp > 0:
        logger.warning("Jammer kind is none, ignoring rjp", rjp=jam.rjp)
    elif jam.kind is not JammerKind.NONE and jam.rjp == 0:
        logger.warning("Jammer power is zero, no jamming applied", jammer_kind=jam.kind.value)


def _metadata(link: LinkConfig, jam: JammerConfig) -> dict:
    return {
        "seed": str(link.seed),
        "jammer_seed": str(jam.seed),
        "jammer_kind": jam.kind.value,
        "rjp": repr(jam.rjp if jam.kind is not JammerKind.NONE else 0.0),
        "ror": str(link.ror),
        "jor": str(jam.jor),
        "snr_db": repr(link.snr_db),
        "num_symbols": str(link.num_symbols),
        "agc": str(link.agc).lower(),
        "phase_noise_std": repr(link.phase_noise_std),
        "hardware_tag": link.receiver.tag,
        "jammer_hardware_tag": jam.hardware.tag,
    }


def simulate_link(link: LinkConfig, jam: JammerConfig) -> IQRecording:
    """Simulate the samples logged by the receiver of a jammed BPSK link.

    Each symbol is held for `ror` samples and complex AWGN with per-component variance `10^(-snr_db/10) / 2` is
    added. An active jammer adds `rjp * rms(clean) * jam_waveform(...)` where `clean` is the jam-free received
    block. Receiver impairments are applied next, then the AGC scales the whole block to unit RMS.
    """
    _warn_inconsistent_jammer(jam)
    rng = np.random.default_rng(link.seed)

    bits = payload_bits(link.payload, link.num_symbols)
    symbols = modulate_bpsk(bits)
    if link.phase_noise_std > 0:
        symbols = symbols * np.exp(1j * rng.normal(0.0, link.phase_noise_std, symbols.size))

    transmitted = np.repeat(symbols, link.ror)
    sigma = math.sqrt(10.0 ** (-link.snr_db / 10.0) / 2.0)
    received = transmitted + sigma * (
        rng.standard_normal(transmitted.size) + 1j * rng.standard_normal(transmitted.size)
    )

    if jam.active:
        waveform = apply_hardware(jam_waveform(jam, received.size, link.ror, link.payload), jam.hardware)
        received = received + jam.rjp * rms(received) * waveform

    received = apply_hardware(received, link.receiver)

    if link.agc:
        level = rms(received)
        if level > 0:
            received = received / level

    logger.debug(
        "Simulated link",
        samples=received.size,
        jammer_kind=jam.kind.value,
        rjp=jam.rjp,
        seed=link.seed,
    )
    return IQRecording(received, link.ror, _metadata(link, jam), bits)


def measure_ber(rec: IQRecording) -> float:
    """Fraction of symbols decoded wrongly, using the first sample of each symbol."""
    if rec.tx_bits is None:
        raise MissingGroundTruthError("Recording has no transmitted bits, BER can't be measured")
    decisions = demodulate_bpsk(rec.samples[:: rec.samples_per_symbol])
    if decisions.size != rec.tx_bits.size:
        raise DimensionMismatchError(
            f"Recording holds {decisions.size} symbols but {rec.tx_bits.size} transmitted bits"
        )
    if not decisions.size:
        return 0.0
    return float(np.count_nonzero(decisions != rec.tx_bits) / decisions.size)


def theoretical_ber(snr_db: float) -> float:
    """BPSK bit error rate over AWGN, `Q(sqrt(2 * SNR))`."""
    return float(0.5 * erfc(math.sqrt(10.0 ** (snr_db / 10.0))))


def ber_sweep(link: LinkConfig, jam: JammerConfig, rjps: Iterable[float]) -> List[Tuple[float, float]]:
    """Measure the BER for each relative jamming power, keeping every seed fixed."""
    return [(float(rjp), measure_ber(simulate_link(link, jam.copy(update={"rjp": float(rjp)})))) for rjp in rjps]
