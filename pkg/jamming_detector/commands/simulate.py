"""Definition of the `jamdet simulate` command."""

from pathlib import Path
from typing import NamedTuple, Optional

from jamming_detector.base import JammerKind, Label, logger
from jamming_detector.iq_io import (
    DatasetManifest,
    IQFormat,
    ManifestEntry,
    read_manifest,
    write_manifest,
    write_raw_iq,
)
from jamming_detector.simulation import HARDWARE_PROFILES, JammerConfig, LinkConfig, measure_ber, simulate_link
from jamming_detector.utils import derive_seed, provenance

from .base import BaseCommand, positive_int, seed

MANIFEST_NAME = "manifest.txt"


class SimulateOptions(NamedTuple):
    """Options of the simulate command."""

    out: str
    symbols: int = 100_000
    snr_db: float = 15.0
    jam: str = "none"
    rjp: float = 0.0
    ror: int = 1
    jor: int = 1
    seed: int = 0
    tone_offset: float = 0.0
    tone_phase: Optional[float] = None
    phase_noise_std: float = 0.0
    agc: bool = True
    hardware: str = "ideal"
    jammer_hardware: str = "ideal"
    name: str = "recording"
    payload_hex: Optional[str] = None
    iq_format: str = "float32"


def upsert_entry(manifest_path: Path, entry: ManifestEntry, header: dict):
    """Add an entry to the manifest in the output directory, replacing one with the same path."""
    manifest = read_manifest(manifest_path) if manifest_path.exists() else DatasetManifest()
    entries = [item for item in manifest.entries if item.path != entry.path] + [entry]
    entries.sort(key=lambda item: item.path)
    write_manifest(DatasetManifest(entries, {**manifest.header, **header}), manifest_path)


class Command(BaseCommand):
    """Implementation of the simulate command."""

    name = "simulate"
    help = "Synthesize a raw I-Q recording of a BPSK link, optionally jammed"

    def add_arguments(self, parser):
        """Add parser arguments to the simulate command."""
        parser.add_argument("--out", required=True, help="Output directory for the recording and its manifest.")
        parser.add_argument("--symbols", type=positive_int, default=100_000, help="Number of BPSK symbols.")
        parser.add_argument("--snr-db", type=float, default=15.0, dest="snr_db", help="Signal-to-noise ratio in dB.")
        parser.add_argument(
            "--jam",
            choices=[kind.value for kind in JammerKind],
            default=JammerKind.NONE.value,
            help="Jammer kind.",
        )
        parser.add_argument(
            "--rjp", type=float, default=0.0, help="Relative jamming power, jam RMS over clean signal RMS."
        )
        parser.add_argument("--ror", type=positive_int, default=1, help="Receiver oversampling ratio.")
        parser.add_argument("--jor", type=positive_int, default=1, help="Jammer oversampling ratio.")
        parser.add_argument("--seed", type=seed, default=0, help="Master seed, link and jammer seeds derive from it.")
        parser.add_argument(
            "--tone-offset", type=float, default=0.0, dest="tone_offset", help="Tone offset in cycles per symbol."
        )
        parser.add_argument(
            "--tone-phase", type=float, default=None, dest="tone_phase", help="Tone phase in radians (default random)."
        )
        parser.add_argument(
            "--phase-noise-std",
            type=float,
            default=0.0,
            dest="phase_noise_std",
            help="Per-symbol phase jitter in radians.",
        )
        parser.add_argument("--no-agc", action="store_false", dest="agc", help="Don't normalize the block to unit RMS.")
        parser.add_argument("--hardware", choices=sorted(HARDWARE_PROFILES), default="ideal", help="Receiver radio.")
        parser.add_argument(
            "--jammer-hardware",
            choices=sorted(HARDWARE_PROFILES),
            default="ideal",
            dest="jammer_hardware",
            help="Jammer radio.",
        )
        parser.add_argument("--name", default="recording", help="Output file stem.")
        parser.add_argument("--payload-hex", dest="payload_hex", help="Payload bytes as hex (default 00..ff).")
        parser.add_argument(
            "--iq-format",
            choices=["float32", "int16"],
            default="float32",
            dest="iq_format",
            help="Sample format of the written capture.",
        )

    def handle(self, **kwargs):
        """Handle execution of the simulate command."""
        # pylint: disable=protected-access
        keys = SimulateOptions._fields
        options = SimulateOptions(**{key: value for key, value in kwargs.items() if key in keys})

        link_fields = {
            "num_symbols": options.symbols,
            "snr_db": options.snr_db,
            "ror": options.ror,
            "agc": options.agc,
            "phase_noise_std": options.phase_noise_std,
            "seed": derive_seed(options.seed, "link"),
            "receiver": options.hardware,
        }
        if options.payload_hex is not None:
            link_fields["payload"] = options.payload_hex
        link = LinkConfig(**link_fields)
        jammer = JammerConfig(
            kind=options.jam,
            rjp=options.rjp,
            jor=options.jor,
            tone_offset=options.tone_offset,
            tone_phase=options.tone_phase,
            seed=derive_seed(options.seed, "jammer"),
            hardware=options.jammer_hardware,
        )

        recording = simulate_link(link, jammer)
        out = Path(options.out)
        out.mkdir(parents=True, exist_ok=True)
        iq_format = IQFormat.parse(options.iq_format)
        file_name = f"{options.name}.iq"
        write_raw_iq(recording, out / file_name, iq_format)

        label = Label.JAMMED if jammer.kind is not JammerKind.NONE else Label.UNJAMMED
        entry = ManifestEntry(
            path=file_name,
            label=label,
            rjp=jammer.rjp if label is Label.JAMMED else 0.0,
            jammer_kind=jammer.kind.value,
            ror=link.ror,
            jor=jammer.jor,
            hardware_tag=link.receiver.tag,
            jammer_hardware_tag=jammer.hardware.tag,
            seed=options.seed,
        )
        header = provenance(options.seed, iq_format=iq_format.value)
        upsert_entry(out / MANIFEST_NAME, entry, header)

        logger.info(
            "Simulated recording",
            path=str(out / file_name),
            samples=recording.num_samples,
            label=label.value,
            ber=measure_ber(recording),
        )
