"""Definition of the `jamdet encode` command."""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

from jamming_detector.base import Label, logger
from jamming_detector.exceptions import ConfigurationError
from jamming_detector.imaging import AutoExtent, FixedExtent, ImageConfig, PlaneExtent, compute_extent, window_stream
from jamming_detector.iq_io import (
    DatasetManifest,
    IQFormat,
    ManifestEntry,
    image_suffix,
    read_manifest,
    read_raw_iq,
    resolve_entry,
    write_image_pgm,
    write_manifest,
)
from jamming_detector.simulation import IQRecording
from jamming_detector.utils import provenance

from .base import BaseCommand, is_manifest, positive_int

MANIFEST_NAME = "manifest.txt"
# Fields of a recording entry carried over to its images.
_CARRIED_FIELDS = ("label", "rjp", "jammer_kind", "ror", "jor", "hardware_tag", "jammer_hardware_tag", "seed")


def parse_size(value: str) -> Tuple[int, int]:
    """`224` or `224x224` (rows x columns)."""
    rows, _, cols = value.lower().partition("x")
    try:
        return int(rows), int(cols or rows)
    except ValueError as error:
        raise ConfigurationError(f"Invalid image size `{value}`, expected N or ROWSxCOLS") from error


def load_recordings(path: Path, label: Optional[str], iq_format: IQFormat) -> List[Tuple[IQRecording, Dict]]:
    """Recordings with the manifest fields their images inherit."""
    if is_manifest(path):
        manifest = read_manifest(path)
        manifest_format = IQFormat.parse(manifest.header.get("iq_format", iq_format.value))
        result = []
        for entry in manifest:
            recording = read_raw_iq(resolve_entry(path, entry), manifest_format, entry.ror or 1)
            fields = {key: getattr(entry, key) for key in _CARRIED_FIELDS}
            result.append((recording, {**fields, "source": entry.path}))
        return result

    if label is None:
        raise ConfigurationError("--label is required when encoding a raw recording")
    try:
        parsed = Label.parse(label)
    except ValueError as error:
        raise ConfigurationError(str(error)) from error
    return [(read_raw_iq(path, iq_format), {"label": parsed, "source": path.name})]


class Command(BaseCommand):
    """Implementation of the encode command."""

    name = "encode"
    help = "Encode I-Q recordings into bivariate histogram images"

    def add_arguments(self, parser):
        """Add parser arguments to the encode command."""
        parser.add_argument("--in", required=True, dest="input", help="Raw recording or recording manifest.")
        parser.add_argument("--label", help="Label of a raw recording (Unjammed or Jammed).")
        parser.add_argument("--n", type=positive_int, default=100_000, help="Samples per image.")
        parser.add_argument("--size", default="224", help="Image size, N or ROWSxCOLS.")
        parser.add_argument("--mode", choices=["gray", "color"], default="gray", help="Gray (PGM) or color (PPM).")
        parser.add_argument(
            "--extent-from", dest="extent_from", help="Unjammed calibration recording the extent is derived from."
        )
        parser.add_argument(
            "--extent",
            type=float,
            nargs=4,
            metavar=("I_MIN", "I_MAX", "Q_MIN", "Q_MAX"),
            help="Fixed plane extent.",
        )
        parser.add_argument("--percentile", type=float, default=99.9, help="Percentile of max(|i|, |q|).")
        parser.add_argument("--margin", type=float, default=1.05, help="Factor applied to the percentile.")
        parser.add_argument(
            "--iq-format", choices=["float32", "int16"], default="float32", dest="iq_format", help="Capture format."
        )
        parser.add_argument("--workers", type=positive_int, default=1, help="Threads encoding windows.")
        parser.add_argument("--out", required=True, help="Output directory for images and their manifest.")

    def handle(self, input, out, **options):  # pylint: disable=redefined-builtin
        """Handle execution of the encode command."""
        if (options["extent"] is None) == (options["extent_from"] is None):
            raise ConfigurationError("Give exactly one of --extent or --extent-from")

        m_rows, n_cols = parse_size(options["size"])
        iq_format = IQFormat.parse(options["iq_format"])
        if options["extent"] is not None:
            i_min, i_max, q_min, q_max = options["extent"]
            policy = FixedExtent(extent=PlaneExtent(i_min=i_min, i_max=i_max, q_min=q_min, q_max=q_max))
        else:
            policy = AutoExtent(percentile=options["percentile"], margin=options["margin"])
        image_config = ImageConfig(
            n=options["n"], m_rows=m_rows, n_cols=n_cols, mode=options["mode"], extent_policy=policy
        )

        samples = [] if isinstance(policy, FixedExtent) else read_raw_iq(options["extent_from"], iq_format).samples
        extent = compute_extent(samples, policy)

        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        header = provenance(config=image_config.echo())
        entries = []
        for recording, fields in load_recordings(Path(input), options.get("label"), iq_format):
            images = window_stream(recording, image_config, extent, options["workers"])
            if not images:
                logger.warning(
                    "Recording shorter than one image", source=fields["source"], samples=recording.num_samples
                )
            stem = Path(fields["source"]).stem
            for index, image in enumerate(images):
                file_name = f"{stem}-{index:05d}{image_suffix(image_config.mode)}"
                write_image_pgm(image, out / file_name, provenance=header)
                entries.append(ManifestEntry(path=file_name, n=image_config.n, window=index, **fields))

        manifest = DatasetManifest(entries, dict(header))
        manifest.set_image_config(image_config)
        manifest.set_extent(extent)
        write_manifest(manifest, out / MANIFEST_NAME)
        logger.info("Encoded images", images=len(entries), out=str(out), extent=extent.as_tuple())
