"""Definition of the `jamdet detect` command."""

import csv
from pathlib import Path
from typing import List, Mapping, Optional, TextIO

import numpy as np

from jamming_detector.autoencoder import DetectorModel, Verdict, classify_images
from jamming_detector.base import Label, logger
from jamming_detector.exceptions import DimensionMismatchError
from jamming_detector.imaging import HistogramImage, window_stream
from jamming_detector.iq_io import (
    DatasetManifest,
    IQFormat,
    load_model,
    read_image_pgm,
    read_manifest,
    read_raw_iq,
    resolve_entry,
)
from jamming_detector.utils import comment_lines, format_float, provenance

from .base import BaseCommand, is_manifest, output_stream, positive_int


def _check_manifest_geometry(manifest: DatasetManifest, detector: DetectorModel):
    """Images must be encoded with the sample count, size and extent the model was trained on."""
    expected = detector.image_config
    recorded = manifest.image_config
    if recorded is not None and (recorded.n, recorded.m_rows, recorded.n_cols) != (
        expected.n,
        expected.m_rows,
        expected.n_cols,
    ):
        raise DimensionMismatchError(
            f"Images hold {recorded.n} samples on {recorded.m_rows}x{recorded.n_cols} tiles, "
            f"the model expects {expected.n} on {expected.m_rows}x{expected.n_cols}"
        )
    extent = manifest.extent
    if extent is not None and not np.allclose(extent.as_tuple(), detector.extent.as_tuple()):
        raise DimensionMismatchError(
            f"Image extent {extent.as_tuple()} differs from the model extent {detector.extent.as_tuple()}"
        )


def load_windows(path: Path, detector: DetectorModel, iq_format: IQFormat, workers: int) -> List[HistogramImage]:
    """Images of an image manifest, or the windows of a raw recording encoded with the model's geometry."""
    if is_manifest(path):
        manifest = read_manifest(path)
        _check_manifest_geometry(manifest, detector)
        images = [read_image_pgm(resolve_entry(path, entry)) for entry in manifest]
        for entry, image in zip(manifest, images):
            if not np.allclose(image.extent.as_tuple(), detector.extent.as_tuple()):
                raise DimensionMismatchError(f"{entry.path}: image extent differs from the model extent")
        return images
    return window_stream(read_raw_iq(path, iq_format), detector.image_config, detector.extent, workers)


def write_verdicts(
    stream: TextIO, verdicts: List[Verdict], output_format: str, header: Optional[Mapping[str, str]] = None
):
    """Provenance comments, one line per window and a closing jammed-fraction line."""
    for line in comment_lines(header or {}):
        stream.write(f"{line}\n")
    jammed = sum(1 for verdict in verdicts if verdict.label is Label.JAMMED)
    fraction = jammed / len(verdicts) if verdicts else 0.0
    if output_format == "csv":
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("window", "mse", "verdict"))
        for index, verdict in enumerate(verdicts):
            writer.writerow((index, format_float(verdict.score), verdict.label.name))
        stream.write(f"# jammed_fraction={format_float(fraction)} jammed={jammed} windows={len(verdicts)}\n")
    else:
        for index, verdict in enumerate(verdicts):
            stream.write(f"{index} {format_float(verdict.score)} {verdict.label.name}\n")
        stream.write(f"jammed_fraction {format_float(fraction)} ({jammed}/{len(verdicts)})\n")


class Command(BaseCommand):
    """Implementation of the detect command."""

    name = "detect"
    help = "Classify windows of a recording or an image set as jammed or unjammed"

    def add_arguments(self, parser):
        """Add parser arguments to the detect command."""
        parser.add_argument("--model", required=True, help="Detector model file.")
        parser.add_argument("--in", required=True, dest="input", help="Raw recording or image manifest.")
        parser.add_argument("--format", choices=["text", "csv"], default="text", dest="output_format")
        parser.add_argument(
            "--iq-format", choices=["float32", "int16"], default="float32", dest="iq_format", help="Capture format."
        )
        parser.add_argument("--workers", type=positive_int, default=1, help="Threads encoding windows.")
        parser.add_argument("--out", help="Write the verdict stream to this file instead of stdout.")

    def handle(self, **options):
        """Handle execution of the detect command."""
        detector = load_model(options["model"]).detector
        images = load_windows(
            Path(options["input"]), detector, IQFormat.parse(options["iq_format"]), options["workers"]
        )
        verdicts = classify_images(detector, images)
        model_name = Path(options["model"]).name
        header = provenance(
            config={"model": model_name, "tau": detector.tau, "image": detector.image_config.echo()},
            model=model_name,
            tau=format_float(detector.tau),
        )
        with output_stream(options.get("out")) as stream:
            write_verdicts(stream, verdicts, options["output_format"], header)
        logger.info("Classified windows", windows=len(verdicts), tau=detector.tau)
