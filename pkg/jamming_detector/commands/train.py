"""Definition of the `jamdet train` command."""

from pathlib import Path
from typing import List, Tuple

from jamming_detector.autoencoder import Architecture, ThresholdPolicy, TrainConfig, Transfer, build_detector
from jamming_detector.base import Label, logger
from jamming_detector.exceptions import DimensionMismatchError, InsufficientDataError, LabelError
from jamming_detector.imaging import HistogramImage, ImageConfig, PlaneExtent
from jamming_detector.iq_io import (
    manifest_hash,
    model_file,
    read_image_pgm,
    read_manifest,
    resolve_entry,
    save_model,
)
from jamming_detector.utils import provenance

from .base import BaseCommand, non_negative_int, positive_int, seed


def load_training_images(manifest_path: Path) -> Tuple[List[HistogramImage], ImageConfig, PlaneExtent, str]:
    """Unjammed images of a manifest plus their common geometry; jammed entries are refused."""
    manifest = read_manifest(manifest_path)
    jammed = manifest.select(label=Label.JAMMED)
    if jammed:
        raise LabelError(
            f"Training manifest holds {len(jammed)} jammed images (first: {jammed[0].path}), "
            "the detector must be trained on unjammed images only"
        )
    images = [read_image_pgm(resolve_entry(manifest_path, entry)) for entry in manifest]
    if len(images) < 2:  # noqa: PLR2004
        raise InsufficientDataError(
            f"Training needs at least 2 unjammed images to derive a threshold, got {len(images)}"
        )

    extent = manifest.extent or images[0].extent
    image_config = manifest.image_config or ImageConfig(
        n=images[0].n, m_rows=images[0].m_rows, n_cols=images[0].n_cols
    )
    for entry, image in zip(manifest, images):
        if image.extent != extent:
            raise DimensionMismatchError(f"{entry.path}: image extent differs from the dataset extent")
    return images, image_config, extent, manifest_hash(manifest)


class Command(BaseCommand):
    """Implementation of the train command."""

    name = "train"
    help = "Train the autoencoder on unjammed images and store the detector model"

    def add_arguments(self, parser):
        """Add parser arguments to the train command."""
        parser.add_argument("--images", required=True, help="Image manifest holding unjammed images only.")
        parser.add_argument("--epochs", type=non_negative_int, default=250, help="Training epochs.")
        parser.add_argument("--hidden", type=positive_int, default=16, help="Encoder units.")
        parser.add_argument("--beta", type=float, default=0.5, help="Sparsity regularization weight.")
        parser.add_argument("--rho", type=float, default=0.05, help="Target mean activation.")
        parser.add_argument("--l2", type=float, default=0.01, help="L2 weight regularization.")
        parser.add_argument(
            "--learning-rate", type=float, default=0.001, dest="learning_rate", help="Adam learning rate."
        )
        parser.add_argument(
            "--encoder",
            choices=[Transfer.LOGSIG.value, Transfer.SATLIN.value],
            default=Transfer.LOGSIG.value,
            help="Encoder transfer function.",
        )
        parser.add_argument(
            "--threshold-policy",
            choices=[policy.value for policy in ThresholdPolicy],
            default=ThresholdPolicy.MEAN_STD.value,
            dest="threshold_policy",
            help="mean_std: mean + 3.5 std of the training MSEs, max: largest training MSE.",
        )
        parser.add_argument("--seed", type=seed, default=0, help="Weight initialization seed.")
        parser.add_argument("--out-model", required=True, dest="out_model", help="Model file to write.")

    def handle(self, **options):
        """Handle execution of the train command."""
        cfg = TrainConfig(
            epochs=options["epochs"],
            sparsity_weight=options["beta"],
            sparsity_proportion=options["rho"],
            l2_weight=options["l2"],
            learning_rate=options["learning_rate"],
            seed=options["seed"],
        )
        arch = Architecture(k_hidden=options["hidden"], enc_transfer=options["encoder"])
        policy = ThresholdPolicy(options["threshold_policy"])

        manifest_path = Path(options["images"])
        images, image_config, extent, dataset_hash = load_training_images(manifest_path)
        detector = build_detector(images, cfg, arch, image_config, extent, policy)

        header = provenance(
            options["seed"],
            {"train": cfg.echo(), "architecture": arch.echo(), "threshold_policy": policy.value},
            manifest_hash=dataset_hash,
        )
        out = Path(options["out_model"])
        out.parent.mkdir(parents=True, exist_ok=True)
        save_model(model_file(detector, header), out)
        logger.info("Trained detector", images=len(images), tau=detector.tau, model=str(out))
