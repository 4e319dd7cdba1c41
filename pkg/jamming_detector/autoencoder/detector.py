"""Detection threshold and the jammed / unjammed decision rule."""

from enum import Enum
from typing import Iterable, List, NamedTuple, Sequence, Union

import numpy as np

from jamming_detector.base import Label, logger
from jamming_detector.exceptions import DimensionMismatchError, InsufficientDataError
from jamming_detector.imaging import HistogramImage, ImageConfig, ImageMode, PlaneExtent, stack_gray

from .model import AutoencoderModel, MseScore, score_images
from .training import Architecture, TrainConfig, train

THRESHOLD_COEFFICIENT = 3.5


class ThresholdPolicy(Enum):
    """How the detection threshold is derived from the training MSEs."""

    MEAN_STD = "mean_std"
    MAX = "max"


class TrainingStats(NamedTuple):
    """Summary of the training MSE distribution."""

    mean: float
    std: float
    max: float
    count: int


def training_stats(train_mses: Sequence[float]) -> TrainingStats:
    """Mean, sample standard deviation and maximum of the training MSEs."""
    values = np.asarray(train_mses, dtype=np.float64)
    if values.size < 2:  # noqa: PLR2004
        raise InsufficientDataError(f"Threshold needs at least 2 training MSEs, got {values.size}")
    return TrainingStats(float(values.mean()), float(values.std(ddof=1)), float(values.max()), int(values.size))


def threshold(train_mses: Sequence[float]) -> float:
    """`mean + 3.5 * std` of the training MSEs, using the sample standard deviation."""
    stats = training_stats(train_mses)
    return stats.mean + THRESHOLD_COEFFICIENT * stats.std


def threshold_from_stats(stats: TrainingStats, policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD) -> float:
    """Threshold implied by stored training statistics."""
    if policy is ThresholdPolicy.MAX:
        return stats.max
    return stats.mean + THRESHOLD_COEFFICIENT * stats.std


def select_threshold(train_mses: Sequence[float], policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD) -> float:
    """Threshold under the given policy."""
    return threshold_from_stats(training_stats(train_mses), policy)


class DetectorModel(NamedTuple):
    """Deployable detector: autoencoder, threshold and the image geometry it was trained on."""

    autoencoder: AutoencoderModel
    tau: float
    stats: TrainingStats
    image_config: ImageConfig
    extent: PlaneExtent
    threshold_policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD

    @property
    def train_mse_mean(self) -> float:
        """Mean training MSE."""
        return self.stats.mean

    @property
    def train_mse_std(self) -> float:
        """Sample standard deviation of the training MSEs."""
        return self.stats.std

    @property
    def train_set_size(self) -> int:
        """Number of training images."""
        return self.stats.count


class Verdict(NamedTuple):
    """Decision for one image."""

    label: Label
    score: MseScore


def _check_geometry(detector: DetectorModel, image: HistogramImage):
    if image.mode is not ImageMode.GRAY:
        raise DimensionMismatchError("The detector consumes gray images only")
    expected = (detector.image_config.m_rows, detector.image_config.n_cols)
    if image.pixels.shape != expected:
        raise DimensionMismatchError(f"Image shape {image.pixels.shape} doesn't match the detector's {expected}")


def decide(score: float, tau: float) -> Label:
    """Jammed when the score is equal or greater than the threshold."""
    return Label.JAMMED if score >= tau else Label.UNJAMMED


def classify_images(detector: DetectorModel, images: Iterable[HistogramImage]) -> List[Verdict]:
    """Verdicts for a batch of images."""
    images = list(images)
    for image in images:
        _check_geometry(detector, image)
    scores = score_images(detector.autoencoder, stack_gray(images)) if images else []
    return [Verdict(decide(float(score), detector.tau), float(score)) for score in scores]


def classify(detector: DetectorModel, img: HistogramImage) -> Verdict:
    """Score one image and compare it with the threshold."""
    return classify_images(detector, [img])[0]


def build_detector(
    images: Union[np.ndarray, Iterable[HistogramImage]],
    cfg: TrainConfig,
    arch: Architecture,
    image_config: ImageConfig,
    extent: PlaneExtent,
    policy: ThresholdPolicy = ThresholdPolicy.MEAN_STD,
) -> DetectorModel:
    """Train on unjammed images and derive the threshold from their training MSEs."""
    batch = images if isinstance(images, np.ndarray) else stack_gray(images)
    if batch.shape[0] < 2:  # noqa: PLR2004
        raise InsufficientDataError(f"Threshold needs at least 2 training images, got {batch.shape[0]}")
    if batch.shape[1] != image_config.d:
        raise DimensionMismatchError(f"Images have {batch.shape[1]} pixels, image config expects {image_config.d}")

    result = train(batch, cfg, arch)
    stats = training_stats(result.train_mses)
    tau = threshold_from_stats(stats, policy)
    logger.info("Detection threshold", tau=tau, policy=policy.value, train_mse_mean=stats.mean)
    return DetectorModel(result.model, tau, stats, image_config, extent, policy)
