"""Sparse autoencoder anomaly detector."""

from .detector import (
    THRESHOLD_COEFFICIENT,
    DetectorModel,
    ThresholdPolicy,
    TrainingStats,
    Verdict,
    build_detector,
    classify,
    classify_images,
    decide,
    select_threshold,
    threshold,
    threshold_from_stats,
    training_stats,
)
from .model import AutoencoderModel, MseScore, Transfer, flatten, forward, mse, reconstruct, score_images, unflatten
from .training import (
    Architecture,
    Gradients,
    LossParts,
    TrainConfig,
    TrainResult,
    initial_model,
    loss,
    loss_and_gradients,
    train,
)

__all__ = (
    "THRESHOLD_COEFFICIENT",
    "Architecture",
    "AutoencoderModel",
    "DetectorModel",
    "Gradients",
    "LossParts",
    "MseScore",
    "ThresholdPolicy",
    "TrainConfig",
    "TrainResult",
    "TrainingStats",
    "Transfer",
    "Verdict",
    "build_detector",
    "classify",
    "classify_images",
    "decide",
    "flatten",
    "forward",
    "initial_model",
    "loss",
    "loss_and_gradients",
    "mse",
    "reconstruct",
    "score_images",
    "select_threshold",
    "threshold",
    "threshold_from_stats",
    "train",
    "training_stats",
    "unflatten",
)
