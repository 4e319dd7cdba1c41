"""Sparse autoencoder training.

The loss is the mean reconstruction MSE over the batch, plus `l2_weight / 2` times the squared weights (biases
excluded), plus `sparsity_weight` times the KL divergence between the target activation `sparsity_proportion` and
the mean activation of every hidden unit.
"""

import math
from typing import Iterable, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from pydantic import Field, validator

from jamming_detector.base import ConfigModel, logger
from jamming_detector.exceptions import InsufficientDataError, TrainingDivergedError
from jamming_detector.imaging import HistogramImage, stack_gray

from .model import AutoencoderModel, Transfer, score_images

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
ACTIVATION_CLAMP = 1e-8


class TrainConfig(ConfigModel):
    """Optimizer and regularization settings."""

    epochs: int = Field(250, ge=0)
    sparsity_weight: float = Field(0.5, ge=0.0)
    sparsity_proportion: float = Field(0.05, gt=0.0, lt=1.0)
    l2_weight: float = Field(0.01, ge=0.0)
    learning_rate: float = Field(0.001, gt=0.0)
    seed: int = Field(0, ge=0, le=2**64 - 1)
    init_scale: Optional[float] = Field(None, gt=0.0)


class Architecture(ConfigModel):
    """Bottleneck size and encoder transfer function."""

    k_hidden: int = Field(16, ge=1)
    enc_transfer: Transfer = Transfer.LOGSIG

    @validator("enc_transfer", pre=True)
    def _parse_transfer(cls, value):  # pylint: disable=no-self-argument
        transfer = Transfer.parse(value)
        if transfer is Transfer.PURELIN:
            raise ValueError("The encoder transfer function must be logsig or satlin")
        return transfer


class LossParts(NamedTuple):
    """Terms of the training loss."""

    recon: float
    l2: float
    sparsity: float


class Gradients(NamedTuple):
    """Loss gradients, one per model parameter array."""

    enc_weights: np.ndarray
    enc_bias: np.ndarray
    dec_weights: np.ndarray
    dec_bias: np.ndarray


class TrainResult(NamedTuple):
    """Trained model, per-image training MSEs and the total loss at the start of every epoch."""

    model: AutoencoderModel
    train_mses: np.ndarray
    loss_history: List[float]


def _kl_divergence(rho: float, rho_hat: np.ndarray) -> np.ndarray:
    return rho * np.log(rho / rho_hat) + (1.0 - rho) * np.log((1.0 - rho) / (1.0 - rho_hat))


def loss_and_gradients(
    m: AutoencoderModel, batch: np.ndarray, cfg: TrainConfig
) -> Tuple[float, LossParts, Gradients]:
    """Total loss, its parts and the analytic gradients for a `(B, d)` batch."""
    batch = np.atleast_2d(np.asarray(batch, dtype=np.float64))
    size = batch.shape[0]
    if not size:
        raise InsufficientDataError("Loss needs at least one vector")

    pre_activation = batch @ m.enc_weights.T + m.enc_bias
    hidden = m.enc_transfer.apply(pre_activation)
    reconstruction = hidden @ m.dec_weights.T + m.dec_bias
    error = reconstruction - batch

    raw_activation = hidden.mean(axis=0)
    activation = np.clip(raw_activation, ACTIVATION_CLAMP, 1.0 - ACTIVATION_CLAMP)
    rho = cfg.sparsity_proportion

    parts = LossParts(
        recon=float(np.mean(error**2)),
        l2=0.5 * cfg.l2_weight * float(np.sum(m.enc_weights**2) + np.sum(m.dec_weights**2)),
        sparsity=cfg.sparsity_weight * float(np.sum(_kl_divergence(rho, activation))),
    )

    grad_output = 2.0 * error / error.size
    grad_dec_weights = grad_output.T @ hidden + cfg.l2_weight * m.dec_weights
    grad_dec_bias = grad_output.sum(axis=0)

    grad_hidden = grad_output @ m.dec_weights
    # Clamped activations are constant, so they don't propagate a sparsity gradient.
    in_range = (raw_activation >= ACTIVATION_CLAMP) & (raw_activation <= 1.0 - ACTIVATION_CLAMP)
    grad_activation = cfg.sparsity_weight * (-rho / activation + (1.0 - rho) / (1.0 - activation)) * in_range
    grad_hidden = grad_hidden + grad_activation / size

    grad_pre_activation = grad_hidden * m.enc_transfer.derivative(pre_activation, hidden)
    grad_enc_weights = grad_pre_activation.T @ batch + cfg.l2_weight * m.enc_weights
    grad_enc_bias = grad_pre_activation.sum(axis=0)

    gradients = Gradients(grad_enc_weights, grad_enc_bias, grad_dec_weights, grad_dec_bias)
    return sum(parts), parts, gradients


def loss(m: AutoencoderModel, batch: np.ndarray, cfg: TrainConfig) -> Tuple[float, LossParts]:
    """Total loss and its parts."""
    total, parts, _ = loss_and_gradients(m, batch, cfg)
    return total, parts


def initial_model(d: int, arch: Architecture, cfg: TrainConfig) -> AutoencoderModel:
    """Seeded uniform initialization within `+-init_scale`, biases zero."""
    scale = cfg.init_scale if cfg.init_scale is not None else math.sqrt(6.0 / (d + arch.k_hidden))
    rng = np.random.default_rng(cfg.seed)
    return AutoencoderModel(
        enc_weights=rng.uniform(-scale, scale, (arch.k_hidden, d)),
        enc_bias=np.zeros(arch.k_hidden),
        dec_weights=rng.uniform(-scale, scale, (d, arch.k_hidden)),
        dec_bias=np.zeros(d),
        enc_transfer=arch.enc_transfer,
    )


def train(
    images: Union[np.ndarray, Iterable[HistogramImage]],
    cfg: TrainConfig,
    arch: Architecture,
) -> TrainResult:
    """Full-batch Adam on the unjammed training images."""
    batch = images if isinstance(images, np.ndarray) else stack_gray(images)
    if not batch.size:
        raise InsufficientDataError("Training needs at least one image")
    batch = np.atleast_2d(batch)

    model = initial_model(batch.shape[1], arch, cfg)
    params = [model.enc_weights, model.enc_bias, model.dec_weights, model.dec_bias]
    first_moments = [np.zeros_like(param) for param in params]
    second_moments = [np.zeros_like(param) for param in params]
    loss_history = []

    for epoch in range(1, cfg.epochs + 1):
        total, _, gradients = loss_and_gradients(model, batch, cfg)
        if not math.isfinite(total):
            raise TrainingDivergedError(epoch)
        loss_history.append(total)

        first_correction = 1.0 - ADAM_BETA1**epoch
        second_correction = 1.0 - ADAM_BETA2**epoch
        for param, gradient, first, second in zip(params, gradients, first_moments, second_moments):
            first *= ADAM_BETA1
            first += (1.0 - ADAM_BETA1) * gradient
            second *= ADAM_BETA2
            second += (1.0 - ADAM_BETA2) * gradient**2
            step = (first / first_correction) / (np.sqrt(second / second_correction) + ADAM_EPSILON)
            param -= cfg.learning_rate * step

        logger.debug("Epoch finished", epoch=epoch, loss=total)

    train_mses = score_images(model, batch)
    if not np.isfinite(train_mses).all():
        raise TrainingDivergedError(cfg.epochs)

    logger.info(
        "Trained autoencoder",
        images=batch.shape[0],
        d=model.d,
        k_hidden=model.k_hidden,
        epochs=cfg.epochs,
        final_loss=loss_history[-1] if loss_history else None,
    )
    return TrainResult(model, train_mses, loss_history)
