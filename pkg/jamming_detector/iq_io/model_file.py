"""Detector model files.

A model file is one JSON document. Floats are written with 17 significant digits so a load, save, load cycle gives
identical values. The threshold is stored next to the training statistics it was derived from and is checked on
load.
"""

import math
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, NamedTuple, Optional

import ijson
import numpy as np
from pydantic import ValidationError

from jamming_detector.autoencoder import AutoencoderModel, DetectorModel, ThresholdPolicy, Transfer, TrainingStats
from jamming_detector.autoencoder.detector import threshold_from_stats
from jamming_detector.base import Pathable, logger
from jamming_detector.exceptions import ModelFormatError, ModelVersionError, ThresholdMismatchError
from jamming_detector.imaging import ImageConfig, PlaneExtent
from jamming_detector.utils import format_float

MODEL_FORMAT_VERSION = "bloodhound-model/1"
TAU_RELATIVE_TOLERANCE = 1e-9

_ARRAYS = ("enc_weights", "enc_bias", "dec_weights", "dec_bias")


class ModelFile(NamedTuple):
    """Detector plus the provenance of the run that trained it."""

    detector: DetectorModel
    provenance: Mapping[str, str] = {}
    format_version: str = MODEL_FORMAT_VERSION


def _encode(value: Any) -> str:
    if isinstance(value, np.ndarray):
        if value.ndim == 1:
            return "[" + ",".join(format_float(item) for item in value) + "]"
        return "[\n" + ",\n".join(_encode(row) for row in value) + "\n]"
    if isinstance(value, bool) or value is None:
        return {True: "true", False: "false", None: "null"}[value]
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ModelFormatError("Model values must be finite")
        return format_float(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, Mapping):
        return "{" + ", ".join(f"{_encode(str(key))}: {_encode(item)}" for key, item in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_encode(item) for item in value) + "]"
    raise TypeError(f"Can't serialize {type(value).__name__}")


def _document(model: ModelFile) -> Iterable[str]:
    detector = model.detector
    autoencoder = detector.autoencoder
    yield f'"format_version": {_encode(model.format_version)}'
    yield f'"provenance": {_encode(dict(model.provenance))}'
    yield f'"image_config": {_encode(detector.image_config.echo())}'
    yield f'"extent": {_encode(detector.extent.echo())}'
    yield f'"threshold_policy": {_encode(detector.threshold_policy.value)}'
    yield f'"tau": {_encode(detector.tau)}'
    yield f'"train_mse_mean": {_encode(detector.stats.mean)}'
    yield f'"train_mse_std": {_encode(detector.stats.std)}'
    yield f'"train_mse_max": {_encode(detector.stats.max)}'
    yield f'"train_set_size": {_encode(detector.stats.count)}'
    fields = {
        "d": autoencoder.d,
        "k_hidden": autoencoder.k_hidden,
        "enc_transfer": autoencoder.enc_transfer.value,
        "dec_transfer": autoencoder.dec_transfer.value,
    }
    parts = [f"{_encode(key)}: {_encode(value)}" for key, value in fields.items()]
    parts.extend(f'"{name}": {_encode(np.asarray(getattr(autoencoder, name)))}' for name in _ARRAYS)
    yield '"autoencoder": {\n' + ",\n".join(parts) + "\n}"


def save_model(model: ModelFile, path: Pathable):
    """Write a model file."""
    model.detector.autoencoder.check()
    Path(path).write_text("{\n" + ",\n".join(_document(model)) + "\n}\n", encoding="utf-8")
    logger.info("Saved detector model", path=str(path), tau=model.detector.tau)


def _autoencoder(content: Dict[str, Any]) -> AutoencoderModel:
    try:
        arrays = {name: np.asarray(content[name], dtype=np.float64) for name in _ARRAYS}
        model = AutoencoderModel(
            **arrays,
            enc_transfer=Transfer.parse(content["enc_transfer"]),
            dec_transfer=Transfer.parse(content["dec_transfer"]),
        ).check()
    except (KeyError, TypeError, ValueError) as error:
        raise ModelFormatError(f"Malformed autoencoder section: {error}") from error
    if (model.d, model.k_hidden) != (content.get("d"), content.get("k_hidden")):
        raise ModelFormatError("Autoencoder dimensions disagree with the stored weights")
    return model


def load_model(path: Pathable) -> ModelFile:
    """Read a model file, checking its version and threshold consistency."""
    content: Dict[str, Any] = {}
    try:
        with open(path, "rb") as file:
            for key, value in ijson.kvitems(file, "", use_float=True):
                if key == "format_version" and value != MODEL_FORMAT_VERSION:
                    raise ModelVersionError(f"Unsupported model format `{value}`, expected `{MODEL_FORMAT_VERSION}`")
                content[key] = value
    except ijson.JSONError as error:
        raise ModelFormatError(f"{path}: {error}") from error

    if "format_version" not in content:
        raise ModelVersionError(f"{path}: missing format_version")

    try:
        image_config = ImageConfig.parse_obj(content["image_config"])
        extent = PlaneExtent.parse_obj(content["extent"])
        policy = ThresholdPolicy(content.get("threshold_policy", ThresholdPolicy.MEAN_STD.value))
        tau = float(content["tau"])
        stats = TrainingStats(
            mean=float(content["train_mse_mean"]),
            std=float(content["train_mse_std"]),
            max=float(content.get("train_mse_max", math.nan)),
            count=int(content["train_set_size"]),
        )
        autoencoder = _autoencoder(content["autoencoder"])
    except (KeyError, TypeError, ValueError, ValidationError) as error:
        raise ModelFormatError(f"{path}: {error}") from error

    expected = threshold_from_stats(stats, policy)
    if not math.isclose(tau, expected, rel_tol=TAU_RELATIVE_TOLERANCE):
        raise ThresholdMismatchError(f"{path}: stored tau {tau!r} differs from {policy.value} statistics {expected!r}")
    if image_config.d != autoencoder.d:
        raise ModelFormatError(f"{path}: image config has {image_config.d} pixels, autoencoder expects {autoencoder.d}")

    provenance = {str(key): str(value) for key, value in (content.get("provenance") or {}).items()}
    detector = DetectorModel(autoencoder, tau, stats, image_config, extent, policy)
    return ModelFile(detector, provenance, content["format_version"])


def model_file(detector: DetectorModel, provenance: Optional[Mapping[str, str]] = None) -> ModelFile:
    """Wrap a detector for saving."""
    return ModelFile(detector, dict(provenance or {}))
