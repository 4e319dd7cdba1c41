"""Bivariate histogram images of I-Q sample windows.

The I-Q plane inside a `PlaneExtent` is split into `m_rows x n_cols` tiles. Column `c` covers
`[i_min + c * di, i_min + (c + 1) * di)` and row `r` covers `(q_max - (r + 1) * dq, q_max - r * dq]`, so row 0 holds
the highest Q values. The outer edges `i = i_max` and `q = q_min` belong to the last column and the last row.
Samples outside the extent are discarded and counted, tile counts above 255 are written as 255.
"""

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Iterable, List, Literal, NamedTuple, Union

import numpy as np
from pydantic import Field, root_validator, validator

from .base import ConfigModel, logger
from .exceptions import DimensionMismatchError, InsufficientDataError
from .simulation import IQRecording

MAX_PIXEL = 255
DISCARD_WARNING_RATIO = 0.01


def _colormap() -> np.ndarray:
    levels = np.arange(256, dtype=np.int64)
    low = np.stack([np.zeros(128, dtype=np.int64), 2 * levels[:128], 255 - 2 * levels[:128]], axis=1)
    high = np.stack([2 * levels[128:] - 255, 510 - 2 * levels[128:], np.zeros(128, dtype=np.int64)], axis=1)
    table = np.concatenate([low, high]).astype(np.uint8)
    table.flags.writeable = False
    return table


# Linear blue -> green -> red ramp indexed by the clipped tile count.
COLORMAP = _colormap()


class ImageMode(Enum):
    """Number of planes of an image."""

    GRAY = "gray"
    COLOR = "color"


class PlaneExtent(ConfigModel):
    """Rectangle of the I-Q plane covered by an image."""

    i_min: float
    i_max: float
    q_min: float
    q_max: float

    @root_validator(skip_on_failure=True)
    def _check_bounds(cls, values):  # pylint: disable=no-self-argument
        if not all(np.isfinite(value) for value in values.values()):
            raise ValueError("extent bounds must be finite")
        if not values["i_min"] < values["i_max"]:
            raise ValueError("i_min must be lower than i_max")
        if not values["q_min"] < values["q_max"]:
            raise ValueError("q_min must be lower than q_max")
        return values

    @classmethod
    def symmetric(cls, edge: float) -> "PlaneExtent":
        """Square `[-edge, edge]` in both I and Q."""
        return cls(i_min=-edge, i_max=edge, q_min=-edge, q_max=edge)

    def as_tuple(self):
        """Bounds in `(i_min, i_max, q_min, q_max)` order."""
        return (self.i_min, self.i_max, self.q_min, self.q_max)


class FixedExtent(ConfigModel):
    """Use the given extent as is."""

    policy: Literal["fixed"] = "fixed"
    extent: PlaneExtent


class AutoExtent(ConfigModel):
    """Derive a symmetric square extent from training samples."""

    policy: Literal["auto"] = "auto"
    percentile: float = Field(99.9, gt=0.0, le=100.0)
    margin: float = Field(1.05, gt=0.0)


ExtentPolicy = Union[FixedExtent, AutoExtent]


class ImageConfig(ConfigModel):
    """Geometry of the images fed to the detector."""

    n: int = Field(100_000, ge=1)
    m_rows: int = Field(224, ge=2)
    n_cols: int = Field(224, ge=2)
    mode: ImageMode = ImageMode.GRAY
    extent_policy: ExtentPolicy = AutoExtent()

    @validator("mode", pre=True)
    def _parse_mode(cls, value):  # pylint: disable=no-self-argument
        return ImageMode(value.lower()) if isinstance(value, str) else value

    @property
    def d(self) -> int:
        """Number of pixels in one plane."""
        return self.m_rows * self.n_cols


class HistogramImage(NamedTuple):
    """Tile counts of one window, clipped to 255.

    `pixels` has shape `(m_rows, n_cols)` in gray mode and `(m_rows, n_cols, 3)` in color mode.
    """

    pixels: np.ndarray
    extent: PlaneExtent
    n_used: int
    n_discarded: int

    @property
    def mode(self) -> ImageMode:
        """Gray or color, from the pixel array shape."""
        return ImageMode.COLOR if self.pixels.ndim == 3 else ImageMode.GRAY  # noqa: PLR2004

    @property
    def m_rows(self) -> int:
        """Number of tile rows."""
        return int(self.pixels.shape[0])

    @property
    def n_cols(self) -> int:
        """Number of tile columns."""
        return int(self.pixels.shape[1])

    @property
    def n(self) -> int:
        """Number of samples in the window."""
        return self.n_used + self.n_discarded

    @property
    def discard_ratio(self) -> float:
        """Fraction of the window that fell outside the extent."""
        return self.n_discarded / self.n if self.n else 0.0

    @property
    def discard_warning(self) -> bool:
        """True when more than 1 % of the window was discarded, usually a mis-sized extent."""
        return self.discard_ratio > DISCARD_WARNING_RATIO


def _as_samples(samples) -> np.ndarray:
    if isinstance(samples, IQRecording):
        return samples.samples
    array = np.asarray(samples)
    if array.ndim == 2 and array.shape[1] == 2 and not np.iscomplexobj(array):  # noqa: PLR2004
        return array[:, 0] + 1j * array[:, 1]
    return array.astype(np.complex128, copy=False).reshape(-1)


def compute_extent(training_samples, policy: ExtentPolicy) -> PlaneExtent:
    """Resolve the plane extent for a policy.

    `AutoExtent` returns `[-E, E]` squared with `E = margin * percentile(max(|i|, |q|))`.
    """
    if isinstance(policy, FixedExtent):
        return policy.extent

    samples = _as_samples(training_samples)
    if not samples.size:
        raise InsufficientDataError("Can't derive an extent from zero samples")
    magnitude = np.maximum(np.abs(samples.real), np.abs(samples.imag))
    edge = policy.margin * float(np.percentile(magnitude, policy.percentile))
    if not edge > 0:
        raise InsufficientDataError("Training samples are all zero, extent would be empty")
    return PlaneExtent.symmetric(edge)


def tile_counts(samples, m_rows: int, n_cols: int, extent: PlaneExtent) -> np.ndarray:
    """Unclipped `(m_rows, n_cols)` tile counts of the samples inside the extent."""
    samples = _as_samples(samples)
    i_values = samples.real
    q_values = samples.imag
    inside = (i_values >= extent.i_min) & (i_values <= extent.i_max)
    inside &= (q_values >= extent.q_min) & (q_values <= extent.q_max)
    i_values = i_values[inside]
    q_values = q_values[inside]

    i_step = (extent.i_max - extent.i_min) / n_cols
    q_step = (extent.q_max - extent.q_min) / m_rows
    column_edges = extent.i_min + np.arange(n_cols) * i_step
    # Rows are binned on -q so the closed upper edge becomes a left edge.
    row_edges = -(extent.q_max - np.arange(m_rows) * q_step)

    columns = np.searchsorted(column_edges, i_values, side="right") - 1
    rows = np.searchsorted(row_edges, -q_values, side="right") - 1
    counts = np.bincount(rows * n_cols + columns, minlength=m_rows * n_cols)
    return counts.reshape(m_rows, n_cols)


def make_image(samples, cfg: ImageConfig, extent: PlaneExtent) -> HistogramImage:
    """Encode exactly `cfg.n` samples into one histogram image."""
    samples = _as_samples(samples)
    if samples.size != cfg.n:
        raise DimensionMismatchError(f"Expected {cfg.n} samples per image, got {samples.size}")

    counts = tile_counts(samples, cfg.m_rows, cfg.n_cols, extent)
    n_used = int(counts.sum())
    pixels = np.minimum(counts, MAX_PIXEL).astype(np.uint8)
    if cfg.mode is ImageMode.COLOR:
        pixels = COLORMAP[pixels]

    image = HistogramImage(pixels, extent, n_used, cfg.n - n_used)
    if image.discard_warning:
        logger.warning(
            "Samples outside of the image extent",
            n_discarded=image.n_discarded,
            discard_ratio=round(image.discard_ratio, 4),
        )
    return image


def window_stream(rec, cfg: ImageConfig, extent: PlaneExtent, workers: int = 1) -> List[HistogramImage]:
    """Encode consecutive non-overlapping windows of `cfg.n` samples, dropping a trailing partial window."""
    samples = _as_samples(rec)
    count = samples.size // cfg.n
    windows = [samples[index * cfg.n : (index + 1) * cfg.n] for index in range(count)]
    if count and samples.size % cfg.n:
        logger.debug("Dropping trailing partial window", samples=samples.size % cfg.n)

    def encode(window):
        return make_image(window, cfg, extent)

    if workers > 1 and count > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(encode, windows))
    return [encode(window) for window in windows]


def stack_gray(images: Iterable[HistogramImage]) -> np.ndarray:
    """Flatten gray images row-major into a `(B, d)` matrix scaled to `[0, 1]`."""
    images = list(images)
    if not images:
        return np.zeros((0, 0), dtype=np.float64)
    shape = images[0].pixels.shape
    for image in images:
        if image.mode is not ImageMode.GRAY:
            raise DimensionMismatchError("The detector consumes gray images only")
        if image.pixels.shape != shape:
            raise DimensionMismatchError(f"Image shape {image.pixels.shape} differs from {shape}")
    return np.stack([image.pixels.reshape(-1) for image in images]).astype(np.float64) / MAX_PIXEL
