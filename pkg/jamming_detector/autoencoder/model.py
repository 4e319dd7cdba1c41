"""Single-bottleneck autoencoder: encoder `A`, decoder `B`, reconstruction `B(A(x))`."""

from enum import Enum
from typing import Iterable, NamedTuple, Tuple, Union

import numpy as np
from scipy.special import expit

from jamming_detector.exceptions import DimensionMismatchError
from jamming_detector.imaging import MAX_PIXEL, HistogramImage, PlaneExtent, stack_gray

# Reconstruction error of one image, in the [0, 1] pixel-scaled space.
MseScore = float


class Transfer(Enum):
    """Layer transfer functions."""

    LOGSIG = "logsig"
    SATLIN = "satlin"
    PURELIN = "purelin"

    @classmethod
    def parse(cls, value: Union[str, "Transfer"]) -> "Transfer":
        """Parse a transfer function name regardless of case."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as error:
            raise ValueError(f"Invalid transfer function `{value}`") from error

    def apply(self, z: np.ndarray) -> np.ndarray:
        """Evaluate the transfer function."""
        if self is Transfer.LOGSIG:
            return expit(z)
        if self is Transfer.SATLIN:
            return np.clip(z, 0.0, 1.0)
        return z

    def derivative(self, z: np.ndarray, output: np.ndarray) -> np.ndarray:
        """Derivative with respect to `z`, given `output = apply(z)`."""
        if self is Transfer.LOGSIG:
            return output * (1.0 - output)
        if self is Transfer.SATLIN:
            return ((z > 0.0) & (z < 1.0)).astype(np.float64)
        return np.ones_like(z)


class AutoencoderModel(NamedTuple):
    """Weights and transfer functions of the autoencoder.

    Encoder weights are `(K, d)`, decoder weights `(d, K)`.
    """

    enc_weights: np.ndarray
    enc_bias: np.ndarray
    dec_weights: np.ndarray
    dec_bias: np.ndarray
    enc_transfer: Transfer = Transfer.LOGSIG
    dec_transfer: Transfer = Transfer.PURELIN

    @property
    def d(self) -> int:
        """Input (and output) dimension."""
        return int(self.enc_weights.shape[1])

    @property
    def k_hidden(self) -> int:
        """Number of encoder units."""
        return int(self.enc_weights.shape[0])

    def check(self) -> "AutoencoderModel":
        """Validate dimensions and finiteness of all weights."""
        k_hidden, d = self.enc_weights.shape
        expected = {
            "enc_bias": (k_hidden,),
            "dec_weights": (d, k_hidden),
            "dec_bias": (d,),
        }
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise DimensionMismatchError(f"{name} has shape {actual}, expected {shape}")
        if self.dec_transfer is not Transfer.PURELIN:
            raise ValueError("The decoder transfer function must be purelin")
        for name in ("enc_weights", "enc_bias", "dec_weights", "dec_bias"):
            if not np.isfinite(getattr(self, name)).all():
                raise ValueError(f"{name} contains non-finite values")
        return self


def flatten(img: HistogramImage) -> np.ndarray:
    """Row-major pixel vector of a gray image, scaled to `[0, 1]`."""
    return stack_gray([img])[0]


def unflatten(vector: np.ndarray, m_rows: int, n_cols: int, extent: PlaneExtent) -> HistogramImage:
    """Inverse of `flatten` for vectors holding multiples of 1/255 in `[0, 1]`."""
    vector = np.asarray(vector, dtype=np.float64)
    if vector.size != m_rows * n_cols:
        raise DimensionMismatchError(f"Vector of {vector.size} values can't fill a {m_rows}x{n_cols} image")
    if vector.size and (vector.min() < 0.0 or vector.max() > 1.0):
        raise ValueError("Vector values must be in [0, 1]")
    pixels = np.rint(vector * MAX_PIXEL).astype(np.uint8).reshape(m_rows, n_cols)
    return HistogramImage(pixels, extent, int(pixels.sum(dtype=np.int64)), 0)


def _as_matrix(m: AutoencoderModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (m.d,) or x.ndim > 2:  # noqa: PLR2004
        raise DimensionMismatchError(f"Input of shape {x.shape} doesn't match model dimension {m.d}")
    return x


def forward(m: AutoencoderModel, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Return `(hidden, reconstruction)` for one vector or a `(B, d)` batch."""
    x = _as_matrix(m, x)
    hidden = m.enc_transfer.apply(x @ m.enc_weights.T + m.enc_bias)
    reconstruction = m.dec_transfer.apply(hidden @ m.dec_weights.T + m.dec_bias)
    return hidden, reconstruction


def reconstruct(m: AutoencoderModel, x: np.ndarray) -> np.ndarray:
    """Reconstruction only."""
    return forward(m, x)[1]


def mse(x: np.ndarray, y: np.ndarray) -> MseScore:
    """Mean squared error `(1/d) * sum((x - y)^2)`."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.size != y.size:
        raise DimensionMismatchError(f"Can't compare vectors of length {x.size} and {y.size}")
    if not x.size:
        raise DimensionMismatchError("Can't compute the MSE of empty vectors")
    return float(np.mean((x - y) ** 2))


def score_images(m: AutoencoderModel, images: Union[np.ndarray, Iterable[HistogramImage]]) -> np.ndarray:
    """Per-image reconstruction MSE for a batch of images or a `(B, d)` matrix."""
    matrix = images if isinstance(images, np.ndarray) else stack_gray(images)
    if not matrix.size:
        return np.zeros(0, dtype=np.float64)
    matrix = _as_matrix(m, np.atleast_2d(matrix))
    return np.mean((matrix - reconstruct(m, matrix)) ** 2, axis=1)
