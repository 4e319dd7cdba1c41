"""Custom exceptions for the jamming detector."""


class JammingDetectorError(Exception):
    """Base exception for the jamming_detector package."""


class ConfigurationError(JammingDetectorError):
    """Raised when a configuration value is out of its documented range."""


class FileFormatError(JammingDetectorError):
    """Raised when a file does not follow its documented layout."""


class NonFiniteSampleError(FileFormatError):
    """Raised when a capture contains NaN or infinite values."""

    def __init__(self, index: int):
        """Initialize the exception."""
        super().__init__(f"Non-finite I-Q sample at index {index}")
        self.index = index


class ModelFormatError(FileFormatError):
    """Raised when a model file can't be parsed."""


class ModelVersionError(ModelFormatError):
    """Raised when a model file has an unsupported format version."""


class ThresholdMismatchError(ModelFormatError):
    """Raised when a stored threshold disagrees with the stored training statistics."""


class DimensionMismatchError(JammingDetectorError):
    """Raised when vectors, images or models have incompatible dimensions."""


class MissingGroundTruthError(JammingDetectorError):
    """Raised when an operation needs transmitted bits that the recording doesn't carry."""


class InsufficientDataError(JammingDetectorError):
    """Raised when there are too few values for a statistic or a split."""


class LabelError(JammingDetectorError):
    """Raised when images carry a label that the operation can't accept."""


class TrainingDivergedError(JammingDetectorError):
    """Raised when the training loss becomes non-finite."""

    def __init__(self, epoch: int):
        """Initialize the exception."""
        super().__init__(f"Training diverged at epoch {epoch}")
        self.epoch = epoch
