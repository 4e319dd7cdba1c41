"""Base types for the jamming detector."""

import json
from enum import Enum
from os import PathLike
from typing import Any, Dict, Union

import structlog
from pydantic import BaseModel

logger = structlog.get_logger("jamming-detector")

Pathable = Union[str, PathLike]
Metadata = Dict[str, str]


class Label(Enum):
    """Ground-truth or predicted class of a window of samples."""

    UNJAMMED = "Unjammed"
    JAMMED = "Jammed"

    @classmethod
    def parse(cls, value: str) -> "Label":
        """Parse a label regardless of case."""
        for item in cls:
            if item.value.lower() == str(value).strip().lower():
                return item
        raise ValueError(f"Invalid label `{value}`")


class JammerKind(Enum):
    """Jamming signal families."""

    NONE = "none"
    TONE = "tone"
    GAUSSIAN = "gaussian"
    DECEPTIVE = "deceptive"

    @classmethod
    def parse(cls, value: Union[str, "JammerKind"]) -> "JammerKind":
        """Parse a jammer kind regardless of case."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as error:
            raise ValueError(f"Invalid jammer kind `{value}`") from error


class ConfigModel(BaseModel):
    """Base class for immutable, validated configuration objects."""

    class Config:  # pylint: disable=too-few-public-methods
        """Pydantic configuration."""

        allow_mutation = False
        extra = "forbid"
        json_encoders = {bytes: bytes.hex}

    def echo(self) -> Dict[str, Any]:
        """JSON-compatible view used for provenance hashing and report echoes."""
        return json.loads(self.json())
