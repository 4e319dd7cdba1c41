"""Versioned on-disk formats: raw captures, images, manifests and model files."""

from .images import image_suffix, read_image_pgm, write_image_pgm
from .manifest import (
    MANIFEST_FORMAT_VERSION,
    DatasetManifest,
    ManifestEntry,
    manifest_hash,
    read_manifest,
    resolve_entry,
    write_manifest,
)
from .model_file import MODEL_FORMAT_VERSION, ModelFile, load_model, model_file, save_model
from .raw import IQFormat, read_raw_iq, write_raw_iq

__all__ = (
    "MANIFEST_FORMAT_VERSION",
    "MODEL_FORMAT_VERSION",
    "DatasetManifest",
    "IQFormat",
    "ManifestEntry",
    "ModelFile",
    "image_suffix",
    "load_model",
    "manifest_hash",
    "model_file",
    "read_image_pgm",
    "read_manifest",
    "read_raw_iq",
    "resolve_entry",
    "save_model",
    "write_image_pgm",
    "write_manifest",
    "write_raw_iq",
)
