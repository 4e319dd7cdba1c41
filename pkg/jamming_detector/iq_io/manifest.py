"""Line-oriented dataset manifests.

```
# format_version=jamdet-manifest/1
# tool=jamdet
# extent=-1.5 1.5 -1.5 1.5
path=unjammed-0000.pgm label=Unjammed rjp=0.0 jammer_kind=none seed=42
```

Header lines are `# key=value`, every other non-empty line is one entry made of shell-quoted `key=value` tokens.
Entry paths are relative to the manifest's directory.
"""

import hashlib
import shlex
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

from pydantic import ValidationError, validator

from jamming_detector.base import ConfigModel, Label, Pathable
from jamming_detector.exceptions import FileFormatError
from jamming_detector.imaging import ImageConfig, ImageMode, PlaneExtent
from jamming_detector.utils import canonical_json, comment_lines, format_float

MANIFEST_FORMAT_VERSION = "jamdet-manifest/1"


class ManifestEntry(ConfigModel):
    """One file of a dataset with its label and generation parameters."""

    path: str
    label: Label
    rjp: Optional[float] = None
    jammer_kind: Optional[str] = None
    ror: Optional[int] = None
    jor: Optional[int] = None
    n: Optional[int] = None
    hardware_tag: Optional[str] = None
    jammer_hardware_tag: Optional[str] = None
    seed: Optional[int] = None
    source: Optional[str] = None
    window: Optional[int] = None

    @validator("label", pre=True)
    def _parse_label(cls, value):  # pylint: disable=no-self-argument
        return value if isinstance(value, Label) else Label.parse(value)

    @validator("path")
    def _relative_path(cls, value):  # pylint: disable=no-self-argument
        if not value or Path(value).is_absolute() or ".." in Path(value).parts:
            raise ValueError(f"Manifest paths must be relative and inside the dataset directory, got `{value}`")
        return value

    def tokens(self) -> Iterable[str]:
        """`key=value` tokens of the set fields."""
        for key, value in self:
            if value is None:
                continue
            if isinstance(value, Label):
                value = value.value
            elif isinstance(value, float):
                value = repr(value)
            yield f"{key}={value}"

    def canonical(self) -> Dict[str, Any]:
        """Order-independent identity used for hashing."""
        return {key: value for key, value in self.echo().items() if value is not None}


class DatasetManifest:
    """Labeled file list plus `key=value` header."""

    def __init__(self, entries: Iterable[ManifestEntry] = (), header: Optional[Mapping[str, str]] = None):
        """Initialize the manifest, rejecting duplicate paths."""
        self.entries: List[ManifestEntry] = list(entries)
        self.header: Dict[str, str] = dict(header or {})
        self.format_version = MANIFEST_FORMAT_VERSION

        seen = set()
        for entry in self.entries:
            if entry.path in seen:
                raise FileFormatError(f"Duplicate manifest path `{entry.path}`")
            seen.add(entry.path)

    def __len__(self) -> int:
        """Number of entries."""
        return len(self.entries)

    def __iter__(self):
        """Iterate entries."""
        return iter(self.entries)

    def select(self, label: Optional[Label] = None, **filters: Any) -> List[ManifestEntry]:
        """Entries matching a label and any other field values, e.g. `hardware_tag="x310"`."""
        result = []
        for entry in self.entries:
            if label is not None and entry.label is not label:
                continue
            if all(getattr(entry, key) == value for key, value in filters.items()):
                result.append(entry)
        return result

    @property
    def extent(self) -> Optional[PlaneExtent]:
        """Plane extent recorded by the encoder, if any."""
        value = self.header.get("extent")
        if value is None:
            return None
        try:
            i_min, i_max, q_min, q_max = (float(item) for item in value.split())
            return PlaneExtent(i_min=i_min, i_max=i_max, q_min=q_min, q_max=q_max)
        except (ValueError, ValidationError) as error:
            raise FileFormatError(f"Malformed manifest extent `{value}`") from error

    def set_extent(self, extent: PlaneExtent):
        """Record the plane extent in the header."""
        self.header["extent"] = " ".join(format_float(value) for value in extent.as_tuple())

    @property
    def image_config(self) -> Optional[ImageConfig]:
        """Image geometry recorded by the encoder, if any."""
        if not {"n", "m_rows", "n_cols"} <= set(self.header):
            return None
        extent = self.extent
        try:
            return ImageConfig(
                n=int(self.header["n"]),
                m_rows=int(self.header["m_rows"]),
                n_cols=int(self.header["n_cols"]),
                mode=ImageMode(self.header.get("mode", ImageMode.GRAY.value)),
                **({"extent_policy": {"policy": "fixed", "extent": extent}} if extent else {}),
            )
        except (ValueError, ValidationError) as error:
            raise FileFormatError(f"Malformed manifest image geometry: {error}") from error

    def set_image_config(self, config: ImageConfig):
        """Record the image geometry in the header."""
        self.header.update(
            n=str(config.n),
            m_rows=str(config.m_rows),
            n_cols=str(config.n_cols),
            mode=config.mode.value,
        )


def _parse_entry(line: str, line_number: int) -> ManifestEntry:
    try:
        tokens = shlex.split(line)
    except ValueError as error:
        raise FileFormatError(f"Manifest line {line_number}: {error}") from error
    fields = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            raise FileFormatError(f"Manifest line {line_number}: token `{token}` is not key=value")
        fields[key] = value
    try:
        return ManifestEntry(**fields)
    except ValidationError as error:
        raise FileFormatError(f"Manifest line {line_number}: {error}") from error


def read_manifest(path: Pathable) -> DatasetManifest:
    """Parse a manifest file."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != f"# format_version={MANIFEST_FORMAT_VERSION}":
        raise FileFormatError(f"{path}: expected `# format_version={MANIFEST_FORMAT_VERSION}` on the first line")

    header = {}
    entries = []
    for line_number, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                header[key] = value
            continue
        entries.append(_parse_entry(line, line_number))
    return DatasetManifest(entries, header)


def write_manifest(manifest: DatasetManifest, path: Pathable):
    """Write a manifest file."""
    lines = [f"# format_version={MANIFEST_FORMAT_VERSION}", *comment_lines(manifest.header)]
    for entry in manifest.entries:
        lines.append(" ".join(shlex.quote(token) for token in entry.tokens()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def manifest_hash(manifest: DatasetManifest) -> str:
    """SHA-256 of the sorted entry set, independent of entry order."""
    entries = sorted(canonical_json(entry.canonical()) for entry in manifest.entries)
    return hashlib.sha256("\n".join(entries).encode("utf-8")).hexdigest()


def resolve_entry(manifest_path: Pathable, entry: ManifestEntry) -> Path:
    """Absolute location of an entry's file."""
    return Path(manifest_path).parent / entry.path
