"""Binary PGM (gray) and PPM (color) image files."""

from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from jamming_detector.base import Pathable
from jamming_detector.exceptions import FileFormatError
from jamming_detector.imaging import MAX_PIXEL, HistogramImage, ImageMode, PlaneExtent
from jamming_detector.utils import comment_lines, format_float

_MAGIC = {ImageMode.GRAY: b"P5", ImageMode.COLOR: b"P6"}
_WHITESPACE = b" \t\r\n"


def image_suffix(mode: ImageMode) -> str:
    """File suffix for an image mode."""
    return ".pgm" if mode is ImageMode.GRAY else ".ppm"


def write_image_pgm(img: HistogramImage, path: Pathable, provenance: Optional[Mapping[str, str]] = None):
    """Write a P5 (gray) or P6 (color) file with the extent and sample accounting as comments."""
    extent = " ".join(format_float(value) for value in img.extent.as_tuple())
    lines = [
        _MAGIC[img.mode].decode("ascii"),
        f"{img.n_cols} {img.m_rows}",
        f"# extent={extent}",
        f"# n_used={img.n_used} n_discarded={img.n_discarded}",
        *comment_lines(provenance or {}),
        str(MAX_PIXEL),
    ]
    header = ("\n".join(lines) + "\n").encode("ascii")
    Path(path).write_bytes(header + np.ascontiguousarray(img.pixels, dtype=np.uint8).tobytes())


def _parse_header(data: bytes) -> Tuple[bytes, List[int], List[str], int]:
    magic = data[:2]
    position = 2
    values: List[int] = []
    comments: List[str] = []
    while len(values) < 3:  # noqa: PLR2004
        if position >= len(data):
            raise FileFormatError("Truncated image header")
        char = data[position : position + 1]
        if char in (b" ", b"\t", b"\r", b"\n"):
            position += 1
        elif char == b"#":
            end = data.find(b"\n", position)
            if end < 0:
                raise FileFormatError("Truncated image header comment")
            try:
                comments.append(data[position + 1 : end].decode("utf-8").strip())
            except UnicodeDecodeError as error:
                raise FileFormatError(f"Image header comment is not valid UTF-8: {error}") from error
            position = end + 1
        else:
            start = position
            while position < len(data) and data[position : position + 1] not in (b" ", b"\t", b"\r", b"\n", b"#"):
                position += 1
            token = data[start:position]
            if not token.isdigit():
                raise FileFormatError(f"Malformed image header token `{token.decode('latin-1')}`")
            values.append(int(token))
    if position >= len(data) or data[position] not in _WHITESPACE:
        raise FileFormatError("Missing whitespace after maxval")
    return magic, values, comments, position + 1


def _comment_fields(comments: List[str]) -> Dict[str, str]:
    fields = {}
    for comment in comments:
        if comment.startswith("extent="):
            fields["extent"] = comment[len("extent=") :]
            continue
        for token in comment.split():
            key, sep, value = token.partition("=")
            if sep:
                fields.setdefault(key, value)
    return fields


def read_image_pgm(path: Pathable) -> HistogramImage:
    """Read a file written by `write_image_pgm`."""
    data = Path(path).read_bytes()
    modes = {magic: mode for mode, magic in _MAGIC.items()}
    magic = data[:2]
    if magic not in modes:
        raise FileFormatError(f"{path}: not a binary PGM/PPM file")
    mode = modes[magic]

    _, (n_cols, m_rows, maxval), comments, offset = _parse_header(data)
    if maxval != MAX_PIXEL:
        raise FileFormatError(f"{path}: maxval must be {MAX_PIXEL}, got {maxval}")

    shape = (m_rows, n_cols) if mode is ImageMode.GRAY else (m_rows, n_cols, 3)
    raster = data[offset:]
    if len(raster) != int(np.prod(shape)):
        raise FileFormatError(f"{path}: expected {int(np.prod(shape))} pixel bytes, got {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(shape).copy()

    fields = _comment_fields(comments)
    if "extent" not in fields:
        raise FileFormatError(f"{path}: missing `# extent=` comment")
    try:
        i_min, i_max, q_min, q_max = (float(value) for value in fields["extent"].split())
        extent = PlaneExtent(i_min=i_min, i_max=i_max, q_min=q_min, q_max=q_max)
        n_used = int(fields.get("n_used", int(pixels.sum(dtype=np.int64))))
        n_discarded = int(fields.get("n_discarded", 0))
    except ValueError as error:
        raise FileFormatError(f"{path}: malformed image comment: {error}") from error
    return HistogramImage(pixels, extent, n_used, n_discarded)
