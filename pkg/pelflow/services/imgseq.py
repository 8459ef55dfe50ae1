"""
Image and flow-field I/O: binary PGM frames, Middlebury .flo fields, CSV dumps.
"""
import csv
import logging
import os
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from ..core.errors import (
    FloFormatError,
    ImageFormatError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)
from ..models.frame import FlowField, Frame, Sequence

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

FLO_TAG = b"PIEH"
_WHITESPACE = b" \t\r\n"


class _HeaderReader:
    """Tokenizer over a PNM header; comment lines are skipped."""

    def __init__(self, data: bytes, path: str):
        self.data = data
        self.pos = 0
        self.path = path

    def _skip_space_and_comments(self) -> None:
        while self.pos < len(self.data):
            ch = self.data[self.pos:self.pos + 1]
            if ch in (b" ", b"\t", b"\r", b"\n"):
                self.pos += 1
            elif ch == b"#":
                end = self.data.find(b"\n", self.pos)
                self.pos = len(self.data) if end < 0 else end + 1
            else:
                return

    def token(self, field: str) -> bytes:
        self._skip_space_and_comments()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos] not in _WHITESPACE:
            self.pos += 1
        if start == self.pos:
            raise ImageFormatError("missing value", path=self.path, field=field)
        return self.data[start:self.pos]

    def integer(self, field: str) -> int:
        raw = self.token(field)
        if not raw.isdigit():
            raise ImageFormatError(f"not a decimal integer: {raw[:16]!r}", path=self.path, field=field)
        return int(raw)


def load_pgm(path: PathLike) -> Frame:
    """
    Load a binary (P5) 8-bit PGM file.

    Raises:
        UnsupportedFormatError: any magic other than P5
        ImageFormatError: malformed width, height or maxval
        TruncatedPayloadError: fewer payload bytes than width * height
    """
    path = str(path)
    with open(path, "rb") as fh:
        data = fh.read()

    reader = _HeaderReader(data, path)
    magic = data[:2]
    if magic != b"P5":
        if magic[:1] == b"P" and magic[1:2].isdigit():
            raise UnsupportedFormatError(f"{magic.decode()} is not supported, only binary P5", path=path, field="magic")
        raise ImageFormatError("not a PNM file", path=path, field="magic")
    reader.pos = 2
    if reader.pos >= len(data) or data[reader.pos] not in _WHITESPACE:
        raise ImageFormatError("magic must be followed by whitespace", path=path, field="magic")

    width = reader.integer("width")
    height = reader.integer("height")
    maxval = reader.integer("maxval")
    if width < 1:
        raise ImageFormatError("width must be positive", path=path, field="width")
    if height < 1:
        raise ImageFormatError("height must be positive", path=path, field="height")
    if maxval != 255:
        raise ImageFormatError(f"maxval {maxval} unsupported, expected 255", path=path, field="maxval")
    if reader.pos >= len(data):
        raise TruncatedPayloadError("no payload after header", path=path, field="payload")
    # exactly one whitespace byte separates the header from the raster
    start = reader.pos + 1
    expected = width * height
    payload = data[start:start + expected]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"payload has {len(payload)} bytes, header declares {expected}", path=path, field="payload"
        )
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return Frame(samples=samples)


def save_pgm(frame: Frame, path: PathLike) -> None:
    """Write a frame as binary P5 PGM, maxval 255."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(frame.samples, dtype=np.uint8).tobytes())
    except OSError as e:
        raise type(e)(e.errno, f"cannot write PGM: {e.strerror}", str(path)) from e


def load_sequence(paths: Iterable[PathLike]) -> Sequence:
    """Load PGM frames into a Sequence; sizes must agree."""
    frames = [load_pgm(p) for p in paths]
    logger.info(f"Loaded {len(frames)} frames")
    return Sequence(frames=frames)


def save_sequence(seq: Sequence, directory: PathLike, prefix: str = "frame") -> List[Path]:
    """Write every frame as ``<prefix>_NNNN.pgm``; returns the paths in order."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for index, frame in enumerate(seq.frames, start=1):
        target = directory / f"{prefix}_{index:04d}.pgm"
        save_pgm(frame, target)
        written.append(target)
    return written


def save_flo(flow: FlowField, path: PathLike) -> None:
    """Write a flow field in Middlebury .flo layout (little-endian)."""
    interleaved = np.empty((flow.height, flow.width, 2), dtype="<f4")
    interleaved[..., 0] = flow.dx
    interleaved[..., 1] = flow.dy
    try:
        with open(path, "wb") as fh:
            fh.write(FLO_TAG)
            fh.write(np.array([flow.width, flow.height], dtype="<i4").tobytes())
            fh.write(interleaved.tobytes())
    except OSError as e:
        raise type(e)(e.errno, f"cannot write .flo: {e.strerror}", str(path)) from e


def load_flo(path: PathLike) -> FlowField:
    """
    Read a Middlebury .flo file.

    Raises:
        FloFormatError: bad magic tag, bad dimensions, payload size mismatch or non-finite values
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise FloFormatError(f"{path}: file too short for a .flo header")
    if data[:4] != FLO_TAG:
        raise FloFormatError(f"{path}: bad magic tag {data[:4]!r}, expected {FLO_TAG!r}")
    width, height = (int(v) for v in np.frombuffer(data[4:12], dtype="<i4"))
    if width < 1 or height < 1:
        raise FloFormatError(f"{path}: invalid dimensions {width}x{height}")
    expected = 8 * width * height
    payload = data[12:]
    if len(payload) != expected:
        raise FloFormatError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype="<f4").reshape(height, width, 2)
    if not np.isfinite(values).all():
        raise FloFormatError(f"{path}: payload holds non-finite displacements")
    return FlowField(dx=values[..., 0].astype(np.float64), dy=values[..., 1].astype(np.float64))


def save_flow_csv(flow: FlowField, path: PathLike) -> None:
    """Dump a flow field as CSV rows ``x,y,dx,dy`` in raster order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "dx", "dy"])
        for y in range(flow.height):
            for x in range(flow.width):
                writer.writerow([x, y, repr(float(flow.dx[y, x])), repr(float(flow.dy[y, x]))])
