"""Grayscale and binary raster types plus Netpbm PGM file I/O.

Rasters wrap read-only numpy arrays in row-major order with the origin at
the top-left corner, x growing right and y growing down. Grayscale values
are 8-bit intensities, binary rasters mark ink (dark foreground) with 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    MalformedHeaderError,
    TruncatedPixelDataError,
    UnsupportedMaxvalError,
)

MAX_INTENSITY = 255


def _frozen_2d(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"raster needs a non-empty 2-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayRaster:
    """8-bit grayscale image; pixels[y, x] is the intensity at (x, y)."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _frozen_2d(self.pixels, np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayRaster):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True, eq=False)
class BinaryRaster:
    """Bitmap where bits[y, x] == 1 marks an ink pixel."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.dtype == bool:
            arr = arr.astype(np.uint8)
        frozen = _frozen_2d(arr, np.uint8)
        if frozen.max(initial=0) > 1:
            raise ValueError("binary raster values must be 0 or 1")
        object.__setattr__(self, "bits", frozen)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def ink_count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, BinaryRaster):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )


class _PgmScanner:
    """Token reader for PGM headers; '#' starts a comment through end of line."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def next_token(self) -> bytes:
        data, n = self.data, len(self.data)
        i = self.pos
        while i < n:
            c = data[i : i + 1]
            if c == b"#":
                while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                    i += 1
            elif c.isspace():
                i += 1
            else:
                break
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        self.pos = i
        if start == i:
            raise MalformedHeaderError("unexpected end of PGM header")
        return data[start:i]

    def next_int(self, what: str) -> int:
        tok = self.next_token()
        try:
            return int(tok)
        except ValueError:
            raise MalformedHeaderError(f"bad {what} in PGM header: {tok!r}") from None


def load_pgm(path) -> GrayRaster:
    """Read a P2 (ASCII) or P5 (binary) PGM file with maxval up to 255."""
    with open(path, "rb") as fh:
        data = fh.read()

    scan = _PgmScanner(data)
    magic = scan.next_token()
    if magic not in (b"P2", b"P5"):
        raise MalformedHeaderError(f"not a P2/P5 PGM file (magic {magic!r})")
    width = scan.next_int("width")
    height = scan.next_int("height")
    maxval = scan.next_int("maxval")
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad dimensions {width}x{height}")
    if maxval < 1:
        raise MalformedHeaderError(f"bad maxval {maxval}")
    if maxval > MAX_INTENSITY:
        raise UnsupportedMaxvalError(f"maxval {maxval} exceeds {MAX_INTENSITY}")

    count = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        start = scan.pos + 1
        body = data[start : start + count]
        if len(body) < count:
            raise TruncatedPixelDataError(
                f"expected {count} pixel bytes, found {len(body)}"
            )
        flat = np.frombuffer(body, dtype=np.uint8)
    else:
        values = []
        for _ in range(count):
            try:
                tok = scan.next_token()
            except MalformedHeaderError:
                raise TruncatedPixelDataError(
                    f"expected {count} pixel values, found {len(values)}"
                ) from None
            try:
                values.append(int(tok))
            except ValueError:
                raise TruncatedPixelDataError(f"bad pixel value {tok!r}") from None
        flat = np.array(values, dtype=np.int64)

    if flat.max(initial=0) > maxval:
        raise TruncatedPixelDataError("pixel value exceeds declared maxval")
    return GrayRaster(flat.reshape(height, width).astype(np.uint8))


def save_pgm(raster: GrayRaster, path) -> None:
    """Write a binary P5 PGM with maxval 255."""
    header = f"P5\n{raster.width} {raster.height}\n{MAX_INTENSITY}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(raster.pixels.tobytes())


def to_gray(binary: BinaryRaster) -> GrayRaster:
    """Render ink as black (0) on a white (255) background."""
    return GrayRaster(np.where(binary.bits == 1, 0, MAX_INTENSITY).astype(np.uint8))
