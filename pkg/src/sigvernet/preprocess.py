"""Signature image preprocessing.

The pipeline normalizes a scanned grayscale signature into a fixed-size
segmented bitmap: global threshold, binarize, despeckle, thin to a
one-pixel skeleton, estimate and remove slant, crop to content, resize to
a 200x100 canvas and cut it into a 10x10 grid of segments. The aspect
ratio of the content box is measured after slant removal, before the
resize destroys it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadTargetSizeError,
    EmptyImageError,
    IndivisibleDimensionsError,
    InsufficientInkError,
)
from .raster import BinaryRaster, GrayRaster

CANON_WIDTH = 200
CANON_HEIGHT = 100
GRID_ROWS = 10
GRID_COLS = 10


def otsu_threshold(gray: GrayRaster) -> int:
    """Threshold maximizing between-class variance of the dark/light split.

    The dark class for a threshold t is every pixel with intensity < t,
    matching binarize(). Ties pick the smallest t; an image with a single
    intensity returns that intensity.
    """
    hist = np.bincount(gray.pixels.ravel(), minlength=256).astype(np.int64)
    nonzero = np.nonzero(hist)[0]
    if len(nonzero) == 1:
        return int(nonzero[0])

    total = int(hist.sum())
    total_mass = int((hist * np.arange(256, dtype=np.int64)).sum())
    cum_n = np.cumsum(hist)
    cum_mass = np.cumsum(hist * np.arange(256, dtype=np.int64))

    # w0[t], s0[t] describe the dark class {pixel < t}; index 0 is empty
    w0 = np.concatenate(([0], cum_n[:-1]))
    s0 = np.concatenate(([0], cum_mass[:-1]))
    w1 = total - w0
    s1 = total_mass - s0

    score = np.zeros(256, dtype=np.float64)
    valid = (w0 > 0) & (w1 > 0)
    mu0 = s0[valid] / w0[valid]
    mu1 = s1[valid] / w1[valid]
    score[valid] = w0[valid] * w1[valid] * (mu0 - mu1) ** 2
    return int(np.argmax(score))


def binarize(gray: GrayRaster, threshold: int) -> BinaryRaster:
    """Mark pixels strictly darker than the threshold as ink."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in 0..255, got {threshold}")
    return BinaryRaster(gray.pixels < threshold)


def median_filter3(binary: BinaryRaster) -> BinaryRaster:
    """3x3 binary median: a pixel survives if ink holds the majority.

    Majority means at least 5 of the 9 cells in the window are ink; cells
    outside the frame count as background.
    """
    padded = np.pad(binary.bits, 1).astype(np.int32)
    h, w = binary.bits.shape
    counts = np.zeros((h, w), dtype=np.int32)
    for dy in range(3):
        for dx in range(3):
            counts += padded[dy : dy + h, dx : dx + w]
    return BinaryRaster(counts >= 5)


def _neighborhood(img: np.ndarray):
    """Eight neighbor planes of img in clockwise order from north."""
    p = np.pad(img, 1)
    n = p[:-2, 1:-1]
    ne = p[:-2, 2:]
    e = p[1:-1, 2:]
    se = p[2:, 2:]
    s = p[2:, 1:-1]
    sw = p[2:, :-2]
    w = p[1:-1, :-2]
    nw = p[:-2, :-2]
    return n, ne, e, se, s, sw, w, nw


def thin(binary: BinaryRaster) -> BinaryRaster:
    """Zhang-Suen thinning iterated to a fixed point.

    Each pass runs the two sub-iterations; pixels are only ever removed,
    so the skeleton is a subset of the input ink and re-thinning a
    skeleton changes nothing.
    """
    img = binary.bits.astype(np.uint8).copy()
    while True:
        removed_any = False
        for phase in (0, 1):
            n, ne, e, se, s, sw, w, nw = _neighborhood(img)
            ring = (n, ne, e, se, s, sw, w, nw)
            b = sum(p.astype(np.int32) for p in ring)
            a = np.zeros_like(b)
            for i in range(8):
                cur = ring[i]
                nxt = ring[(i + 1) % 8]
                a += ((cur == 0) & (nxt == 1)).astype(np.int32)
            if phase == 0:
                gap1 = (n * e * s) == 0
                gap2 = (e * s * w) == 0
            else:
                gap1 = (n * e * w) == 0
                gap2 = (n * s * w) == 0
            kill = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & gap1 & gap2
            if kill.any():
                img[kill] = 0
                removed_any = True
        if not removed_any:
            return BinaryRaster(img)


def estimate_skew(binary: BinaryRaster) -> float:
    """Content slant in radians from second-order central moments.

    Works in a y-up frame (image rows negated) so positive angles mean
    counter-clockwise slant. Result lies in (-pi/2, pi/2]; a blob with no
    dominant axis (mu11 == 0 and mu20 == mu02) reports 0 by convention.
    """
    ys, xs = np.nonzero(binary.bits)
    if xs.size < 2:
        raise InsufficientInkError("skew estimation needs at least 2 ink pixels")
    x = xs.astype(np.float64)
    y = -ys.astype(np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    mu20 = float((dx * dx).sum())
    mu02 = float((dy * dy).sum())
    mu11 = float((dx * dy).sum())
    if mu11 == 0.0 and mu20 == mu02:
        return 0.0
    return 0.5 * math.atan2(2.0 * mu11, mu20 - mu02)


def deskew(binary: BinaryRaster, angle: float) -> BinaryRaster:
    """Rotate content by -angle about the ink centroid (nearest neighbor).

    The output canvas is the bounding box of the rotated input frame, so
    nothing is clipped; angle 0 returns the content unchanged.
    """
    h, w = binary.bits.shape
    ys, xs = np.nonzero(binary.bits)
    if xs.size == 0:
        return BinaryRaster(binary.bits)
    cx = float(xs.mean())
    cy = float(ys.mean())
    cos_t = math.cos(angle)
    sin_t = math.sin(angle)

    # forward map q = R(-angle) (p - c) + c, in image coords (y down)
    corners_x = np.array([0.0, w - 1.0, 0.0, w - 1.0])
    corners_y = np.array([0.0, 0.0, h - 1.0, h - 1.0])
    fx = cos_t * (corners_x - cx) - sin_t * (corners_y - cy) + cx
    fy = sin_t * (corners_x - cx) + cos_t * (corners_y - cy) + cy
    min_x = math.floor(fx.min())
    min_y = math.floor(fy.min())
    out_w = math.ceil(fx.max()) - min_x + 1
    out_h = math.ceil(fy.max()) - min_y + 1

    qx, qy = np.meshgrid(
        np.arange(out_w, dtype=np.float64) + min_x,
        np.arange(out_h, dtype=np.float64) + min_y,
    )
    # inverse map back into the source frame
    px = cos_t * (qx - cx) + sin_t * (qy - cy) + cx
    py = -sin_t * (qx - cx) + cos_t * (qy - cy) + cy
    xi = np.floor(px + 0.5).astype(np.int64)
    yi = np.floor(py + 0.5).astype(np.int64)
    inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
    out = np.zeros((out_h, out_w), dtype=np.uint8)
    out[inside] = binary.bits[yi[inside], xi[inside]]
    return BinaryRaster(out)


def crop_to_content(binary: BinaryRaster) -> BinaryRaster:
    """Tight bounding box of the ink."""
    ys, xs = np.nonzero(binary.bits)
    if xs.size == 0:
        raise EmptyImageError("cannot crop a raster with no ink")
    return BinaryRaster(
        binary.bits[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
    )


def aspect_ratio(binary: BinaryRaster) -> float:
    """Ink bounding-box height divided by width."""
    ys, xs = np.nonzero(binary.bits)
    if xs.size == 0:
        raise EmptyImageError("aspect ratio of a blank raster is undefined")
    return float(ys.max() - ys.min() + 1) / float(xs.max() - xs.min() + 1)


def resize_nn(binary: BinaryRaster, width: int, height: int) -> BinaryRaster:
    """Nearest-neighbor resample; source index is floor(x * src_w / w)."""
    if width < 10 or height < 10:
        raise BadTargetSizeError(f"target {width}x{height} below minimum 10x10")
    src_h, src_w = binary.bits.shape
    xi = (np.arange(width, dtype=np.int64) * src_w) // width
    yi = (np.arange(height, dtype=np.int64) * src_h) // height
    return BinaryRaster(binary.bits[np.ix_(yi, xi)])


@dataclass(frozen=True)
class SegmentGrid:
    """Row-major 10x10 partition of a raster into equal tiles."""

    rows: int
    cols: int
    segment_width: int
    segment_height: int
    segments: tuple

    def segment(self, row: int, col: int) -> BinaryRaster:
        return self.segments[row * self.cols + col]

    def ink_count(self) -> int:
        return sum(s.ink_count() for s in self.segments)


def segment_grid(binary: BinaryRaster) -> SegmentGrid:
    """Cut a raster into the 10x10 grid of equal-size segments."""
    h, w = binary.bits.shape
    if w % GRID_COLS != 0 or h % GRID_ROWS != 0:
        raise IndivisibleDimensionsError(
            f"{w}x{h} raster does not divide into a {GRID_COLS}x{GRID_ROWS} grid"
        )
    tw = w // GRID_COLS
    th = h // GRID_ROWS
    tiles = []
    for gy in range(GRID_ROWS):
        for gx in range(GRID_COLS):
            tiles.append(
                BinaryRaster(binary.bits[gy * th : (gy + 1) * th, gx * tw : (gx + 1) * tw])
            )
    return SegmentGrid(
        rows=GRID_ROWS,
        cols=GRID_COLS,
        segment_width=tw,
        segment_height=th,
        segments=tuple(tiles),
    )


def preprocess_pipeline(gray: GrayRaster) -> tuple[SegmentGrid, float]:
    """Full normalization chain; returns the segment grid and the aspect
    ratio measured after slant removal but before the resize.

    A raster whose binarization holds fewer than 2 ink pixels skips the
    slant stage (nothing to orient); a fully blank one raises EmptyImage
    from the crop.
    """
    t = otsu_threshold(gray)
    binary = binarize(gray, t)
    binary = median_filter3(binary)
    binary = thin(binary)
    if binary.ink_count() >= 2:
        binary = deskew(binary, estimate_skew(binary))
    binary = crop_to_content(binary)
    aspect = aspect_ratio(binary)
    binary = resize_nn(binary, CANON_WIDTH, CANON_HEIGHT)
    return segment_grid(binary), aspect
