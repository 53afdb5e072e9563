"""Feature extraction from segmented signature bitmaps.

Two families, both computed per grid segment:

* energy: the raw ink pixel count of each of the 100 segments, prefixed
  by the content aspect ratio (101 values total);
* direction: a 4-bin histogram of stroke direction per segment, from the
  chain codes between 8-adjacent ink pixels (400 values total).

Diagonally opposite directions describe the same undirected stroke, so
the eight chain codes fold onto four classes: 0 east, 1 north-east,
2 north, 3 north-west. Scanning only those four forward offsets counts
every adjacent pair exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import LayoutMismatchError
from .preprocess import SegmentGrid, preprocess_pipeline
from .raster import GrayRaster

# scaling constants: a segment is 20x10 = 200 pixels, each pixel has at
# most 4 forward neighbors, and aspect ratios are capped at 4
SEGMENT_AREA = 200
PAIR_CAP = 4 * SEGMENT_AREA
ASPECT_CAP = 4.0
SCALING_VERSION = 1

N_SEGMENTS = 100
N_DIRECTION_CLASSES = 4


class Layout(Enum):
    """Feature vector layouts the classifier accepts."""

    ENERGY = "energy"
    DIRECTION = "direction"
    COMBINED = "combined"

    @property
    def size(self) -> int:
        return {_E: 101, _D: 400, _C: 501}[self]

    @classmethod
    def from_tag(cls, tag: str) -> "Layout":
        for member in cls:
            if member.value == tag:
                return member
        raise LayoutMismatchError(f"unknown feature layout {tag!r}")


_E, _D, _C = Layout.ENERGY, Layout.DIRECTION, Layout.COMBINED


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Feature values with their layout; scaled is True once mapped to [-1, 1]."""

    layout: Layout | None
    values: np.ndarray
    scaled: bool = False

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim != 1:
            raise ValueError("feature values must be a flat vector")
        if self.layout is not None and arr.size != self.layout.size:
            raise LayoutMismatchError(
                f"{self.layout.value} layout needs {self.layout.size} values, got {arr.size}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def energy_densities(grid: SegmentGrid) -> np.ndarray:
    """Ink pixel count of each segment, row-major, as 100 floats."""
    return np.array([s.ink_count() for s in grid.segments], dtype=np.float64)


def _segment_pair_counts(bits: np.ndarray) -> np.ndarray:
    east = np.sum(bits[:, :-1] & bits[:, 1:])
    north_east = np.sum(bits[1:, :-1] & bits[:-1, 1:])
    north = np.sum(bits[1:, :] & bits[:-1, :])
    north_west = np.sum(bits[1:, 1:] & bits[:-1, :-1])
    return np.array([east, north_east, north, north_west], dtype=np.float64)


def chain_code_histograms(grid: SegmentGrid) -> np.ndarray:
    """Per-segment direction histograms, segment-major then class-minor.

    For every ink pixel the four forward offsets E(+1,0), NE(+1,-1),
    N(0,-1), NW(-1,-1) are examined; an ink neighbor inside the same
    segment increments that class. Pairs crossing segment borders are
    dropped by construction.
    """
    out = np.empty(len(grid.segments) * N_DIRECTION_CLASSES, dtype=np.float64)
    for i, seg in enumerate(grid.segments):
        out[i * 4 : i * 4 + 4] = _segment_pair_counts(seg.bits)
    return out


def assemble(layout: Layout, aspect=None, energies=None, histograms=None) -> FeatureVector:
    """Build an unscaled FeatureVector from the pieces a layout needs."""
    parts = []
    if layout in (_E, _C):
        if aspect is None or energies is None:
            raise LayoutMismatchError(f"{layout.value} layout needs aspect and energies")
        energies = np.asarray(energies, dtype=np.float64)
        if energies.size != N_SEGMENTS:
            raise LayoutMismatchError(f"expected {N_SEGMENTS} energies, got {energies.size}")
        parts.append(np.array([aspect], dtype=np.float64))
        parts.append(energies)
    if layout in (_D, _C):
        if histograms is None:
            raise LayoutMismatchError(f"{layout.value} layout needs direction histograms")
        histograms = np.asarray(histograms, dtype=np.float64)
        if histograms.size != N_SEGMENTS * N_DIRECTION_CLASSES:
            raise LayoutMismatchError(
                f"expected {N_SEGMENTS * N_DIRECTION_CLASSES} histogram values, got {histograms.size}"
            )
        parts.append(histograms)
    return FeatureVector(layout, np.concatenate(parts), scaled=False)


def _scale_aspect(a: np.ndarray) -> np.ndarray:
    return 2.0 * np.minimum(a, ASPECT_CAP) / ASPECT_CAP - 1.0

def _scale_energy(e: np.ndarray) -> np.ndarray:
    return 2.0 * e / SEGMENT_AREA - 1.0

def _scale_count(c: np.ndarray) -> np.ndarray:
    return 2.0 * np.minimum(c, PAIR_CAP) / PAIR_CAP - 1.0


def scale(vector: FeatureVector) -> FeatureVector:
    """Map raw feature values onto [-1, 1] with fixed affine maps.

    The maps depend only on geometry (segment area, pair cap, aspect
    cap), never on data statistics, so scaling any sample is independent
    of every other sample.
    """
    if vector.scaled:
        raise ValueError("feature vector is already scaled")
    if vector.layout is None:
        raise LayoutMismatchError("cannot scale a vector without a layout")
    v = vector.values
    if vector.layout is _E:
        out = np.concatenate([_scale_aspect(v[:1]), _scale_energy(v[1:])])
    elif vector.layout is _D:
        out = _scale_count(v)
    else:
        out = np.concatenate(
            [_scale_aspect(v[:1]), _scale_energy(v[1:101]), _scale_count(v[101:])]
        )
    return FeatureVector(vector.layout, out, scaled=True)


def extract_features(gray: GrayRaster, layout: Layout) -> FeatureVector:
    """Preprocess an image and produce its scaled feature vector."""
    grid, aspect = preprocess_pipeline(gray)
    return scale(assemble_from_grid(layout, grid, aspect))


def format_feature_csv(vector: FeatureVector) -> str:
    """Header row (layout tag, scaling version) plus one row of values."""
    if not vector.scaled or vector.layout is None:
        raise ValueError("only scaled, layout-tagged vectors are exported")
    header = f"{vector.layout.value},{SCALING_VERSION}"
    row = ",".join(f"{v:.9g}" for v in vector.values)
    return header + "\n" + row + "\n"


def assemble_from_grid(layout: Layout, grid: SegmentGrid, aspect: float) -> FeatureVector:
    """Unscaled features for a layout from an already segmented image."""
    energies = energy_densities(grid) if layout in (_E, _C) else None
    hists = chain_code_histograms(grid) if layout in (_D, _C) else None
    return assemble(layout, aspect=aspect, energies=energies, histograms=hists)
