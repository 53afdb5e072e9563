"""Synthetic signature dataset generator.

A signer is a fixed set of polyline strokes plus a pen thickness and a
base slant. Every rendered sample perturbs the stroke control points and
the slant with seeded noise; forgeries use visibly larger perturbations
than genuine repetitions, which is what gives the two classes separable
feature distributions. Everything is a pure function of the seeds.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .raster import GrayRaster, save_pgm

CANVAS_WIDTH = 600
CANVAS_HEIGHT = 300

# unit-box strokes are pre-widened so rendered signatures come out wider
# than tall, like real ones
_WIDEN_X = 2.4

MANIFEST_NAME = "manifest.txt"


@dataclass(frozen=True)
class SampleKind:
    """Rendering noise profile for one class of samples."""

    name: str
    jitter: float            # control point displacement, fraction of the box
    slant_noise_deg: float   # uniform slant wobble, degrees
    code: int                # seed material, keeps the two classes distinct

    def __str__(self) -> str:
        return self.name


GENUINE_KIND = SampleKind("genuine", jitter=0.02, slant_noise_deg=2.0, code=1)
FORGERY_KIND = SampleKind("forgery", jitter=0.10, slant_noise_deg=8.0, code=2)


@dataclass(frozen=True)
class SignerStyle:
    """Immutable description of one synthetic signer's hand."""

    seed: int
    strokes: tuple           # tuple of (k, 2) float arrays in the unit box
    thickness: int           # pen width in pixels, 1..3
    slant_deg: float         # base slant, -30..30 degrees

    @classmethod
    def from_seed(cls, seed: int) -> "SignerStyle":
        rng = np.random.default_rng(seed)
        n_strokes = int(rng.integers(3, 8))
        strokes = []
        for _ in range(n_strokes):
            k = int(rng.integers(4, 9))
            pts = rng.random((k, 2))
            pts.setflags(write=False)
            strokes.append(pts)
        thickness = int(rng.integers(1, 4))
        slant = float(rng.uniform(-30.0, 30.0))
        return cls(seed=seed, strokes=tuple(strokes), thickness=thickness, slant_deg=slant)


def _rotate_about(points: np.ndarray, center, angle_deg: float) -> np.ndarray:
    """Rotate (k, 2) points counter-clockwise in a y-up frame."""
    theta = np.deg2rad(angle_deg)
    c, s = np.cos(theta), np.sin(theta)
    d = points - np.asarray(center, dtype=np.float64)
    return np.stack([c * d[:, 0] - s * d[:, 1], s * d[:, 0] + c * d[:, 1]], axis=1)


def _fit_to_canvas(strokes: list) -> list:
    """Isotropically scale and center the point cloud inside the canvas."""
    allpts = np.concatenate(strokes)
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    content_w = CANVAS_WIDTH - 120.0
    content_h = CANVAS_HEIGHT - 120.0
    s = min(content_w / span[0], content_h / span[1])
    mid = (lo + hi) / 2.0
    cx, cy = CANVAS_WIDTH / 2.0, CANVAS_HEIGHT / 2.0
    fitted = []
    for pts in strokes:
        x = cx + s * (pts[:, 0] - mid[0])
        y = cy - s * (pts[:, 1] - mid[1])    # unit frame is y-up, canvas is y-down
        fitted.append(np.stack([x, y], axis=1))
    return fitted


def _stamp(canvas: np.ndarray, xs: np.ndarray, ys: np.ndarray, thickness: int, value: int):
    h, w = canvas.shape
    reach = range(-(thickness // 2), -(thickness // 2) + thickness)
    for dy in reach:
        for dx in reach:
            x = xs + dx
            y = ys + dy
            ok = (x >= 0) & (x < w) & (y >= 0) & (y < h)
            np.minimum.at(canvas, (y[ok], x[ok]), value)


def gen_signature(style: SignerStyle, kind: SampleKind, sample_seed: int) -> GrayRaster:
    """Render one sample of a signer as a 600x300 grayscale raster.

    Deterministic in (style.seed, kind, sample_seed): the same triple
    always yields the same bytes.
    """
    rng = np.random.default_rng((style.seed, kind.code, sample_seed))

    jittered = []
    for pts in style.strokes:
        noisy = pts + rng.normal(0.0, kind.jitter, size=pts.shape)
        noisy[:, 0] *= _WIDEN_X
        jittered.append(noisy)

    slant = style.slant_deg + rng.uniform(-kind.slant_noise_deg, kind.slant_noise_deg)
    center = np.concatenate(jittered).mean(axis=0)
    rotated = [_rotate_about(pts, center, slant) for pts in jittered]
    fitted = _fit_to_canvas(rotated)

    # paper texture: near-white background with mild per-pixel grain
    canvas = (255 - rng.integers(0, 18, size=(CANVAS_HEIGHT, CANVAS_WIDTH))).astype(np.int64)

    for pts in fitted:
        ink = int(rng.integers(0, 40))
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            length = float(np.hypot(x1 - x0, y1 - y0))
            n = max(2, int(length / 0.4) + 1)
            t = np.linspace(0.0, 1.0, n)
            xs = np.floor(x0 + (x1 - x0) * t + 0.5).astype(np.int64)
            ys = np.floor(y0 + (y1 - y0) * t + 0.5).astype(np.int64)
            _stamp(canvas, xs, ys, style.thickness, ink)

    # a few isolated specks the median filter is expected to remove
    n_specks = 40
    sx = rng.integers(0, CANVAS_WIDTH, size=n_specks)
    sy = rng.integers(0, CANVAS_HEIGHT, size=n_specks)
    sv = rng.integers(60, 120, size=n_specks)
    for x, y, v in zip(sx, sy, sv):
        canvas[y, x] = min(int(canvas[y, x]), int(v))

    return GrayRaster(canvas.astype(np.uint8))


def _style_seed(dataset_seed: int, signer_index: int) -> int:
    digest = hashlib.sha256(f"sigvernet-style/{dataset_seed}/{signer_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def gen_dataset(n_signers: int, n_genuine: int, n_forgery: int, seed: int, out_dir) -> Path:
    """Write a full synthetic dataset and its manifest; returns the manifest path.

    Files are named s<ID>_g<N>.pgm / s<ID>_f<N>.pgm and the manifest lists
    them relative to its own directory.
    """
    if n_signers < 1:
        raise ValueError("need at least one signer")
    if n_genuine < 1 or n_forgery < 1:
        raise ValueError("need at least one sample per class")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    lines = ["# synthetic signature dataset"]
    for i in range(1, n_signers + 1):
        style = SignerStyle.from_seed(_style_seed(seed, i))
        signer_id = f"s{i:02d}"
        lines.append(f"signer {signer_id}")
        for j in range(1, n_genuine + 1):
            name = f"{signer_id}_g{j:03d}.pgm"
            save_pgm(gen_signature(style, GENUINE_KIND, j), out_dir / name)
            lines.append(f"genuine {name}")
        for j in range(1, n_forgery + 1):
            name = f"{signer_id}_f{j:03d}.pgm"
            save_pgm(gen_signature(style, FORGERY_KIND, j), out_dir / name)
            lines.append(f"forgery {name}")

    manifest = out_dir / MANIFEST_NAME
    manifest.write_text("\n".join(lines) + "\n", encoding="ascii")
    return manifest
