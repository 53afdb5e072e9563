"""Shared test fixtures: synthetic lines, random rasters, a tiny dataset."""

import math

import numpy as np

from sigvernet.raster import BinaryRaster, GrayRaster, save_pgm


def line_raster(angle_deg, span=140, size=260):
    """1-pixel line through the canvas center, one pixel per column.

    Angles are counter-clockwise in a y-up frame, so the raster row
    decreases as the ideal line rises. |angle| must stay below 45 so the
    per-column rasterization is well defined.
    """
    bits = np.zeros((size, size), dtype=np.uint8)
    c = size / 2.0
    slope = math.tan(math.radians(angle_deg))
    for i in range(span + 1):
        x = i - span / 2.0
        y = x * slope
        bits[int(math.floor(c - y + 0.5)), int(math.floor(c + x + 0.5))] = 1
    return BinaryRaster(bits)


def random_binary(rng, height, width, density):
    return BinaryRaster((rng.random((height, width)) < density).astype(np.uint8))


def random_gray(rng, height, width):
    return GrayRaster(rng.integers(0, 256, size=(height, width), dtype=np.uint8))


def blocky_signature(rng, width=120, height=60, jitter=1.0):
    """Small, fast signature-like image: a few jittered thick polylines."""
    canvas = np.full((height, width), 255, dtype=np.int64)
    anchors = np.array(
        [[10, 45], [30, 20], [55, 40], [80, 15], [105, 35]], dtype=np.float64
    )
    pts = anchors + rng.normal(0.0, jitter, size=anchors.shape)
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        n = max(2, int(np.hypot(x1 - x0, y1 - y0) / 0.4) + 1)
        t = np.linspace(0.0, 1.0, n)
        xs = np.clip(np.floor(x0 + (x1 - x0) * t + 0.5).astype(int), 0, width - 2)
        ys = np.clip(np.floor(y0 + (y1 - y0) * t + 0.5).astype(int), 0, height - 2)
        for dy in (0, 1):
            for dx in (0, 1):
                canvas[ys + dy, xs + dx] = 0
    return GrayRaster(canvas.astype(np.uint8))


def tiny_dataset(out_dir, n_signers=1, n_genuine=60, n_forgery=60, seed=0):
    """Small on-disk dataset with a manifest; fast enough for unit tests.

    Genuine samples jitter the anchor points a little, forgeries a lot,
    mirroring the real generator's class structure at a fraction of the
    cost.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(1, n_signers + 1):
        signer = f"t{i:02d}"
        lines.append(f"signer {signer}")
        for j in range(1, n_genuine + 1):
            rng = np.random.default_rng((seed, i, 0, j))
            name = f"{signer}_g{j:03d}.pgm"
            save_pgm(blocky_signature(rng, jitter=0.8), out_dir / name)
            lines.append(f"genuine {name}")
        for j in range(1, n_forgery + 1):
            rng = np.random.default_rng((seed, i, 1, j))
            name = f"{signer}_f{j:03d}.pgm"
            save_pgm(blocky_signature(rng, jitter=6.0), out_dir / name)
            lines.append(f"forgery {name}")
    manifest = out_dir / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="ascii")
    return manifest
