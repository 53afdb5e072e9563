import numpy as np
import pytest

from sigvernet.errors import LayoutMismatchError
from sigvernet.features import (
    ASPECT_CAP,
    PAIR_CAP,
    SCALING_VERSION,
    SEGMENT_AREA,
    FeatureVector,
    Layout,
    assemble,
    assemble_from_grid,
    chain_code_histograms,
    energy_densities,
    extract_features,
    format_feature_csv,
    scale,
)
from sigvernet.preprocess import segment_grid
from sigvernet.raster import BinaryRaster


def pair_count_oracle(bits):
    """Count E/NE/N/NW neighbor pairs by walking every pixel."""
    h, w = bits.shape
    counts = [0, 0, 0, 0]
    offsets = [(1, 0), (1, -1), (0, -1), (-1, -1)]  # (dx, dy) per class
    for y in range(h):
        for x in range(w):
            if not bits[y, x]:
                continue
            for k, (dx, dy) in enumerate(offsets):
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h and bits[ny, nx]:
                    counts[k] += 1
    return counts


def eight_neighbor_adjacencies(bits):
    """Unordered 8-adjacent ink pairs, counted once each."""
    h, w = bits.shape
    total = 0
    for y in range(h):
        for x in range(w):
            if not bits[y, x]:
                continue
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dx == dy == 0:
                        continue
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and bits[ny, nx]:
                        total += 1
    assert total % 2 == 0
    return total // 2


def grid_for(bits):
    return segment_grid(BinaryRaster(bits))


class TestLayout:
    def test_sizes(self):
        assert Layout.ENERGY.size == 101
        assert Layout.DIRECTION.size == 400
        assert Layout.COMBINED.size == 501

    def test_from_tag(self):
        for lay in Layout:
            assert Layout.from_tag(lay.value) is lay
        with pytest.raises(LayoutMismatchError):
            Layout.from_tag("bogus")


class TestEnergies:
    def test_blank_grid(self):
        e = energy_densities(grid_for(np.zeros((100, 200), np.uint8)))
        assert e.shape == (100,)
        assert not e.any()

    def test_counts_per_tile(self):
        bits = np.zeros((100, 200), np.uint8)
        bits[0:10, 0:20] = 1      # tile (0, 0) fully inked
        bits[95, 185] = 1         # one pixel in tile (9, 9)
        e = energy_densities(grid_for(bits))
        assert e[0] == 200
        assert e[99] == 1
        assert e.sum() == 201

    def test_sum_is_total_ink(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            bits = (rng.random((100, 200)) < 0.2).astype(np.uint8)
            assert energy_densities(grid_for(bits)).sum() == bits.sum()


class TestChainCodes:
    def test_isolated_pixels(self):
        bits = np.zeros((100, 200), np.uint8)
        bits[5, 5] = bits[50, 100] = 1
        h = chain_code_histograms(grid_for(bits))
        assert h.shape == (400,)
        assert not h.any()

    def test_horizontal_run(self):
        bits = np.zeros((100, 200), np.uint8)
        bits[3, 4:7] = 1  # three pixels in tile (0, 0): two east pairs
        h = chain_code_histograms(grid_for(bits))
        assert h[:4].tolist() == [2, 0, 0, 0]
        assert h[4:].sum() == 0

    def test_two_by_two_block(self):
        bits = np.zeros((100, 200), np.uint8)
        bits[4:6, 8:10] = 1
        h = chain_code_histograms(grid_for(bits))
        # 2 east pairs, 1 ne diagonal, 2 north pairs, 1 nw diagonal
        assert h[:4].tolist() == [2, 1, 2, 1]

    def test_pairs_do_not_cross_tile_borders(self):
        bits = np.zeros((100, 200), np.uint8)
        bits[3, 19] = bits[3, 20] = 1  # east neighbors split between tiles 0 and 1
        h = chain_code_histograms(grid_for(bits))
        assert not h.any()

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(44)
        bits = (rng.random((100, 200)) < 0.3).astype(np.uint8)
        h = chain_code_histograms(grid_for(bits))
        for idx in (0, 13, 42, 77, 99):
            r, c = divmod(idx, 10)
            tile = bits[r * 10:(r + 1) * 10, c * 20:(c + 1) * 20]
            assert h[idx * 4:idx * 4 + 4].tolist() == pair_count_oracle(tile)

    def test_conservation_vs_adjacency_count(self):
        # the four tracked classes cover exactly half the 8-neighborhood,
        # so per tile their sum equals the unordered adjacency count
        rng = np.random.default_rng(46)
        bits = (rng.random((100, 200)) < 0.25).astype(np.uint8)
        h = chain_code_histograms(grid_for(bits))
        total = 0
        for idx in range(100):
            r, c = divmod(idx, 10)
            tile = bits[r * 10:(r + 1) * 10, c * 20:(c + 1) * 20]
            total += eight_neighbor_adjacencies(tile)
        assert h.sum() == total


class TestAssemble:
    def test_energy_layout(self):
        v = assemble(Layout.ENERGY, aspect=0.5, energies=np.zeros(100))
        assert v.layout is Layout.ENERGY
        assert len(v.values) == 101
        assert v.values[0] == 0.5
        assert not v.scaled

    def test_direction_layout(self):
        v = assemble(Layout.DIRECTION, histograms=np.ones(400))
        assert len(v.values) == 400
        assert (v.values == 1).all()

    def test_combined_order(self):
        energies = np.arange(100, dtype=float)
        hist = np.arange(400, dtype=float)
        v = assemble(Layout.COMBINED, aspect=2.0, energies=energies, histograms=hist)
        assert v.values[0] == 2.0
        assert v.values[1:101].tolist() == energies.tolist()
        assert v.values[101:].tolist() == hist.tolist()

    def test_missing_parts_rejected(self):
        with pytest.raises(LayoutMismatchError):
            assemble(Layout.ENERGY, energies=np.zeros(100))
        with pytest.raises(LayoutMismatchError):
            assemble(Layout.DIRECTION)
        with pytest.raises(LayoutMismatchError):
            assemble(Layout.COMBINED, aspect=1.0, energies=np.zeros(100))

    def test_wrong_part_sizes_rejected(self):
        with pytest.raises(LayoutMismatchError):
            assemble(Layout.ENERGY, aspect=1.0, energies=np.zeros(99))
        with pytest.raises(LayoutMismatchError):
            assemble(Layout.DIRECTION, histograms=np.zeros(399))

    def test_vector_length_validated(self):
        with pytest.raises(LayoutMismatchError):
            FeatureVector(Layout.ENERGY, np.zeros(100), scaled=False)


class TestScaling:
    def test_version(self):
        assert SCALING_VERSION == 1

    def test_constants(self):
        assert SEGMENT_AREA == 200
        assert PAIR_CAP == 800
        assert ASPECT_CAP == 4.0

    def test_aspect_endpoints(self):
        lo = scale(assemble(Layout.ENERGY, aspect=0.0, energies=np.zeros(100)))
        hi = scale(assemble(Layout.ENERGY, aspect=4.0, energies=np.zeros(100)))
        over = scale(assemble(Layout.ENERGY, aspect=9.9, energies=np.zeros(100)))
        assert lo.values[0] == -1.0
        assert hi.values[0] == 1.0
        assert over.values[0] == 1.0  # capped

    def test_energy_endpoints(self):
        e = np.zeros(100)
        e[0] = 200
        e[1] = 100
        v = scale(assemble(Layout.ENERGY, aspect=1.0, energies=e))
        assert v.values[1] == 1.0
        assert v.values[2] == 0.0
        assert v.values[3] == -1.0

    def test_count_endpoints(self):
        h = np.zeros(400)
        h[0] = 800
        h[1] = 400
        h[2] = 2000  # above cap
        v = scale(assemble(Layout.DIRECTION, histograms=h))
        assert v.values[0] == 1.0
        assert v.values[1] == 0.0
        assert v.values[2] == 1.0
        assert v.values[3] == -1.0

    def test_range_bound(self):
        # energies live in [0, segment area] physically; counts and aspect
        # are explicitly capped, so arbitrary magnitudes stay in range
        rng = np.random.default_rng(50)
        e = rng.integers(0, SEGMENT_AREA + 1, 100).astype(float)
        h = rng.integers(0, 9000, 400).astype(float)
        v = scale(assemble(Layout.COMBINED, aspect=50.0, energies=e, histograms=h))
        assert v.scaled
        assert (v.values >= -1.0).all() and (v.values <= 1.0).all()

    def test_double_scale_rejected(self):
        v = scale(assemble(Layout.ENERGY, aspect=1.0, energies=np.zeros(100)))
        with pytest.raises(ValueError):
            scale(v)


class TestExtract:
    def test_end_to_end_shapes(self):
        from sigvernet.syndata import GENUINE_KIND, SignerStyle, gen_signature

        g = gen_signature(SignerStyle.from_seed(2), GENUINE_KIND, 0)
        for lay in Layout:
            v = extract_features(g, lay)
            assert v.layout is lay
            assert len(v.values) == lay.size
            assert v.scaled
            assert (np.abs(v.values) <= 1.0).all()

    def test_combined_contains_energy_slice(self):
        from sigvernet.syndata import GENUINE_KIND, SignerStyle, gen_signature

        g = gen_signature(SignerStyle.from_seed(6), GENUINE_KIND, 1)
        combined = extract_features(g, Layout.COMBINED)
        energy = extract_features(g, Layout.ENERGY)
        assert np.array_equal(combined.values[:101], energy.values)

    def test_assemble_from_grid_matches(self):
        from sigvernet.preprocess import preprocess_pipeline
        from sigvernet.syndata import FORGERY_KIND, SignerStyle, gen_signature

        g = gen_signature(SignerStyle.from_seed(9), FORGERY_KIND, 2)
        grid, aspect = preprocess_pipeline(g)
        direct = extract_features(g, Layout.DIRECTION)
        from_grid = scale(assemble_from_grid(Layout.DIRECTION, grid, aspect))
        assert np.array_equal(direct.values, from_grid.values)


class TestCsv:
    def test_format(self):
        v = scale(assemble(Layout.ENERGY, aspect=2.0, energies=np.zeros(100)))
        text = format_feature_csv(v)
        lines = text.strip().split("\n")
        assert lines[0] == f"energy,{SCALING_VERSION}"
        cells = lines[1].split(",")
        assert len(cells) == 101
        assert float(cells[0]) == 0.0  # aspect 2.0 scales to 0

    def test_values_roundtrip_close(self):
        rng = np.random.default_rng(60)
        e = rng.integers(0, 200, 100).astype(float)
        v = scale(assemble(Layout.ENERGY, aspect=1.3, energies=e))
        row = format_feature_csv(v).strip().split("\n")[1]
        back = np.array([float(c) for c in row.split(",")])
        assert np.allclose(back, v.values, atol=1e-7)

    def test_unscaled_rejected(self):
        v = assemble(Layout.ENERGY, aspect=1.0, energies=np.zeros(100))
        with pytest.raises(ValueError):
            format_feature_csv(v)
