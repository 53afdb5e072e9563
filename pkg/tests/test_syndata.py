import numpy as np
import pytest

from sigvernet.evaluation import load_manifest
from sigvernet.features import Layout, extract_features
from sigvernet.preprocess import preprocess_pipeline
from sigvernet.raster import load_pgm
from sigvernet.syndata import (
    CANVAS_HEIGHT,
    CANVAS_WIDTH,
    FORGERY_KIND,
    GENUINE_KIND,
    SignerStyle,
    gen_dataset,
    gen_signature,
)


class TestStyle:
    def test_deterministic(self):
        a = SignerStyle.from_seed(42)
        b = SignerStyle.from_seed(42)
        assert a.thickness == b.thickness
        assert a.slant_deg == b.slant_deg
        assert len(a.strokes) == len(b.strokes)
        for sa, sb in zip(a.strokes, b.strokes):
            assert np.array_equal(sa, sb)

    def test_seed_changes_style(self):
        a = SignerStyle.from_seed(1)
        b = SignerStyle.from_seed(2)
        same = len(a.strokes) == len(b.strokes) and all(
            np.array_equal(sa, sb) for sa, sb in zip(a.strokes, b.strokes)
        )
        assert not same

    def test_documented_ranges(self):
        for seed in range(30):
            s = SignerStyle.from_seed(seed)
            assert 3 <= len(s.strokes) <= 7
            assert 1 <= s.thickness <= 3
            assert -30.0 <= s.slant_deg <= 30.0
            for stroke in s.strokes:
                assert stroke.shape[1] == 2
                assert 4 <= stroke.shape[0] <= 8
                assert (stroke >= 0).all() and (stroke <= 1).all()


class TestKinds:
    def test_forgery_noisier_than_genuine(self):
        assert FORGERY_KIND.jitter > GENUINE_KIND.jitter
        assert FORGERY_KIND.slant_noise_deg > GENUINE_KIND.slant_noise_deg
        assert FORGERY_KIND.code != GENUINE_KIND.code


class TestGenSignature:
    def test_canvas_shape(self):
        g = gen_signature(SignerStyle.from_seed(0), GENUINE_KIND, 0)
        assert (g.height, g.width) == (CANVAS_HEIGHT, CANVAS_WIDTH)

    def test_deterministic(self):
        style = SignerStyle.from_seed(5)
        a = gen_signature(style, GENUINE_KIND, 7)
        b = gen_signature(style, GENUINE_KIND, 7)
        assert a == b

    def test_seed_and_kind_vary_pixels(self):
        style = SignerStyle.from_seed(5)
        base = gen_signature(style, GENUINE_KIND, 7)
        assert gen_signature(style, GENUINE_KIND, 8) != base
        assert gen_signature(style, FORGERY_KIND, 7) != base

    def test_pipeline_compatible(self):
        for seed in range(4):
            g = gen_signature(SignerStyle.from_seed(seed), GENUINE_KIND, seed)
            grid, aspect = preprocess_pipeline(g)
            assert grid.ink_count() > 0
            assert 0 < aspect < 4

    def test_ink_darker_than_background(self):
        g = gen_signature(SignerStyle.from_seed(3), GENUINE_KIND, 1)
        px = g.pixels
        assert px.min() < 40          # stroke ink
        assert px.max() > 200         # paper

    def test_classes_separate_in_feature_space(self):
        # within-class spread must stay well under the between-class gap,
        # otherwise no classifier could be trained on this data
        style = SignerStyle.from_seed(12)
        genuine = [
            extract_features(gen_signature(style, GENUINE_KIND, i), Layout.COMBINED).values
            for i in range(10)
        ]
        forged = [
            extract_features(gen_signature(style, FORGERY_KIND, i), Layout.COMBINED).values
            for i in range(10)
        ]
        g_mean = np.mean(genuine, axis=0)
        within = np.mean([np.linalg.norm(v - g_mean) for v in genuine])
        between = np.mean([np.linalg.norm(v - g_mean) for v in forged])
        assert between > within * 1.2


class TestGenDataset:
    def test_layout_and_manifest(self, tmp_path):
        manifest = gen_dataset(2, 3, 4, seed=9, out_dir=tmp_path)
        assert manifest == tmp_path / "manifest.txt"
        pgms = sorted(p.name for p in tmp_path.glob("*.pgm"))
        assert len(pgms) == 2 * (3 + 4)
        assert "s01_g001.pgm" in pgms
        assert "s02_f004.pgm" in pgms

        data = load_manifest(manifest)
        assert data.signer_ids() == ["s01", "s02"]
        for sid in data.signer_ids():
            signer = data.signer(sid)
            assert len(signer.genuine) == 3
            assert len(signer.forgery) == 4
            for p in signer.genuine + signer.forgery:
                r = load_pgm(p)
                assert (r.height, r.width) == (CANVAS_HEIGHT, CANVAS_WIDTH)

    def test_byte_deterministic_across_dirs(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        gen_dataset(1, 2, 2, seed=4, out_dir=d1)
        gen_dataset(1, 2, 2, seed=4, out_dir=d2)
        for p1 in sorted(d1.glob("*.pgm")):
            p2 = d2 / p1.name
            assert p1.read_bytes() == p2.read_bytes()

    def test_seed_matters(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        gen_dataset(1, 1, 1, seed=4, out_dir=d1)
        gen_dataset(1, 1, 1, seed=5, out_dir=d2)
        assert (d1 / "s01_g001.pgm").read_bytes() != (d2 / "s01_g001.pgm").read_bytes()

    def test_bad_counts(self, tmp_path):
        with pytest.raises(ValueError):
            gen_dataset(0, 1, 1, seed=0, out_dir=tmp_path)
        with pytest.raises(ValueError):
            gen_dataset(1, 0, 1, seed=0, out_dir=tmp_path)
        with pytest.raises(ValueError):
            gen_dataset(1, 1, 0, seed=0, out_dir=tmp_path)
