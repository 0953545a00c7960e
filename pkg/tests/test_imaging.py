import numpy as np
import pytest

from matteforge.errors import ImageTooSmall, InvalidBoundingBox, InvalidTarget
from matteforge.imaging import (
    BoundingBox,
    band_around_boundary,
    downsample,
    lab_to_rgb,
    load_image,
    load_mask,
    rgb_to_lab,
    save_image_png,
    save_mask_png,
    upsample_mask,
)
from oracles import chebyshev_band_bruteforce, lab_reference


class TestDownsample:
    def test_dimension_arithmetic(self):
        img = np.random.default_rng(0).random((100, 100, 3))
        assert downsample(img, 2).shape == (50, 50, 3)

    def test_ceil_dimensions(self):
        img = np.random.default_rng(0).random((101, 50, 3))
        assert downsample(img, 4).shape == (26, 13, 3)

    def test_identity_factor_is_bit_exact(self):
        img = np.random.default_rng(1).random((37, 23, 3))
        out = downsample(img, 1)
        assert out is img or np.array_equal(out, img)

    def test_constant_preserved(self):
        img = np.full((80, 80, 3), 0.37)
        out = downsample(img, 4)
        assert out.shape == (20, 20, 3)
        assert np.abs(out - 0.37).max() < 1e-12

    def test_too_small_output(self):
        img = np.random.default_rng(0).random((10, 10, 3))
        with pytest.raises(ImageTooSmall):
            downsample(img, 10)

    def test_composition_dimensions(self):
        img = np.random.default_rng(2).random((97, 61, 3))
        twice = downsample(downsample(img, 2), 2)
        once = downsample(img, 4)
        assert twice.shape == once.shape

    def test_output_in_range(self):
        img = np.random.default_rng(3).random((40, 40, 3))
        out = downsample(img, 3)
        assert out.min() >= 0.0 and out.max() <= 1.0


class TestUpsampleMask:
    def test_exact_multiple_blocks(self):
        mask = np.array([[True, False], [False, False]])
        out = upsample_mask(mask, 4, 4)
        expected = np.repeat(np.repeat(mask, 2, axis=0), 2, axis=1)
        assert np.array_equal(out, expected)

    def test_constant_mask(self):
        mask = np.ones((3, 5), dtype=bool)
        assert upsample_mask(mask, 11, 7).all()

    def test_identity(self):
        mask = np.random.default_rng(0).random((10, 10)) > 0.5
        assert np.array_equal(upsample_mask(mask, 10, 10), mask)

    def test_smaller_target_rejected(self):
        with pytest.raises(InvalidTarget):
            upsample_mask(np.ones((6, 6), dtype=bool), 5, 8)

    def test_label_set_preserved(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            h, w = rng.integers(2, 9, size=2)
            mask = rng.random((h, w)) > rng.random()
            out = upsample_mask(mask, int(w) * 3 + 1, int(h) * 2 + 1)
            assert set(np.unique(out)) <= set(np.unique(mask))


class TestLab:
    def test_black(self):
        lab = rgb_to_lab(np.zeros((1, 1, 3)))
        assert np.abs(lab).max() < 1e-9

    def test_white(self):
        lab = rgb_to_lab(np.ones((1, 1, 3)))
        assert abs(lab[0, 0, 0] - 100.0) < 0.01
        assert abs(lab[0, 0, 1]) < 0.01
        assert abs(lab[0, 0, 2]) < 0.01

    def test_mid_gray_frozen_reference(self):
        # frozen from the scalar reference: L = 53.38896705407973
        lab = rgb_to_lab(np.full((1, 1, 3), 0.5))
        assert abs(lab[0, 0, 0] - 53.38896705407973) < 1e-9
        assert abs(lab[0, 0, 1]) < 1e-4
        assert abs(lab[0, 0, 2]) < 1e-4

    def test_matches_scalar_reference(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            r, g, b = rng.random(3)
            got = rgb_to_lab(np.array([[[r, g, b]]]))[0, 0]
            want = lab_reference(r, g, b)
            assert np.abs(got - np.array(want)).max() < 1e-9

    def test_round_trip(self):
        rng = np.random.default_rng(6)
        img = rng.random((16, 16, 3))
        back = lab_to_rgb(rgb_to_lab(img))
        assert np.abs(back - img).max() < 1e-3

    def test_ranges(self):
        rng = np.random.default_rng(7)
        lab = rgb_to_lab(rng.random((32, 32, 3)))
        assert lab[..., 0].min() >= 0.0 and lab[..., 0].max() <= 100.0001
        assert lab[..., 1:].min() >= -128 and lab[..., 1:].max() <= 127


class TestBandAroundBoundary:
    def test_uniform_mask_empty(self):
        assert not band_around_boundary(np.ones((5, 5), dtype=bool), 3).any()
        assert not band_around_boundary(np.zeros((5, 5), dtype=bool), 3).any()

    def test_half_split_r1(self):
        mask = np.zeros((4, 4), dtype=bool)
        mask[:, :2] = True
        band = band_around_boundary(mask, 1)
        expected = np.zeros((4, 4), dtype=bool)
        expected[:, 1:3] = True
        assert np.array_equal(band, expected)

    def test_half_split_r2_all(self):
        mask = np.zeros((4, 4), dtype=bool)
        mask[:, :2] = True
        band = band_around_boundary(mask, 2)
        # brute-force enumeration on the 4x4 grid says every pixel qualifies
        assert np.array_equal(band, chebyshev_band_bruteforce(mask, 2))
        assert band.all()

    def test_matches_bruteforce_random(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            mask = rng.random((7, 9)) > 0.5
            for r in (1, 2, 3):
                got = band_around_boundary(mask, r)
                assert np.array_equal(got, chebyshev_band_bruteforce(mask, r))

    def test_label_swap_symmetry(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            mask = rng.random((8, 8)) > 0.4
            assert np.array_equal(
                band_around_boundary(mask, 2), band_around_boundary(~mask, 2)
            )

    def test_monotone_in_radius(self):
        rng = np.random.default_rng(10)
        mask = rng.random((12, 12)) > 0.5
        b1 = band_around_boundary(mask, 1)
        b2 = band_around_boundary(mask, 2)
        assert (b1 & ~b2).sum() == 0


class TestBoundingBox:
    def test_margin_rule(self):
        BoundingBox(1, 1, 8, 8).validate(10, 10)
        with pytest.raises(InvalidBoundingBox):
            BoundingBox(0, 1, 8, 8).validate(10, 10)
        with pytest.raises(InvalidBoundingBox):
            BoundingBox(1, 1, 9, 8).validate(10, 10)

    def test_dilate_clamps_to_margin(self):
        box = BoundingBox(10, 10, 80, 80)
        big = box.dilate(5.0, 100, 100)
        big.validate(100, 100)
        assert big.x >= 1 and big.y >= 1


class TestFileIO:
    def test_image_round_trip(self, tmp_path):
        rng = np.random.default_rng(11)
        img = np.round(rng.random((9, 13, 3)) * 255) / 255
        path = tmp_path / "img.png"
        save_image_png(img, path)
        back = load_image(path)
        assert back.shape == img.shape
        assert np.abs(back - img).max() < 1e-9

    def test_mask_round_trip(self, tmp_path):
        mask = np.random.default_rng(12).random((8, 8)) > 0.5
        path = tmp_path / "mask.png"
        save_mask_png(mask, path)
        assert np.array_equal(load_mask(path), mask)

    def test_jpeg_read(self, tmp_path):
        from PIL import Image as PILImage

        ys, xs = np.mgrid[0:16, 0:20]
        smooth = np.stack([xs / 19, ys / 15, (xs + ys) / 34], axis=-1)
        data = (smooth * 255).astype(np.uint8)
        path = tmp_path / "img.jpg"
        PILImage.fromarray(data).save(path, format="JPEG", quality=95)
        img = load_image(path)
        assert img.shape == (16, 20, 3)
        assert 0.0 <= img.min() and img.max() <= 1.0
        # lossy but close on smooth content
        assert np.abs(img - data / 255.0).mean() < 0.02
