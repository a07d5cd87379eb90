"""Lighting simulation and generators: determinism and regimes."""

import numpy as np
import pytest

from lipmatch import (
    GreyImage,
    RangeMode,
    dist_add,
    dist_mult,
    gen_noisy_plane,
    lip_neg,
    make_detection_scene,
    simulate_add_darken,
    simulate_mul_darken,
)


class TestSimulate:
    def test_identity_cases(self):
        rng = np.random.default_rng(0)
        f = rng.uniform(1, 255, (6, 6))
        np.testing.assert_allclose(simulate_mul_darken(f, 1.0), f, atol=1e-12)
        np.testing.assert_allclose(simulate_add_darken(f, 0.0), f, atol=1e-12)

    def test_mul_darken_via_complement_stays_in_range(self):
        rng = np.random.default_rng(1)
        f = rng.uniform(1, 255, (10, 10))
        out = simulate_mul_darken(f, 5.0)
        assert out.min() >= 0.0 and out.max() < 256.0
        # the complement converts to the 0 = white scale and back, so a
        # luminance-convention input comes out pointwise darker (lower)
        assert np.all(out <= f)

    def test_mul_darken_without_complement(self):
        f = np.full((2, 2), 100.0)
        out = simulate_mul_darken(f, 2.0, via_complement=False)
        np.testing.assert_allclose(out, 160.9375)

    def test_add_darken_strong_constant_goes_negative(self):
        f = np.full((3, 3), 50.0)
        k = float(lip_neg(100.0))
        assert k == pytest.approx(-164.1026, abs=1e-4)
        out = simulate_add_darken(f, k)
        assert np.all(out < 0)

    def test_grey_image_mode_tracking(self):
        img = GreyImage(np.full((2, 2), 50.0))
        dark = simulate_add_darken(img, float(lip_neg(100.0)))
        assert dark.range_mode is RangeMode.EXTENDED
        mild = simulate_add_darken(img, 20.0)
        assert mild.range_mode is RangeMode.IMAGE

    def test_validation(self):
        with pytest.raises(ValueError):
            simulate_mul_darken(np.zeros((2, 2)), 0.0)
        with pytest.raises(ValueError):
            simulate_add_darken(np.zeros((2, 2)), 256.0)


class TestNoisyPlane:
    def test_zero_density_identical(self):
        f, g = gen_noisy_plane(16, 16, 100.0, 0.0, 2.0, seed=1)
        np.testing.assert_array_equal(f, g)
        assert dist_mult(f, g) == 0.0
        assert dist_add(f, g) == 0.0

    def test_deterministic_per_seed(self):
        a1, _ = gen_noisy_plane(32, 32, 100.0, 0.08, np.sqrt(5.0), seed=9)
        a2, _ = gen_noisy_plane(32, 32, 100.0, 0.08, np.sqrt(5.0), seed=9)
        np.testing.assert_array_equal(a1, a2)
        b, _ = gen_noisy_plane(32, 32, 100.0, 0.08, np.sqrt(5.0), seed=10)
        assert not np.array_equal(a1, b)

    def test_density_respected(self):
        f, g = gen_noisy_plane(50, 40, 100.0, 0.08, np.sqrt(5.0), seed=3)
        changed = np.count_nonzero(f != g)
        assert changed <= int(0.08 * f.size)
        assert changed >= int(0.08 * f.size) * 0.9  # a few draws may be ~0

    def test_tolerance_drives_distance_to_zero(self):
        f, g = gen_noisy_plane(64, 64, 100.0, 0.08, np.sqrt(5.0), seed=4)
        assert dist_mult(f, g) > 0.0
        assert dist_add(f, g) > 0.0
        assert dist_mult(f, g, p=0.90) == 0.0
        assert dist_add(f, g, p=0.90) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_noisy_plane(8, 8, 100.0, 1.5, 1.0)


def test_detection_scene_structure():
    scene, probe, positions = make_detection_scene()
    assert scene.shape == (256, 256)
    assert len(probe) == 285
    assert len(positions) == 4
    # the add-darkened stamp pushes the scene into negative values
    assert scene.min() < -100.0
    # stamps carry the probe exactly at the two plain positions
    r, c = positions[0]
    np.testing.assert_array_equal(
        scene[r + probe.offsets[:, 0], c + probe.offsets[:, 1]], probe.values
    )
