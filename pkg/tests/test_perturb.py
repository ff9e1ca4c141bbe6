import numpy as np
import pytest

from simhaystack import perturb
from simhaystack.imageops import resize
from simhaystack.synthcorpus import generate_image

# Parameter table the suite must reproduce exactly (family -> params)
TABLE = {
    "gaussian_noise": [0.01, 0.02, 0.05],
    "speckle_noise": [0.01, 0.02, 0.05],
    "salt_pepper": [0.05, 0.1, 0.15],
    "gaussian_filter": [3, 5, 7],
    "median_filter": [3, 5, 7],
    "jpeg": [10, 50, 90],
    "crop_rescale": [5, 10, 20, 40, 60],
    "rotate_rescale": [5, 10, 20, 40, 60],
    "shear": [1, 2, 5, 10, 20],
    "scale": [0.4, 0.8, 1.2, 1.6],
    "text": [10, 20, 30, 40, 50],
    "color": [1 / 2, 2 / 3, 3 / 2, 2],
    "sharpness": [1 / 2, 2 / 3, 3 / 2, 2],
    "contrast": [1 / 2, 2 / 3, 3 / 2, 2],
    "brightness": [1 / 2, 2 / 3, 3 / 2, 2],
}
GROUPS = {"noise": 18, "geometric": 24, "enhancement": 16}


@pytest.fixture(scope="module")
def scene():
    return generate_image(42, 120, 90)


class TestSuiteCensus:
    def test_exactly_58_specs(self):
        assert len(perturb.SUITE) == 58

    def test_multiset_matches_table(self):
        want = {(fam, p) for fam, params in TABLE.items() for p in params}
        got = {(fam, val) for fam, val, _ in perturb.SUITE}
        assert got == want
        assert len(perturb.SUITE) == len(want)

    def test_group_census(self):
        counts = {"noise": 0, "geometric": 0, "enhancement": 0}
        for fam, val, _ in perturb.SUITE:
            counts[perturb.PerturbationSpec(fam, val, seed=0).group] += 1
        assert counts == GROUPS

    def test_generate_suite_yields_58(self, scene):
        out = perturb.generate_suite("id0", scene, base_seed=1)
        assert len(out) == 58


class TestDeterminism:
    def test_same_seed_byte_identical(self, scene):
        a = perturb.generate_suite("id0", scene, base_seed=9)
        b = perturb.generate_suite("id0", scene.copy(), base_seed=9)
        for (sa, ia), (sb, ib) in zip(a, b):
            assert sa == sb
            assert ia.tobytes() == ib.tobytes()

    def test_different_image_id_changes_noise(self, scene):
        spec_a = perturb.PerturbationSpec(
            "gaussian_noise", 0.02, perturb.derive_seed(9, "gaussian_noise", 0.02, "id0")
        )
        spec_b = perturb.PerturbationSpec(
            "gaussian_noise", 0.02, perturb.derive_seed(9, "gaussian_noise", 0.02, "id1")
        )
        out_a = perturb.apply(spec_a, scene)
        out_b = perturb.apply(spec_b, scene)
        assert out_a.tobytes() != out_b.tobytes()


class TestFamilySemantics:
    def test_brightness_doubles_values(self):
        img = np.full((10, 10, 3), 100, dtype=np.uint8)
        out = perturb.apply(perturb.PerturbationSpec("brightness", 2.0), img)
        assert (out == 200).all()

    def test_contrast_identity_factor(self, scene):
        out = perturb.apply(perturb.PerturbationSpec("contrast", 1.0, permissive=True), scene)
        assert out.tobytes() == scene.tobytes()

    @pytest.mark.parametrize("family", ["color", "sharpness", "contrast", "brightness"])
    def test_enhancement_identity_at_one(self, family, scene):
        out = perturb.apply(perturb.PerturbationSpec(family, 1.0, permissive=True), scene)
        assert out.tobytes() == scene.tobytes()

    def test_salt_pepper_fraction_concentration(self):
        rng = np.random.default_rng(0)
        img = rng.integers(1, 255, (256, 256), dtype=np.uint8)  # no 0/255 so every hit alters
        spec = perturb.PerturbationSpec("salt_pepper", 0.15, seed=1234)
        out = perturb.apply(spec, img)
        altered = (out != img).mean()
        assert 0.14 <= altered <= 0.16
        assert set(np.unique(out[out != img])) <= {0, 255}

    def test_crop_rescale_sixty_percent(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, (100, 100, 3), dtype=np.uint8)
        out = perturb.apply(perturb.PerturbationSpec("crop_rescale", 60), img)
        # 60% removed per dimension, 30% per side: interior 40x40 rescaled up
        assert out.shape == (100, 100, 3)
        assert (out == resize(img[30:70, 30:70], 100, 100)).all()

    def test_scale_changes_dimensions(self, scene):
        h, w = scene.shape[:2]
        for r in (0.4, 0.8, 1.2, 1.6):
            out = perturb.apply(perturb.PerturbationSpec("scale", r), scene)
            assert out.shape[:2] == (round(h * r), round(w * r))

    def test_all_non_scale_families_preserve_shape(self, scene):
        for fam, val, _ in perturb.SUITE:
            if fam == "scale":
                continue
            spec = perturb.PerturbationSpec(
                fam, val, perturb.derive_seed(0, fam, val, "x") if fam in perturb.STOCHASTIC_FAMILIES else None
            )
            assert perturb.apply(spec, scene).shape == scene.shape

    def test_text_is_white_with_black_outline_in_bottom_band(self, scene):
        spec = perturb.PerturbationSpec("text", 10, seed=7)
        out = perturb.apply(spec, scene)
        h = scene.shape[0]
        band = out[h - int(round(0.15 * h)) :, :]
        changed = band != scene[h - int(round(0.15 * h)) :, :]
        assert changed.any()
        touched = np.unique(band[changed.any(axis=-1)])
        assert 255 in touched and 0 in touched
        # nothing outside the bottom band changes
        assert (out[: h - int(round(0.15 * h)) - 1, :] == scene[: h - int(round(0.15 * h)) - 1, :]).all()

    def test_rotation_preserves_frame_and_fills_content(self, scene):
        out = perturb.apply(perturb.PerturbationSpec("rotate_rescale", 60), scene)
        assert out.shape == scene.shape

    def test_gaussian_noise_variance_scale(self):
        img = np.full((200, 200), 128, dtype=np.uint8)
        spec = perturb.PerturbationSpec("gaussian_noise", 0.05, seed=5)
        out = perturb.apply(spec, img).astype(np.float64) / 255.0
        measured = out.std()
        assert abs(measured - np.sqrt(0.05)) < 0.03  # clipping shaves a little


class TestValidation:
    def test_off_table_parameter_rejected(self):
        with pytest.raises(ValueError):
            perturb.PerturbationSpec("jpeg", 42)

    def test_permissive_lifts_rejection(self, scene):
        spec = perturb.PerturbationSpec("jpeg", 42, permissive=True)
        assert perturb.apply(spec, scene).shape == scene.shape

    def test_stochastic_without_seed_rejected(self):
        with pytest.raises(ValueError):
            perturb.PerturbationSpec("salt_pepper", 0.1)

    def test_unknown_family_rejected(self):
        with pytest.raises(ValueError):
            perturb.PerturbationSpec("posterize", 4)
