import numpy as np
import pytest

from simhaystack import keypoints as kpt
from simhaystack.hashbits import ber
from simhaystack.imageops import encode_jpeg
from simhaystack.perturb import PerturbationSpec, apply
from simhaystack.synthcorpus import generate_image


def square_fixture(lo=0, hi=255):
    img = np.full((64, 64), lo, dtype=np.uint8)
    img[20:44, 20:44] = hi
    return img


@pytest.fixture(scope="module")
def textured():
    # corner-rich scene (seed picked for a full feature budget)
    return generate_image(1004, 160, 120)


class TestFastDetect:
    def test_constant_image_no_keypoints(self):
        assert kpt.fast_detect(np.full((64, 64), 128, dtype=np.uint8)) == []

    def test_tiny_image_empty_not_error(self):
        assert kpt.fast_detect(np.full((5, 5), 7, dtype=np.uint8)) == []

    def test_square_corners_within_two_px(self):
        kps = kpt.fast_detect(square_fixture())
        assert len(kps) == 4
        truth = [(20, 20), (43, 20), (20, 43), (43, 43)]
        for tx, ty in truth:
            assert any(abs(k.x - tx) <= 2 and abs(k.y - ty) <= 2 for k in kps)
        assert all(k.response > 0 for k in kps)

    def test_brightness_shift_invariance(self):
        base = square_fixture(40, 200)
        shifted = (base.astype(np.int16) + 10).clip(0, 255).astype(np.uint8)
        a = [(k.x, k.y) for k in kpt.fast_detect(base, threshold=20)]
        b = [(k.x, k.y) for k in kpt.fast_detect(shifted, threshold=20)]
        assert a == b

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError):
            kpt.fast_detect(square_fixture(), threshold=0)


class TestBriefDescribe:
    def test_deterministic(self, textured):
        kps = kpt.fast_detect(textured)
        assert kps, "fixture must produce keypoints"
        d1 = kpt.brief_describe(textured, kps[0])
        d2 = kpt.brief_describe(textured.copy(), kps[0])
        assert d1 == d2
        assert d1.length == 256

    def test_rotation_thirty_degrees(self, textured):
        """Descriptor survives a 30-degree rotation about the keypoint."""
        from simhaystack.imageops import to_grayscale

        gray = to_grayscale(textured)
        kps = sorted(kpt.fast_detect(gray), key=lambda k: -k.response)
        h, w = gray.shape
        # pick a keypoint far enough from borders to survive rotation
        kp0 = next(k for k in kps if 40 <= k.x < w - 40 and 40 <= k.y < h - 40)
        theta = np.deg2rad(30)
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        dx, dy = xx - kp0.x, yy - kp0.y
        src_x = np.clip(cos_t * dx + sin_t * dy + kp0.x, 0, w - 1)
        src_y = np.clip(-sin_t * dx + cos_t * dy + kp0.y, 0, h - 1)
        x0 = np.floor(src_x).astype(int)
        y0 = np.floor(src_y).astype(int)
        x1 = np.minimum(x0 + 1, w - 1)
        y1 = np.minimum(y0 + 1, h - 1)
        fx, fy = src_x - x0, src_y - y0
        g = gray.astype(np.float64)
        rot = (g[y0, x0] * (1 - fx) + g[y0, x1] * fx) * (1 - fy) + (
            g[y1, x0] * (1 - fx) + g[y1, x1] * fx
        ) * fy
        rotated = np.clip(np.round(rot), 0, 255).astype(np.uint8)
        kps_rot = kpt.fast_detect(rotated)
        near = [k for k in kps_rot if abs(k.x - kp0.x) <= 2 and abs(k.y - kp0.y) <= 2]
        assert near, "corner must still be detected after rotation"
        d0 = kpt.brief_describe(gray, kp0)
        best = min(ber(d0, kpt.brief_describe(rotated, k)) for k in near)
        assert best <= 0.2

    def test_distinct_texture_keypoints_near_half_ber(self):
        rng = np.random.default_rng(9)
        img = rng.integers(0, 256, (200, 200), dtype=np.uint8)
        kps = sorted(kpt.fast_detect(img), key=lambda k: -k.response)[:40]
        assert len(kps) >= 10
        descs = [kpt.brief_describe(img, k) for k in kps]
        rates = [
            ber(descs[i], descs[j]) for i in range(0, 10) for j in range(i + 1, 10)
        ]
        assert 0.35 <= float(np.mean(rates)) <= 0.65

    def test_out_of_bounds_patch_rejected(self):
        img = np.zeros((64, 64), dtype=np.uint8)
        with pytest.raises(ValueError):
            kpt.brief_describe(img, kpt.Keypoint(2.0, 2.0, 1.0, 0.0))


class TestExtractFeatures:
    def test_cap_and_deterministic_order(self, textured):
        fs = kpt.extract_features(textured, max_features=10)
        assert len(fs) <= 10
        again = kpt.extract_features(textured.copy(), max_features=10)
        assert [(a.x, a.y) for a, _ in fs.descriptors] == [(a.x, a.y) for a, _ in again.descriptors]
        assert all(d1 == d2 for (_, d1), (_, d2) in zip(fs.descriptors, again.descriptors))
        responses = [k.response for k, _ in fs.descriptors]
        assert responses == sorted(responses, reverse=True)

    def test_empty_on_constant(self):
        fs = kpt.extract_features(np.full((64, 64), 5, dtype=np.uint8))
        assert len(fs) == 0


class TestImageMatch:
    def test_self_match_at_zero(self, textured):
        fs = kpt.extract_features(textured)
        assert len(fs) > 0
        assert kpt.image_match(fs, fs, 0.0)

    def test_empty_set_is_false_not_error(self, textured):
        fs = kpt.extract_features(textured)
        empty = kpt.FeatureSet((), 30)
        assert not kpt.image_match(fs, empty, 1.0)
        assert not kpt.image_match(empty, empty, 1.0)

    def test_jpeg_pair_matches(self, textured):
        fs = kpt.extract_features(textured)
        attacked = encode_jpeg(textured, 50)
        fs2 = kpt.extract_features(attacked)
        assert kpt.image_match(fs, fs2, 0.15)

    def test_symmetry_and_threshold_monotonicity(self, textured):
        other = generate_image(1007, 160, 120)
        a = kpt.extract_features(textured)
        b = kpt.extract_features(other)
        d_ab = kpt.image_distance(a, b)
        assert d_ab == kpt.image_distance(b, a)
        matched_at = [t for t in (0.0, 0.1, 0.2, 0.3, 0.5) if kpt.image_match(a, b, t)]
        # monotone: once matched, stays matched at higher thresholds
        assert matched_at == [t for t in (0.0, 0.1, 0.2, 0.3, 0.5) if t >= (matched_at[0] if matched_at else 2.0)]


def test_perturbed_pair_fixture_matches(textured):
    attacked = apply(PerturbationSpec("jpeg", 50), textured)
    a = kpt.extract_features(textured)
    b = kpt.extract_features(attacked)
    assert kpt.image_match(a, b, 0.15)
