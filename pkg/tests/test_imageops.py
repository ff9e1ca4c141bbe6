import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simhaystack import imageops as ops


def dct2_bruteforce(plane):
    """Direct O(N^4) evaluation of the orthonormal DCT-II definition."""
    n = plane.shape[0]
    out = np.zeros((n, n))
    for k in range(n):
        for l in range(n):
            total = 0.0
            for m in range(n):
                for p in range(n):
                    total += (
                        plane[m, p]
                        * np.cos(np.pi * (2 * m + 1) * k / (2 * n))
                        * np.cos(np.pi * (2 * p + 1) * l / (2 * n))
                    )
            ak = np.sqrt((1 if k == 0 else 2) / n)
            al = np.sqrt((1 if l == 0 else 2) / n)
            out[k, l] = ak * al * total
    return out


class TestGrayscale:
    def test_white_is_255(self):
        img = np.full((2, 2, 3), 255, dtype=np.uint8)
        assert (ops.to_grayscale(img) == 255).all()

    def test_pure_red(self):
        img = np.zeros((1, 1, 3), dtype=np.uint8)
        img[..., 0] = 255
        # round(0.299 * 255) = round(76.245)
        assert ops.to_grayscale(img)[0, 0] == 76

    def test_gray_input_is_identity(self):
        img = np.arange(12, dtype=np.uint8).reshape(3, 4)
        out = ops.to_grayscale(img)
        assert out is img or (out == img).all()


class TestResize:
    def test_same_size_is_identity(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, (7, 9), dtype=np.uint8)
        assert (ops.resize(img, 9, 7) == img).all()

    def test_constant_any_size(self):
        img = np.full((4, 4, 3), 200, dtype=np.uint8)
        for w, h in [(1, 1), (3, 5), (8, 8), (11, 2)]:
            assert (ops.resize(img, w, h) == 200).all()

    def test_two_pixel_box_average_rounds_half_away(self):
        img = np.array([[0, 255]], dtype=np.uint8)
        # box average 127.5, rounded half away from zero
        assert ops.resize(img, 1, 1)[0, 0] == 128

    def test_exact_block_average_on_divisible_grid(self):
        img = np.array([[10, 20, 30, 40], [50, 60, 70, 80]], dtype=np.uint8)
        out = ops.resize(img, 2, 1)
        # block means: (10+20+50+60)/4 = 35, (30+40+70+80)/4 = 55
        assert out.tolist() == [[35, 55]]


class TestDct:
    def test_constant_plane(self):
        n, c = 8, 3.5
        coeffs = ops.dct2(np.full((n, n), c))
        assert coeffs[0, 0] == pytest.approx(c * n, abs=1e-9)
        ac = coeffs.copy()
        ac[0, 0] = 0
        assert np.abs(ac).max() < 1e-9

    def test_inverse_recovers(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(16, 16))
        back = ops.idct2(ops.dct2(x))
        assert np.abs(back - x).max() < 1e-9

    def test_matches_bruteforce_definition(self):
        # frozen case first: dct2([[1,0],[0,0]]) is 0.5 everywhere
        simple = ops.dct2(np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert simple == pytest.approx(np.full((2, 2), 0.5), abs=1e-12)
        rng = np.random.default_rng(2)
        x = rng.normal(size=(5, 5))
        assert ops.dct2(x) == pytest.approx(dct2_bruteforce(x), abs=1e-9)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            ops.dct2(np.zeros((2, 3)))


class TestHaar:
    def test_constant_plane(self):
        out = ops.haar_dwt(np.full((8, 8), 2.0), 3)
        assert out[0, 0] == pytest.approx(2.0 * 8, abs=1e-9)  # LL scales by 2 per level
        detail = out.copy()
        detail[0, 0] = 0
        assert np.abs(detail).max() < 1e-9

    def test_single_level_2x2_hand_values(self):
        a, b, c, d = 7.0, 1.0, -2.0, 4.0
        out = ops.haar_dwt(np.array([[a, b], [c, d]]), 1)
        assert out[0, 0] == pytest.approx((a + b + c + d) / 2)
        assert out[0, 1] == pytest.approx((a - b + c - d) / 2)
        assert out[1, 0] == pytest.approx((a + b - c - d) / 2)
        assert out[1, 1] == pytest.approx((a - b - c + d) / 2)

    def test_perfect_reconstruction(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(16, 16))
        for levels in (1, 2, 4):
            back = ops.haar_idwt(ops.haar_dwt(x, levels), levels)
            assert np.abs(back - x).max() < 1e-9

    def test_rejects_indivisible_side(self):
        with pytest.raises(ValueError):
            ops.haar_dwt(np.zeros((6, 6)), 2)


def gaussian_bruteforce(plane, kernel_size):
    """Direct 2-D convolution with the separable kernel's outer product."""
    k1 = ops.gaussian_kernel1d(kernel_size)
    k2 = np.outer(k1, k1)
    pad = kernel_size // 2
    work = np.pad(plane.astype(np.float64), pad, mode="reflect")
    h, w = plane.shape
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            out[y, x] = (work[y : y + kernel_size, x : x + kernel_size] * k2).sum()
    return out


class TestGaussianFilter:
    def test_constant_unchanged(self):
        img = np.full((10, 10), 77, dtype=np.uint8)
        for k in (3, 5, 7):
            assert (ops.gaussian_filter(img, k) == 77).all()

    def test_kernel_normalized(self):
        for k in (3, 5, 7):
            assert abs(ops.gaussian_kernel1d(k).sum() - 1.0) < 1e-12

    def test_single_pixel_spreads_symmetrically(self):
        img = np.zeros((11, 11), dtype=np.uint8)
        img[5, 5] = 255
        out = ops.gaussian_filter(img, 5)
        assert (out == np.rot90(out)).all()
        oracle = gaussian_bruteforce(img, 5)
        assert (out == ops.quantize(oracle)).all()

    def test_even_kernel_rejected(self):
        with pytest.raises(ValueError):
            ops.gaussian_filter(np.zeros((5, 5), dtype=np.uint8), 4)


class TestMedianFilter:
    def test_constant_unchanged(self):
        img = np.full((9, 9, 3), 13, dtype=np.uint8)
        assert (ops.median_filter(img, 3) == 13).all()

    def test_salt_pixel_removed(self):
        img = np.full((9, 9), 50, dtype=np.uint8)
        img[4, 4] = 255
        assert (ops.median_filter(img, 3) == 50).all()

    def test_matches_naive_sorted_windows(self):
        rng = np.random.default_rng(4)
        img = rng.integers(0, 256, (12, 12), dtype=np.uint8)
        k = 5
        pad = k // 2
        work = np.pad(img, pad, mode="reflect")
        oracle = np.zeros_like(img)
        for y in range(12):
            for x in range(12):
                window = sorted(work[y : y + k, x : x + k].reshape(-1).tolist())
                oracle[y, x] = window[len(window) // 2]
        assert (ops.median_filter(img, k) == oracle).all()

    def test_even_kernel_rejected(self):
        with pytest.raises(ValueError):
            ops.median_filter(np.zeros((5, 5), dtype=np.uint8), 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([4, 8]))
def test_transforms_are_linear(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, n))
    y = rng.normal(size=(n, n))
    alpha, beta = rng.normal(size=2)
    assert np.abs(ops.dct2(alpha * x + beta * y) - (alpha * ops.dct2(x) + beta * ops.dct2(y))).max() < 1e-9
    lv = 1 if n == 4 else 2
    assert np.abs(
        ops.haar_dwt(alpha * x + beta * y, lv) - (alpha * ops.haar_dwt(x, lv) + beta * ops.haar_dwt(y, lv))
    ).max() < 1e-9


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_transforms_preserve_energy(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(8, 8))
    sq = (x ** 2).sum()
    assert abs((ops.dct2(x) ** 2).sum() - sq) < 1e-6 * max(sq, 1.0)
    assert abs((ops.haar_dwt(x, 3) ** 2).sum() - sq) < 1e-6 * max(sq, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 255), st.integers(1, 12), st.integers(1, 12))
def test_resize_idempotent_on_constants(value, w, h):
    img = np.full((5, 7), value, dtype=np.uint8)
    assert (ops.resize(img, w, h) == value).all()
