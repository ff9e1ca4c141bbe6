"""Minimal image mathematics shared by hashing and perturbation.

Images are numpy uint8 arrays: shape (h, w) for grayscale, (h, w, 3) for RGB,
row-major. All resampling, transforms and filters are implemented here rather
than delegated to an imaging library so that hashes are bit-reproducible; PIL
is used only to decode/encode PNG and JPEG at the edges of the system.

Conventions fixed once for the whole package:
  * grayscale weights are the BT.601 triple (0.299, 0.587, 0.114)
  * intensities are rounded half-away-from-zero wherever they are produced
  * filters use reflected borders
  * dct2 / haar_dwt are orthonormal
"""

from __future__ import annotations

import io
from functools import lru_cache
from pathlib import Path

import numpy as np
from PIL import Image

__all__ = [
    "load_image",
    "save_png",
    "check_image",
    "to_grayscale",
    "resize",
    "dct2",
    "idct2",
    "haar_dwt",
    "haar_idwt",
    "gaussian_filter",
    "median_filter",
    "gaussian_kernel1d",
    "quantize",
]


def quantize(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero, to uint8."""
    return np.floor(np.clip(values, 0.0, 255.0) + 0.5).astype(np.uint8)


def check_image(img: np.ndarray) -> np.ndarray:
    """Validate a raster image array and return it as a C-contiguous uint8 array."""
    arr = np.asarray(img)
    if arr.dtype != np.uint8:
        raise ValueError(f"image must be uint8, got {arr.dtype}")
    if arr.ndim == 2:
        pass
    elif arr.ndim == 3 and arr.shape[2] == 3:
        pass
    else:
        raise ValueError(f"image must be (h, w) or (h, w, 3), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image must be at least 1x1, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


def load_image(path) -> np.ndarray:
    """Decode a PNG or JPEG file to a uint8 array (grayscale kept single-plane)."""
    with Image.open(Path(path)) as im:
        if im.format not in (None, "PNG", "JPEG"):
            raise ValueError(f"unsupported image format {im.format!r} for {path}")
        if im.mode in ("L", "I;16"):
            im = im.convert("L")
            return np.asarray(im, dtype=np.uint8)
        im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8)


def save_png(img: np.ndarray, path) -> None:
    img = check_image(img)
    Image.fromarray(img).save(Path(path), format="PNG")


def encode_jpeg(img: np.ndarray, quality: int) -> np.ndarray:
    """JPEG encode/decode round trip at the given quality factor."""
    img = check_image(img)
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="JPEG", quality=int(quality))
    buf.seek(0)
    with Image.open(buf) as im:
        out = np.asarray(im.convert("L" if img.ndim == 2 else "RGB"), dtype=np.uint8)
    return out


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 luminance; identity for images that are already single-plane."""
    img = check_image(img)
    if img.ndim == 2:
        return img
    lum = img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114
    return quantize(lum)


@lru_cache(maxsize=512)
def _axis_weights(src: int, dst: int) -> np.ndarray:
    """Resampling weight matrix (dst, src) for one axis.

    Area-average (box) when shrinking, linear interpolation when enlarging;
    dst == src degenerates to the identity either way.
    """
    if dst < 1:
        raise ValueError("target size must be >= 1")
    w = np.zeros((dst, src), dtype=np.float64)
    if dst <= src:
        scale = src / dst
        for i in range(dst):
            lo = i * scale
            hi = (i + 1) * scale
            j0 = int(np.floor(lo))
            j1 = min(int(np.ceil(hi)), src)
            for j in range(j0, j1):
                w[i, j] = min(hi, j + 1) - max(lo, j)
    else:
        scale = src / dst
        for i in range(dst):
            x = (i + 0.5) * scale - 0.5
            x = min(max(x, 0.0), src - 1.0)
            j = int(np.floor(x))
            if j >= src - 1:
                w[i, src - 1] = 1.0
            else:
                f = x - j
                w[i, j] = 1.0 - f
                w[i, j + 1] = f
    w /= w.sum(axis=1, keepdims=True)
    w.setflags(write=False)  # cached and shared
    return w


def resize_plane(plane: np.ndarray, w: int, h: int) -> np.ndarray:
    """Resample a float plane to (h, w); returns float64, no quantization."""
    plane = np.asarray(plane, dtype=np.float64)
    wy = _axis_weights(plane.shape[0], h)
    wx = _axis_weights(plane.shape[1], w)
    return wy @ plane @ wx.T


def resize(img: np.ndarray, w: int, h: int) -> np.ndarray:
    """Resize an image to exactly (w, h); box downscale, bilinear upscale."""
    img = check_image(img)
    if img.ndim == 2:
        return quantize(resize_plane(img, w, h))
    out = np.stack([resize_plane(img[..., c], w, h) for c in range(3)], axis=-1)
    return quantize(out)


def _dct_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * m + 1) * k / (2 * n))
    c *= np.sqrt(2.0 / n)
    c[0] /= np.sqrt(2.0)
    return c


def dct2(plane: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II of a square plane; (0, 0) is the DC term."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2 or plane.shape[0] != plane.shape[1]:
        raise ValueError(f"dct2 expects a square plane, got {plane.shape}")
    if plane.shape[0] < 2:
        raise ValueError("dct2 needs side >= 2")
    c = _dct_matrix(plane.shape[0])
    return c @ plane @ c.T


def idct2(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    c = _dct_matrix(coeffs.shape[0])
    return c.T @ coeffs @ c


def haar_dwt(plane: np.ndarray, levels: int) -> np.ndarray:
    """Multi-level orthonormal Haar decomposition; LL of the deepest level top-left."""
    out = np.asarray(plane, dtype=np.float64).copy()
    if out.ndim != 2:
        raise ValueError("haar_dwt expects a 2-D plane")
    h, w = out.shape
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if h % (1 << levels) or w % (1 << levels):
        raise ValueError(f"plane {h}x{w} not divisible by 2^{levels}")
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for _ in range(levels):
        sub = out[:h, :w]
        even, odd = sub[:, 0::2], sub[:, 1::2]
        sub[:] = np.concatenate([(even + odd), (even - odd)], axis=1) * inv_sqrt2
        even, odd = sub[0::2, :], sub[1::2, :]
        sub[:] = np.concatenate([(even + odd), (even - odd)], axis=0) * inv_sqrt2
        h //= 2
        w //= 2
    return out


def haar_idwt(coeffs: np.ndarray, levels: int) -> np.ndarray:
    out = np.asarray(coeffs, dtype=np.float64).copy()
    h = out.shape[0] >> (levels - 1)
    w = out.shape[1] >> (levels - 1)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for _ in range(levels):
        sub = out[:h, :w].copy()
        top, bottom = sub[: h // 2, :], sub[h // 2 :, :]
        tmp = np.empty_like(sub)
        tmp[0::2, :] = (top + bottom) * inv_sqrt2
        tmp[1::2, :] = (top - bottom) * inv_sqrt2
        left, right = tmp[:, : w // 2], tmp[:, w // 2 :]
        sub[:, 0::2] = (left + right) * inv_sqrt2
        sub[:, 1::2] = (left - right) * inv_sqrt2
        out[:h, :w] = sub
        h *= 2
        w *= 2
    return out


def gaussian_kernel1d(kernel_size: int) -> np.ndarray:
    """Normalized 1-D Gaussian; sigma tied to the kernel size (0.3*((k-1)/2-1)+0.8)."""
    if kernel_size % 2 == 0 or kernel_size < 1:
        raise ValueError(f"kernel size must be odd and positive, got {kernel_size}")
    sigma = 0.3 * ((kernel_size - 1) / 2 - 1) + 0.8
    x = np.arange(kernel_size, dtype=np.float64) - (kernel_size - 1) / 2
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _conv_rows(arr: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    win = np.lib.stride_tricks.sliding_window_view(arr, kernel.size, axis=1)
    return win @ kernel[::-1]


def _filter_plane_gaussian(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    pad = kernel.size // 2
    work = np.pad(np.asarray(plane, dtype=np.float64), pad, mode="reflect")
    work = _conv_rows(work, kernel)
    work = _conv_rows(work.T, kernel).T
    return work


def gaussian_filter(img: np.ndarray, kernel_size: int) -> np.ndarray:
    """Separable Gaussian blur with reflected borders, per channel."""
    img = check_image(img)
    kernel = gaussian_kernel1d(kernel_size)
    if img.ndim == 2:
        return quantize(_filter_plane_gaussian(img, kernel))
    out = np.stack([_filter_plane_gaussian(img[..., c], kernel) for c in range(3)], axis=-1)
    return quantize(out)


def gaussian_filter_plane(plane: np.ndarray, kernel_size: int) -> np.ndarray:
    """Float-valued Gaussian blur of one plane (no quantization), for descriptors."""
    return _filter_plane_gaussian(np.asarray(plane, dtype=np.float64), gaussian_kernel1d(kernel_size))


def median_filter(img: np.ndarray, kernel_size: int) -> np.ndarray:
    """Per-channel sliding-window median with reflected borders."""
    img = check_image(img)
    if kernel_size % 2 == 0 or kernel_size < 1:
        raise ValueError(f"kernel size must be odd and positive, got {kernel_size}")

    def one(plane: np.ndarray) -> np.ndarray:
        pad = kernel_size // 2
        work = np.pad(plane, pad, mode="reflect")
        win = np.lib.stride_tricks.sliding_window_view(work, (kernel_size, kernel_size))
        # int16 partitions measurably faster than uint8 here
        flat = win.reshape(-1, kernel_size * kernel_size).astype(np.int16)
        mid = flat.shape[1] // 2  # window count is odd, median is one sample
        out = np.partition(flat, mid, axis=1)[:, mid]
        return out.astype(np.uint8).reshape(plane.shape)

    if img.ndim == 2:
        return one(img)
    return np.stack([one(img[..., c]) for c in range(3)], axis=-1)
