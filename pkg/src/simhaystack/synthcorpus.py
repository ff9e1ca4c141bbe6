"""Deterministic procedural photo-like corpus.

Used wherever a real dataset is unavailable: seeded scenes built from
low-frequency Fourier fields, horizon compositions, soft shapes and fine
texture. Scenes share a small pool of palettes and layouts on purpose, so
inter-image fingerprint distances have the heavy left tail natural photo
collections show (distinct images are not independent random bit strings).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .imageops import quantize, resize_plane, save_png

__all__ = ["generate_image", "generate_corpus_dir"]

GENERATOR_VERSION = 2  # bump when scene synthesis changes, invalidates cached corpora

PALETTE_POOL = 48
LAYOUT_KINDS = ("field", "horizon", "shapes", "texture")
LAYOUT_WEIGHTS = (0.22, 0.28, 0.3, 0.2)


def _image_seed(seed: int, index: int) -> int:
    key = f"corpus|{seed}|{index}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def _fourier_field(rng, h, w, alpha) -> np.ndarray:
    """Random smooth field with a 1/f^alpha spectrum, normalized to [0, 1]."""
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.rfftfreq(w)[None, :]
    radius = np.sqrt(fy * fy + fx * fx)
    radius[0, 0] = 1.0
    spectrum = (rng.normal(size=radius.shape) + 1j * rng.normal(size=radius.shape)) / radius ** alpha
    spectrum[0, 0] = 0.0
    field = np.fft.irfft2(spectrum, s=(h, w))
    lo, hi = field.min(), field.max()
    return (field - lo) / (hi - lo + 1e-12)


def _palette(rng, pool_index) -> tuple[np.ndarray, np.ndarray]:
    """Two anchor colors from a reusable palette slot, contrasty like photos."""
    prng = np.random.default_rng(np.random.PCG64(90_000 + pool_index))
    base = prng.uniform(5, 120, size=3)
    accent = np.clip(base + prng.uniform(90, 160, size=3) * prng.choice([-1, 1], size=3), 0, 255)
    jitter = rng.uniform(-12, 12, size=3)
    return np.clip(base + jitter, 0, 255), np.clip(accent + jitter, 0, 255)


def _colorize(field: np.ndarray, c0: np.ndarray, c1: np.ndarray) -> np.ndarray:
    return field[..., None] * (c1 - c0)[None, None, :] + c0[None, None, :]


def _add_shapes(rng, img: np.ndarray, count: int) -> None:
    h, w = img.shape[:2]
    yy, xx = np.mgrid[0:h, 0:w]
    for _ in range(count):
        cx, cy = rng.uniform(0.1, 0.9) * w, rng.uniform(0.1, 0.9) * h
        rx, ry = rng.uniform(0.05, 0.3) * w, rng.uniform(0.05, 0.3) * h
        color = rng.uniform(0, 255, size=3)
        if rng.random() < 0.5:
            mask = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
        else:
            mask = (np.abs(xx - cx) <= rx) & (np.abs(yy - cy) <= ry)
        alpha = rng.uniform(0.6, 1.0)
        img[mask] = img[mask] * (1 - alpha) + color[None, :] * alpha


def _add_detail(rng, img: np.ndarray) -> None:
    """Small hard-edged features: windows, fences, signage. Gives photo-like
    local contrast (and corner detectors something to find)."""
    h, w = img.shape[:2]
    for _ in range(int(rng.integers(6, 18))):
        bw = int(rng.integers(2, max(3, w // 10)))
        bh = int(rng.integers(2, max(3, h // 10)))
        x0 = int(rng.integers(0, max(1, w - bw)))
        y0 = int(rng.integers(0, max(1, h - bh)))
        color = rng.uniform(0, 255, size=3)
        img[y0 : y0 + bh, x0 : x0 + bw] = color[None, None, :]
    for _ in range(int(rng.integers(1, 5))):
        thickness = int(rng.integers(1, 3))
        if rng.random() < 0.5:
            y0 = int(rng.integers(0, h - thickness))
            x0, x1 = sorted(rng.integers(0, w, size=2).tolist())
            img[y0 : y0 + thickness, x0 : x1 + 1] = rng.uniform(0, 255)
        else:
            x0 = int(rng.integers(0, w - thickness))
            y0, y1 = sorted(rng.integers(0, h, size=2).tolist())
            img[y0 : y1 + 1, x0 : x0 + thickness] = rng.uniform(0, 255)


def generate_image(image_seed: int, width: int, height: int) -> np.ndarray:
    """One deterministic RGB scene of shape (height, width, 3)."""
    rng = np.random.default_rng(np.random.PCG64(image_seed))
    layout = rng.choice(len(LAYOUT_KINDS), p=LAYOUT_WEIGHTS)
    kind = LAYOUT_KINDS[layout]
    c0, c1 = _palette(rng, int(rng.integers(0, PALETTE_POOL)))
    if kind == "field":
        field = _fourier_field(rng, height, width, rng.uniform(1.0, 1.8))
        img = _colorize(field, c0, c1)
        _add_shapes(rng, img, int(rng.integers(2, 6)))
    elif kind == "horizon":
        # bright sky over darker textured ground, the classic photo layout
        split = rng.uniform(0.35, 0.65)
        ramp = np.linspace(0.0, 1.0, height)[:, None] * np.ones((1, width))
        sky = _colorize(1.0 - ramp, c0 * 0.4, np.clip(c0 * 1.4, 0, 255))
        ground_field = _fourier_field(rng, height, width, rng.uniform(1.2, 2.0))
        ground = _colorize(ground_field * 0.6, c1 * 0.25, c1)
        mask = (np.arange(height) / height < split)[:, None, None]
        img = np.where(mask, sky, ground)
        if rng.random() < 0.6:
            _add_shapes(rng, img, int(rng.integers(1, 4)))
    elif kind == "shapes":
        field = _fourier_field(rng, height, width, 2.2)
        img = _colorize(field * 0.5 + 0.25, c0, c1)
        _add_shapes(rng, img, int(rng.integers(3, 8)))
    else:  # texture
        fine = _fourier_field(rng, height, width, rng.uniform(0.8, 1.4))
        img = _colorize(fine, c0, c1)
    _add_detail(rng, img)
    # coarse random lighting: every scene gets a unique large-scale luminance
    # structure that survives smoothing and cropping attacks
    cells = rng.uniform(0.55, 1.45, size=(3, 4))
    lighting = resize_plane(cells, width, height)
    img = img * lighting[..., None]
    if rng.random() < 0.5:
        img = img[:, ::-1]
    if rng.random() < 0.25:
        img = img[::-1, :]
    grain = rng.normal(0.0, rng.uniform(1.5, 6.0), size=img.shape)
    return quantize(img + grain)


def generate_corpus_dir(root, count: int, width: int, height: int, seed: int) -> Path:
    """Write (or reuse) a corpus directory of deterministic PNG scenes."""
    root = Path(root)
    manifest_path = root / "corpus.json"
    manifest = {"count": count, "width": width, "height": height, "seed": seed, "version": GENERATOR_VERSION}
    if manifest_path.is_file():
        existing = json.loads(manifest_path.read_text())
        if existing == manifest and len(list(root.glob("*.png"))) == count:
            return root
    root.mkdir(parents=True, exist_ok=True)
    for old in root.glob("*.png"):
        old.unlink()
    for i in range(count):
        img = generate_image(_image_seed(seed, i), width, height)
        # mix orientations like a real photo collection
        if np.random.default_rng(np.random.PCG64(_image_seed(seed, i) ^ 0xA5)).random() < 0.35:
            img = np.transpose(img, (1, 0, 2)).copy()
        save_png(img, root / f"img{i:05d}.png")
    manifest_path.write_text(json.dumps(manifest, sort_keys=True))
    return root
