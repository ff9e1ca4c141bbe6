"""Deterministic synthesis of the 58-attack perturbation suite.

Fifteen families, each swept over a fixed parameter set (18 noise-like + 24
geometric + 16 enhancement = 58 specs). Stochastic families draw from a
generator seeded per (base seed, family, parameter, image id), so suites are
reproducible regardless of generation order or parallelism.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ._font import ALPHABET, GLYPH_HEIGHT, GLYPH_WIDTH, GLYPHS
from .imageops import check_image, encode_jpeg, gaussian_filter, median_filter, quantize, resize, to_grayscale

__all__ = ["PerturbationSpec", "SUITE", "FAMILIES", "STOCHASTIC_FAMILIES", "apply", "generate_suite", "derive_seed"]

# Table rows: family -> (group, parameter sweep). Parameters are kept as
# (value, label) so filenames and manifests have one canonical spelling.
_FAMILY_TABLE = {
    "gaussian_noise": ("noise", [(0.01, "0.01"), (0.02, "0.02"), (0.05, "0.05")]),
    "speckle_noise": ("noise", [(0.01, "0.01"), (0.02, "0.02"), (0.05, "0.05")]),
    "salt_pepper": ("noise", [(0.05, "0.05"), (0.1, "0.1"), (0.15, "0.15")]),
    "gaussian_filter": ("noise", [(3, "3"), (5, "5"), (7, "7")]),
    "median_filter": ("noise", [(3, "3"), (5, "5"), (7, "7")]),
    "jpeg": ("noise", [(10, "10"), (50, "50"), (90, "90")]),
    "crop_rescale": ("geometric", [(5, "5"), (10, "10"), (20, "20"), (40, "40"), (60, "60")]),
    "rotate_rescale": ("geometric", [(5, "5"), (10, "10"), (20, "20"), (40, "40"), (60, "60")]),
    "shear": ("geometric", [(1, "1"), (2, "2"), (5, "5"), (10, "10"), (20, "20")]),
    "scale": ("geometric", [(0.4, "0.4"), (0.8, "0.8"), (1.2, "1.2"), (1.6, "1.6")]),
    "text": ("geometric", [(10, "10"), (20, "20"), (30, "30"), (40, "40"), (50, "50")]),
    "color": ("enhancement", [(0.5, "0.5"), (2 / 3, "0.667"), (1.5, "1.5"), (2.0, "2")]),
    "sharpness": ("enhancement", [(0.5, "0.5"), (2 / 3, "0.667"), (1.5, "1.5"), (2.0, "2")]),
    "contrast": ("enhancement", [(0.5, "0.5"), (2 / 3, "0.667"), (1.5, "1.5"), (2.0, "2")]),
    "brightness": ("enhancement", [(0.5, "0.5"), (2 / 3, "0.667"), (1.5, "1.5"), (2.0, "2")]),
}

FAMILIES = tuple(_FAMILY_TABLE)
STOCHASTIC_FAMILIES = frozenset({"gaussian_noise", "speckle_noise", "salt_pepper", "text"})

TEXT_HEIGHT_FRACTION = 0.06
TEXT_BAND_FRACTION = 0.15


@dataclass(frozen=True)
class PerturbationSpec:
    """One named attack with its parameter; seeded when stochastic."""

    family: str
    parameter: float
    seed: int | None = None
    permissive: bool = False

    def __post_init__(self):
        if self.family == "none":
            return
        if self.family not in _FAMILY_TABLE:
            raise ValueError(f"unknown perturbation family {self.family!r}")
        allowed = [v for v, _ in _FAMILY_TABLE[self.family][1]]
        if not self.permissive and not any(self.parameter == v for v in allowed):
            raise ValueError(
                f"{self.family} parameter {self.parameter} not in the suite set {allowed}; "
                "pass permissive=True to explore off-suite values"
            )
        if self.family in STOCHASTIC_FAMILIES and self.seed is None:
            raise ValueError(f"{self.family} is stochastic and needs a seed")

    @property
    def label(self) -> str:
        if self.family == "none":
            return "none"
        for v, lab in _FAMILY_TABLE[self.family][1]:
            if v == self.parameter:
                return f"{self.family}_{lab}"
        return f"{self.family}_{self.parameter:g}"

    @property
    def group(self) -> str:
        return "identity" if self.family == "none" else _FAMILY_TABLE[self.family][0]


SUITE: tuple[tuple[str, float, str], ...] = tuple(
    (family, value, label)
    for family, (_, params) in _FAMILY_TABLE.items()
    for value, label in params
)
assert len(SUITE) == 58


def derive_seed(base_seed: int, family: str, parameter: float, image_id: str) -> int:
    """Stable u64 stream seed for one (attack, image) combination."""
    key = f"{base_seed}|{family}|{parameter!r}|{image_id}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def _rng(spec: PerturbationSpec) -> np.random.Generator:
    return np.random.default_rng(np.random.PCG64(spec.seed))


def _gaussian_noise(img, spec):
    rng = _rng(spec)
    noisy = img / 255.0 + rng.normal(0.0, np.sqrt(spec.parameter), size=img.shape)
    return quantize(noisy * 255.0)


def _speckle_noise(img, spec):
    rng = _rng(spec)
    scaled = img / 255.0
    noisy = scaled * (1.0 + rng.normal(0.0, np.sqrt(spec.parameter), size=img.shape))
    return quantize(noisy * 255.0)


def _salt_pepper(img, spec):
    rng = _rng(spec)
    h, w = img.shape[:2]
    hit = rng.random((h, w)) < spec.parameter
    salt = rng.random((h, w)) < 0.5
    out = img.copy()
    out[hit & salt] = 255
    out[hit & ~salt] = 0
    return out


def _bilinear_sample(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample img at float coords; coordinates outside the frame give black."""
    h, w = img.shape[:2]
    inside = (xs >= 0) & (xs <= w - 1) & (ys >= 0) & (ys <= h - 1)
    x0 = np.clip(np.floor(xs), 0, w - 1).astype(np.int64)
    y0 = np.clip(np.floor(ys), 0, h - 1).astype(np.int64)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(xs, 0, w - 1) - x0
    fy = np.clip(ys, 0, h - 1) - y0
    if img.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
        inside = inside[..., None]
    img_f = img.astype(np.float64)
    top = img_f[y0, x0] * (1 - fx) + img_f[y0, x1] * fx
    bottom = img_f[y1, x0] * (1 - fx) + img_f[y1, x1] * fx
    return np.where(inside, top * (1 - fy) + bottom * fy, 0.0)


def _largest_inscribed(w: int, h: int, angle_rad: float) -> tuple[int, int]:
    """Largest axis-aligned rectangle inside a w x h frame rotated by the angle."""
    s, c = abs(np.sin(angle_rad)), abs(np.cos(angle_rad))
    if s < 1e-12 or c < 1e-12:
        return w, h
    long_side, short_side = (w, h) if w >= h else (h, w)
    if short_side <= 2.0 * s * c * long_side:
        x = 0.5 * short_side
        wr, hr = (x / s, x / c) if w >= h else (x / c, x / s)
    else:
        cos2 = c * c - s * s
        wr = (w * c - h * s) / cos2
        hr = (h * c - w * s) / cos2
    return max(1, int(np.floor(wr))), max(1, int(np.floor(hr)))


def _rotate_rescale(img, spec):
    h, w = img.shape[:2]
    theta = np.deg2rad(spec.parameter)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    # inverse map: rotate output coords by -theta around the centre
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    dx, dy = xx - cx, yy - cy
    src_x = cos_t * dx + sin_t * dy + cx
    src_y = -sin_t * dx + cos_t * dy + cy
    rotated = quantize(_bilinear_sample(img, src_x, src_y))
    wr, hr = _largest_inscribed(w, h, theta)
    x0 = (w - wr) // 2
    y0 = (h - hr) // 2
    return resize(rotated[y0 : y0 + hr, x0 : x0 + wr], w, h)


def _shear(img, spec):
    h, w = img.shape[:2]
    t = np.tan(np.deg2rad(spec.parameter))
    cy = (h - 1) / 2.0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    src_x = xx - t * (yy - cy)
    return quantize(_bilinear_sample(img, src_x, yy))


def _crop_rescale(img, spec):
    h, w = img.shape[:2]
    mx = int(round(w * spec.parameter / 200.0))
    my = int(round(h * spec.parameter / 200.0))
    inner = img[my : h - my, mx : w - mx]
    return resize(inner, w, h)


def _scale(img, spec):
    h, w = img.shape[:2]
    return resize(img, max(1, round(w * spec.parameter)), max(1, round(h * spec.parameter)))


def _render_text_mask(text: str, glyph_scale: int) -> np.ndarray:
    rows = GLYPH_HEIGHT * glyph_scale
    cols = (GLYPH_WIDTH + 1) * len(text) * glyph_scale
    mask = np.zeros((rows, cols), dtype=bool)
    for i, ch in enumerate(text):
        glyph = GLYPHS[ch]
        x_base = i * (GLYPH_WIDTH + 1) * glyph_scale
        for gy in range(GLYPH_HEIGHT):
            for gx in range(GLYPH_WIDTH):
                if glyph[gy][gx] == "#":
                    y0, x0 = gy * glyph_scale, x_base + gx * glyph_scale
                    mask[y0 : y0 + glyph_scale, x0 : x0 + glyph_scale] = True
    return mask


def _dilate8(mask: np.ndarray) -> np.ndarray:
    padded = np.pad(mask, 1)
    out = np.zeros_like(mask)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            out |= padded[1 + dy : 1 + dy + mask.shape[0], 1 + dx : 1 + dx + mask.shape[1]]
    return out


def _text(img, spec):
    rng = _rng(spec)
    length = int(spec.parameter)
    text = "".join(ALPHABET[i] for i in rng.integers(0, len(ALPHABET), size=length))
    h, w = img.shape[:2]
    glyph_scale = max(1, round(TEXT_HEIGHT_FRACTION * h / GLYPH_HEIGHT))
    glyphs = _render_text_mask(text, glyph_scale)
    outline = _dilate8(glyphs) & ~glyphs
    band_top = h - int(round(TEXT_BAND_FRACTION * h))
    y0 = band_top + max(0, (h - band_top - glyphs.shape[0]) // 2)
    x0 = max(0, (w - glyphs.shape[1]) // 2)
    out = img.copy()
    th = min(glyphs.shape[0], h - y0)
    tw = min(glyphs.shape[1], w - x0)
    region = out[y0 : y0 + th, x0 : x0 + tw]
    g = glyphs[:th, :tw]
    o = outline[:th, :tw]
    region[o] = 0
    region[g] = 255
    return out


def _gray3(img: np.ndarray) -> np.ndarray:
    gray = to_grayscale(img).astype(np.float64)
    if img.ndim == 3:
        return np.repeat(gray[..., None], 3, axis=2)
    return gray


def _enhance(img, spec):
    f = spec.parameter
    x = img.astype(np.float64)
    if spec.family == "color":
        degenerate = _gray3(img)
    elif spec.family == "sharpness":
        degenerate = gaussian_filter(img, 5).astype(np.float64)
    elif spec.family == "contrast":
        degenerate = np.full_like(x, to_grayscale(img).mean())
    else:  # brightness
        degenerate = np.zeros_like(x)
    return quantize(degenerate + f * (x - degenerate))


_APPLIERS = {
    "gaussian_noise": _gaussian_noise,
    "speckle_noise": _speckle_noise,
    "salt_pepper": _salt_pepper,
    "gaussian_filter": lambda img, spec: gaussian_filter(img, int(spec.parameter)),
    "median_filter": lambda img, spec: median_filter(img, int(spec.parameter)),
    "jpeg": lambda img, spec: encode_jpeg(img, int(spec.parameter)),
    "crop_rescale": _crop_rescale,
    "rotate_rescale": _rotate_rescale,
    "shear": _shear,
    "scale": _scale,
    "text": _text,
    "color": _enhance,
    "sharpness": _enhance,
    "contrast": _enhance,
    "brightness": _enhance,
    "none": lambda img, spec: img.copy(),
}


def apply(spec: PerturbationSpec, img: np.ndarray) -> np.ndarray:
    """Apply one perturbation; output clamped to uint8, dimensions preserved
    by every family except scale."""
    img = check_image(img)
    return _APPLIERS[spec.family](img, spec)


def suite_specs(image_id: str, base_seed: int) -> list[PerturbationSpec]:
    """The 58 specs for one image, with per-spec derived seeds."""
    specs = []
    for family, value, _ in SUITE:
        seed = derive_seed(base_seed, family, value, image_id) if family in STOCHASTIC_FAMILIES else None
        specs.append(PerturbationSpec(family, value, seed))
    return specs


def generate_suite(image_id: str, img: np.ndarray, base_seed: int) -> list[tuple[PerturbationSpec, np.ndarray]]:
    """All 58 perturbed variants of one image, deterministic for (id, seed)."""
    img = check_image(img)
    return [(spec, apply(spec, img)) for spec in suite_specs(image_id, base_seed)]
