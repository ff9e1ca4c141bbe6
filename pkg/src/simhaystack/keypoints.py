"""ORB-style local features: FAST corners, rotated binary descriptors, matching.

Single-scale by design: the benchmarked attacks are photometric and in-plane
geometric, so no image pyramid is built. Keypoints within 15 px of the border
are discarded at detection time because both the orientation moments and the
descriptor need the full 31x31 patch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._brief_pattern import PATTERN
from .hashbits import BitHash, hamming_to_all, packed_matrix
from .imageops import check_image, gaussian_filter_plane, to_grayscale

__all__ = ["Keypoint", "FeatureSet", "fast_detect", "brief_describe", "extract_features", "image_match", "image_distance"]

FAST_THRESHOLD_DEFAULT = 20
MAX_FEATURES_DEFAULT = 30
DESCRIPTOR_BITS = 256
PATCH_RADIUS = 15
ORIENTATION_BINS = 30  # 12-degree granularity

# Bresenham circle of radius 3, clockwise from 12 o'clock: (dx, dy) pairs
_CIRCLE = [
    (0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3),
]
_ARC_MIN = 9

# circular mask offsets for the intensity-centroid orientation
_oy, _ox = np.mgrid[-PATCH_RADIUS : PATCH_RADIUS + 1, -PATCH_RADIUS : PATCH_RADIUS + 1]
_DISK = (_ox ** 2 + _oy ** 2) <= PATCH_RADIUS ** 2
_DISK_X = _ox[_DISK].astype(np.float64)
_DISK_Y = _oy[_DISK].astype(np.float64)

# pattern pre-rotated to each orientation bin, rounded to integer offsets
_ROTATED_PATTERNS = np.empty((ORIENTATION_BINS, len(PATTERN), 4), dtype=np.int64)
for _b in range(ORIENTATION_BINS):
    _t = 2.0 * np.pi * _b / ORIENTATION_BINS
    _c, _s = np.cos(_t), np.sin(_t)
    for _j, (_x1, _y1, _x2, _y2) in enumerate(PATTERN):
        _ROTATED_PATTERNS[_b, _j] = (
            round(_c * _x1 - _s * _y1),
            round(_s * _x1 + _c * _y1),
            round(_c * _x2 - _s * _y2),
            round(_s * _x2 + _c * _y2),
        )


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    response: float
    orientation: float  # radians from the patch intensity centroid


@dataclass(frozen=True)
class FeatureSet:
    """Descriptors for one image, capped at max_features by response."""

    descriptors: tuple[tuple[Keypoint, BitHash], ...]
    max_features: int

    def __post_init__(self):
        if len(self.descriptors) > self.max_features:
            raise ValueError("descriptor count exceeds max_features")

    def __len__(self) -> int:
        return len(self.descriptors)


def _corner_scores(gray: np.ndarray, threshold: int) -> np.ndarray:
    """Per-pixel FAST-9 score map (0 where not a corner).

    Score is the largest sum of absolute deviations over any qualifying
    9-long contiguous arc, used for non-maximum suppression. A 4-point quick
    test prunes the pixels that get the full 16-start arc evaluation.
    """
    h, w = gray.shape
    scores = np.zeros((h, w), dtype=np.float64)
    if h < 7 or w < 7:
        return scores
    g = gray.astype(np.int16)
    p = g[3 : h - 3, 3 : w - 3]
    ring = np.stack([g[3 + dy : h - 3 + dy, 3 + dx : w - 3 + dx] for dx, dy in _CIRCLE])
    dev = ring - p[None, :, :]
    # a 9-long arc always covers >= 2 of the 4 compass points
    compass = dev[[0, 4, 8, 12]]
    cand = ((compass > threshold).sum(axis=0) >= 2) | ((compass < -threshold).sum(axis=0) >= 2)
    if not cand.any():
        return scores
    dev_c = dev[:, cand].astype(np.float64)
    best = np.zeros(dev_c.shape[1])
    for sign in (1, -1):
        qual = (sign * dev_c) > threshold
        qual2 = np.concatenate([qual, qual[: _ARC_MIN - 1]], axis=0)
        mag2 = np.abs(dev_c)
        mag2 = np.concatenate([mag2, mag2[: _ARC_MIN - 1]], axis=0)
        for start in range(len(_CIRCLE)):
            window = qual2[start : start + _ARC_MIN]
            full = window.all(axis=0)
            if not full.any():
                continue
            arc_sum = (mag2[start : start + _ARC_MIN] * window).sum(axis=0) * full
            np.maximum(best, arc_sum, out=best)
    inner = np.zeros(p.shape, dtype=np.float64)
    inner[cand] = best
    scores[3 : h - 3, 3 : w - 3] = inner
    return scores


def _non_max_suppress(scores: np.ndarray) -> np.ndarray:
    """Boolean map of 3x3 local maxima; raster-order precedence breaks ties."""
    keep = scores > 0
    padded = np.pad(scores, 1, mode="constant")
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            neigh = padded[1 + dy : padded.shape[0] - 1 + dy, 1 + dx : padded.shape[1] - 1 + dx]
            if (dy, dx) < (0, 0):
                keep &= scores > neigh  # earlier raster neighbour wins exact ties
            else:
                keep &= scores >= neigh
    return keep


def _orientation(gray_f: np.ndarray, x: int, y: int) -> float:
    patch = gray_f[y - PATCH_RADIUS : y + PATCH_RADIUS + 1, x - PATCH_RADIUS : x + PATCH_RADIUS + 1]
    vals = patch[_DISK]
    m10 = float(np.dot(vals, _DISK_X))
    m01 = float(np.dot(vals, _DISK_Y))
    return float(np.arctan2(m01, m10))


def fast_detect(img: np.ndarray, threshold: int = FAST_THRESHOLD_DEFAULT) -> list[Keypoint]:
    """FAST-9 corners with non-maximum suppression and centroid orientation.

    A pixel is a corner when >= 9 contiguous circle pixels are all brighter
    than p+threshold or all darker than p-threshold. Images too small for the
    test (or with no qualifying pixel far enough from the border) return [].
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    gray = to_grayscale(check_image(img))
    scores = _corner_scores(gray, threshold)
    keep = _non_max_suppress(scores)
    # orientation/descriptor patches must fit inside the image
    keep[:PATCH_RADIUS, :] = False
    keep[-PATCH_RADIUS:, :] = False
    keep[:, :PATCH_RADIUS] = False
    keep[:, -PATCH_RADIUS:] = False
    ys, xs = np.nonzero(keep)
    gray_f = gray.astype(np.float64)
    return [
        Keypoint(float(x), float(y), float(scores[y, x]), _orientation(gray_f, x, y))
        for y, x in zip(ys.tolist(), xs.tolist())
    ]


def _describe_on_plane(plane: np.ndarray, kp: Keypoint) -> BitHash:
    h, w = plane.shape
    x, y = int(round(kp.x)), int(round(kp.y))
    if not (PATCH_RADIUS <= x < w - PATCH_RADIUS and PATCH_RADIUS <= y < h - PATCH_RADIUS):
        raise ValueError(f"keypoint patch out of bounds at ({kp.x}, {kp.y})")
    bin_idx = int(round(kp.orientation / (2.0 * np.pi / ORIENTATION_BINS))) % ORIENTATION_BINS
    pat = _ROTATED_PATTERNS[bin_idx]
    i1 = plane[y + pat[:, 1], x + pat[:, 0]]
    i2 = plane[y + pat[:, 3], x + pat[:, 2]]
    return BitHash(i1 < i2)


def brief_describe(img: np.ndarray, kp: Keypoint) -> BitHash:
    """256-bit rotated intensity-comparison descriptor on a smoothed plane."""
    gray = to_grayscale(check_image(img))
    return _describe_on_plane(gaussian_filter_plane(gray, 5), kp)


def extract_features(
    img: np.ndarray,
    max_features: int = MAX_FEATURES_DEFAULT,
    threshold: int = FAST_THRESHOLD_DEFAULT,
) -> FeatureSet:
    """Detect, cap to the top responses, and describe.

    Truncation keeps the highest responses; ties broken by (y, x) so two runs
    over one image always produce identical FeatureSets.
    """
    gray = to_grayscale(check_image(img))
    kps = fast_detect(gray, threshold)
    kps.sort(key=lambda k: (-k.response, k.y, k.x))
    kps = kps[:max_features]
    if not kps:
        return FeatureSet((), max_features)
    plane = gaussian_filter_plane(gray, 5)
    return FeatureSet(tuple((kp, _describe_on_plane(plane, kp)) for kp in kps), max_features)


def image_distance(a: FeatureSet, b: FeatureSet) -> float:
    """Minimal cross-pair descriptor BER; inf when either set is empty."""
    if not a.descriptors or not b.descriptors:
        return float("inf")
    mat = packed_matrix([d for _, d in b.descriptors])
    n = a.descriptors[0][1].length
    best = min(hamming_to_all(d, mat).min() for _, d in a.descriptors)
    return best / n


def image_match(a: FeatureSet, b: FeatureSet, threshold: float) -> bool:
    """True iff at least one cross pair of descriptors has BER <= threshold."""
    return image_distance(a, b) <= threshold
