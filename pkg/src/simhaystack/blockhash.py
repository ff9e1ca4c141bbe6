"""The five block perceptual hashing algorithms.

Every algorithm maps an image to a fixed-length BitHash (crop-resistant to a
collection of them) by thresholding coarse-grid statistics against a central
value. Bit decisions are uniformly strict ">" / "<" so constant images give
the all-zero hash.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hashbits import BitHash, ber
from .imageops import check_image, dct2, gaussian_filter, haar_dwt, resize, to_grayscale

__all__ = [
    "ahash",
    "dhash",
    "phash",
    "whash",
    "crop_resistant_hash",
    "SegmentedHash",
    "segmented_match",
    "segmented_distance",
]

# phash samples a (PHASH_SCALE*s)^2 plane for an s^2-bit hash
PHASH_SCALE = 4
# whash starts from the smallest power-of-two square >= WHASH_SCALE_FACTOR*s
WHASH_SCALE_FACTOR = 8

# crop-resistant segmentation constants
SEGMENT_BLUR_KERNEL = 7
SEGMENT_THRESHOLD = 128  # static; a dynamic threshold breaks cross-image matching
SEGMENT_WORK_SIZE = 256  # max side of the working copy used for region growing
SEGMENT_MAX_COUNT = 8
SEGMENT_MIN_AREA_FRACTION = 0.04


def _square_side(bits: int, what: str) -> int:
    side = int(round(bits ** 0.5))
    if side * side != bits or bits < 1:
        raise ValueError(f"{what} needs a perfect-square bit count, got {bits}")
    return side


@dataclass(frozen=True)
class SegmentedHash:
    """One BitHash per detected image segment; all segments share one length."""

    segments: tuple[BitHash, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("SegmentedHash needs at least one segment")
        n = self.segments[0].length
        if any(s.length != n for s in self.segments):
            raise ValueError("all segment hashes must share one length")

    @property
    def length(self) -> int:
        return self.segments[0].length


def ahash(img: np.ndarray, bits: int = 64) -> BitHash:
    """Block mean value hash: bit set where the grid cell exceeds the grid mean."""
    side = _square_side(bits, "ahash")
    grid = resize(to_grayscale(img), side, side)
    return BitHash((grid > grid.mean()).reshape(-1))


def dhash(img: np.ndarray, bits: int = 64) -> BitHash:
    """Difference hash: bit set where a cell is darker than its right neighbour."""
    side = _square_side(bits, "dhash")
    grid = resize(to_grayscale(img), side + 1, side)
    return BitHash((grid[:, :-1] < grid[:, 1:]).reshape(-1))


def phash(img: np.ndarray, bits: int = 64) -> BitHash:
    """Low-frequency DCT hash: coefficients thresholded against their median.

    The median is taken over the low-frequency block excluding the DC term;
    the DC position still contributes a bit, compared against that median.
    """
    side = _square_side(bits, "phash")
    plane = resize(to_grayscale(img), PHASH_SCALE * side, PHASH_SCALE * side).astype(np.float64)
    coeffs = dct2(plane)[:side, :side]
    flat = coeffs.reshape(-1).copy()
    # cancellation residue from exactly-flat regions must not flip bits:
    # snap coefficients that are zero up to the block's floating-point scale
    flat[np.abs(flat) <= 1e-9 * np.abs(flat).max(initial=0.0)] = 0.0
    median = np.median(flat[1:])
    return BitHash(flat > median)


def whash(img: np.ndarray, bits: int = 64) -> BitHash:
    """Wavelet hash: the Haar LL band thresholded against its median."""
    side = _square_side(bits, "whash")
    if side & (side - 1):
        raise ValueError(f"whash needs a power-of-two grid side, got {side}x{side}")
    scale = 1
    while scale < WHASH_SCALE_FACTOR * side:
        scale *= 2
    plane = resize(to_grayscale(img), scale, scale).astype(np.float64)
    levels = int(np.log2(scale // side))
    ll = haar_dwt(plane, levels)[:side, :side]
    return BitHash((ll > np.median(ll)).reshape(-1))


def _runs(row: np.ndarray) -> list[tuple[int, int]]:
    edges = np.flatnonzero(np.diff(np.concatenate(([0], row.astype(np.int8), [0]))))
    return list(zip(edges[0::2], edges[1::2]))


def _connected_components(mask: np.ndarray) -> list[tuple[int, int, int, int, int]]:
    """4-connected components of a boolean mask.

    Returns (size, min_y, min_x, max_y, max_x) per component, exclusive maxima.
    Run-length union-find keeps this linear in the number of runs.
    """
    parent: list[int] = []

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(a: int, b: int) -> int:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
        return min(ra, rb)

    stats: list[list[int]] = []  # size, min_y, min_x, max_y, max_x per label
    prev: list[tuple[int, int, int]] = []
    for y in range(mask.shape[0]):
        cur: list[tuple[int, int, int]] = []
        for s, e in _runs(mask[y]):
            label = -1
            for ps, pe, pl in prev:
                if ps < e and pe > s:
                    label = pl if label < 0 else union(label, pl)
            if label < 0:
                label = len(parent)
                parent.append(label)
                stats.append([0, y, s, y + 1, e])
            st = stats[label]
            st[0] += e - s
            st[1] = min(st[1], y)
            st[2] = min(st[2], s)
            st[3] = max(st[3], y + 1)
            st[4] = max(st[4], e)
            cur.append((s, e, label))
        prev = cur
    merged: dict[int, list[int]] = {}
    for label, st in enumerate(stats):
        root = find(label)
        if root not in merged:
            merged[root] = list(st)
        else:
            m = merged[root]
            m[0] += st[0]
            m[1] = min(m[1], st[1])
            m[2] = min(m[2], st[2])
            m[3] = max(m[3], st[3])
            m[4] = max(m[4], st[4])
    return [tuple(v) for v in merged.values()]


def _segment_boxes(gray: np.ndarray) -> list[tuple[int, int, int, int]]:
    """Bounding boxes (y0, x0, y1, x1) of the retained segments, full-res coords."""
    h, w = gray.shape
    scale = max(h, w) / SEGMENT_WORK_SIZE
    if scale > 1.0:
        work = resize(gray, max(1, round(w / scale)), max(1, round(h / scale)))
    else:
        work = gray
    blurred = gaussian_filter(work, SEGMENT_BLUR_KERNEL)
    min_size = SEGMENT_MIN_AREA_FRACTION * blurred.size
    comps = []
    for mask in (blurred > SEGMENT_THRESHOLD, blurred <= SEGMENT_THRESHOLD):
        comps.extend(c for c in _connected_components(mask) if c[0] >= min_size)
    # largest first; bbox position breaks ties deterministically
    comps.sort(key=lambda c: (-c[0], c[1], c[2]))
    comps = comps[:SEGMENT_MAX_COUNT]
    if not comps:
        return [(0, 0, h, w)]
    sy = h / blurred.shape[0]
    sx = w / blurred.shape[1]
    boxes = []
    for _, y0, x0, y1, x1 in comps:
        boxes.append(
            (
                int(np.floor(y0 * sy)),
                int(np.floor(x0 * sx)),
                min(h, int(np.ceil(y1 * sy))),
                min(w, int(np.ceil(x1 * sx))),
            )
        )
    return boxes


def crop_resistant_hash(img: np.ndarray, bits: int = 64) -> SegmentedHash:
    """Segment the image into bright/dark regions and dhash each bounding box.

    Falls back to the whole image when no segment clears the area floor, so
    the result always carries at least one hash.
    """
    img = check_image(img)
    gray = to_grayscale(img)
    hashes = [dhash(img[y0:y1, x0:x1], bits) for y0, x0, y1, x1 in _segment_boxes(gray)]
    return SegmentedHash(tuple(hashes))


def segmented_distance(a: SegmentedHash, b: SegmentedHash, min_matches: int = 1) -> float:
    """Scalar distance consistent with segmented_match: the min_matches-th
    smallest cross-pair BER, so distance <= t iff segmented_match(a, b, t)."""
    dists = sorted(ber(sa, sb) for sa in a.segments for sb in b.segments)
    if min_matches < 1:
        raise ValueError("min_matches must be >= 1")
    if len(dists) < min_matches:
        return float("inf")
    return dists[min_matches - 1]


def segmented_match(a: SegmentedHash, b: SegmentedHash, threshold: float, min_matches: int = 1) -> bool:
    """True iff at least min_matches cross pairs of segment hashes have BER <= threshold."""
    return segmented_distance(a, b, min_matches) <= threshold
