"""Distances over externally produced deep-feature vectors.

Inference happens elsewhere; this module only loads EMB1 files and compares
vectors. Four metrics: L1, L2, cosine, and the Jensen-Shannon distance
(square root of the divergence, so it is a true metric bounded by
sqrt(ln 2)). For Jensen-Shannon the vectors are read as activation
probabilities: negatives clamped to zero, epsilon-smoothed, normalized to
sum 1.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Embedding",
    "METRICS",
    "distance",
    "load_embeddings",
    "write_embeddings",
    "EmbeddingFormatError",
    "MissingEmbeddingError",
]

EMB1_MAGIC = b"EMB1"
JS_EPSILON = 1e-12
JS_MAX = float(np.sqrt(np.log(2.0)))

METRICS = ("l1", "l2", "cosine", "jensenshannon")
_METRIC_ALIASES = {"js": "jensenshannon", "jensen-shannon": "jensenshannon", "euclidean": "l2"}


class EmbeddingFormatError(ValueError):
    """Malformed EMB1 payload; the message names the failing byte offset."""


class MissingEmbeddingError(KeyError):
    """An image id has no embedding in the loaded store."""


def canonical_metric(name: str) -> str:
    key = name.strip().lower()
    key = _METRIC_ALIASES.get(key, key)
    if key not in METRICS:
        raise ValueError(f"unknown distance metric {name!r}; expected one of {METRICS}")
    return key


@dataclass(frozen=True)
class Embedding:
    """A real feature vector from a named network; comparable within one model only."""

    model_id: str
    vector: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float64)
        if vec.ndim != 1 or vec.size < 1:
            raise ValueError(f"embedding vector must be 1-D and nonempty, got shape {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise ValueError("embedding vector has non-finite components")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    @property
    def dim(self) -> int:
        return int(self.vector.size)


def _check_compatible(a: Embedding, b: Embedding) -> None:
    if a.model_id != b.model_id:
        raise ValueError(f"cannot compare embeddings from {a.model_id!r} and {b.model_id!r}")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _as_probabilities(vec: np.ndarray) -> np.ndarray:
    # normalize before smoothing: the epsilon must not see the input scale,
    # or rescaling the vectors would shift the divergence
    p = np.clip(vec, 0.0, None)
    total = p.sum()
    p = p / total if total > 0 else np.full(p.shape, 1.0 / p.size)
    p = p + JS_EPSILON
    return p / p.sum()


def distance(metric: str, a: Embedding, b: Embedding) -> float:
    """Nonnegative distance between two embeddings of one model."""
    metric = canonical_metric(metric)
    _check_compatible(a, b)
    # identity of indiscernibles holds exactly for every metric
    if a.vector is b.vector or np.array_equal(a.vector, b.vector):
        return 0.0
    x, y = a.vector, b.vector
    if metric == "l1":
        return float(np.abs(x - y).sum())
    if metric == "l2":
        return float(np.sqrt(((x - y) ** 2).sum()))
    if metric == "cosine":
        nx = float(np.sqrt(np.dot(x, x)))
        ny = float(np.sqrt(np.dot(y, y)))
        if nx == 0.0 and ny == 0.0:
            return 0.0
        if nx == 0.0 or ny == 0.0:
            return 1.0
        return float(max(0.0, 1.0 - np.dot(x, y) / (nx * ny)))
    p = _as_probabilities(x)
    q = _as_probabilities(y)
    m = 0.5 * (p + q)
    kl_pm = float(np.sum(p * np.log(p / m)))
    kl_qm = float(np.sum(q * np.log(q / m)))
    return float(np.sqrt(max(0.0, 0.5 * kl_pm + 0.5 * kl_qm)))


def write_embeddings(path, model_id: str, records: dict[str, np.ndarray]) -> None:
    """Write an EMB1 file; records are id -> float vector, all of one dim.

    Layout (little-endian): magic 'EMB1', u32 record count, u32 dim,
    u16 model id length, model id UTF-8, then per record u16 id length,
    id UTF-8, dim float32 values.
    """
    ids = sorted(records)
    dims = {np.asarray(records[i]).size for i in ids}
    if len(dims) > 1:
        raise ValueError(f"inconsistent vector dims in records: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    model_raw = model_id.encode("utf-8")
    with open(Path(path), "wb") as fh:
        fh.write(EMB1_MAGIC)
        fh.write(struct.pack("<IIH", len(ids), dim, len(model_raw)))
        fh.write(model_raw)
        for rid in ids:
            vec = np.asarray(records[rid], dtype=np.float32)
            raw = rid.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(vec.tobytes())


def load_embeddings(path) -> dict[str, Embedding]:
    """Load every record of an EMB1 file; ids unique, dim consistent, no NaNs."""
    data = Path(path).read_bytes()
    off = 0

    def need(n: int, what: str) -> bytes:
        nonlocal off
        if off + n > len(data):
            raise EmbeddingFormatError(f"truncated {what} at byte {off} in {path}")
        chunk = data[off : off + n]
        off += n
        return chunk

    if need(4, "magic") != EMB1_MAGIC:
        raise EmbeddingFormatError(f"bad magic at byte 0 in {path}")
    count, dim, model_len = struct.unpack("<IIH", need(10, "header"))
    model_id = need(model_len, "model id").decode("utf-8")
    out: dict[str, Embedding] = {}
    for _ in range(count):
        if dim < 1:
            raise EmbeddingFormatError(f"record with dim {dim} at byte {off} in {path}")
        (id_len,) = struct.unpack("<H", need(2, "id length"))
        rec_off = off
        rid = need(id_len, "record id").decode("utf-8")
        if rid in out:
            raise EmbeddingFormatError(f"duplicate id {rid!r} at byte {rec_off} in {path}")
        vec_off = off
        vec = np.frombuffer(need(4 * dim, f"vector for {rid!r}"), dtype="<f4").astype(np.float64)
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(f"non-finite component in {rid!r} at byte {vec_off} in {path}")
        out[rid] = Embedding(model_id, vec)
    if off != len(data):
        raise EmbeddingFormatError(f"{len(data) - off} trailing bytes at byte {off} in {path}")
    return out
