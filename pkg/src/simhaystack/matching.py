"""The universal thresholded matcher over any similarity backend.

A backend encoder turns an image (or image id, for embedding lookups) into a
fingerprint payload; a Database is an immutable id -> fingerprint map with
vectorized scans; best_match returns the closest entry when its distance
clears the threshold. Encoders and the matcher follow the sklearn estimator
conventions (get_params / fit / transform / predict) so they compose with
that ecosystem.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import blockhash as bh
from . import keypoints as kp
from .embeddist import Embedding, MissingEmbeddingError, canonical_metric, load_embeddings
from .hashbits import BitHash, hamming_to_all, packed_matrix
from .imageops import check_image

__all__ = [
    "Fingerprint",
    "Database",
    "best_match",
    "make_backend",
    "BlockHashEncoder",
    "OrbEncoder",
    "RandomHashEncoder",
    "EmbeddingLookupEncoder",
    "ThresholdMatcher",
    "BackendMismatch",
]

_BLOCK_ALGORITHMS = {
    "ahash": bh.ahash,
    "phash": bh.phash,
    "dhash": bh.dhash,
    "whash": bh.whash,
    "crop_resistant": bh.crop_resistant_hash,
}


class BackendMismatch(ValueError):
    """Fingerprints or databases from different backends were combined."""


@dataclass(frozen=True)
class Fingerprint:
    """A backend-tagged payload; comparable only within one backend id."""

    backend_id: str
    payload: object


def _require_same_backend(a: str, b: str) -> None:
    if a != b:
        raise BackendMismatch(f"backend mismatch: {a!r} vs {b!r}")


def as_records(X, y=None) -> list[tuple[str, Optional[np.ndarray]]]:
    """Normalize estimator input to (image_id, image) records.

    Accepts a list of (id, image) pairs, or a list of images with ids in y
    (defaulting to the position index).
    """
    records = []
    if y is not None:
        ids = [str(v) for v in y]
        if len(ids) != len(X):
            raise ValueError(f"y has {len(ids)} ids for {len(X)} samples")
        for rid, img in zip(ids, X):
            records.append((rid, None if img is None else check_image(img)))
        return records
    for i, item in enumerate(X):
        if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str):
            rid, img = item
            records.append((rid, None if img is None else check_image(img)))
        else:
            records.append((str(i), check_image(item)))
    return records


class _Encoder(BaseEstimator, TransformerMixin):
    """Shared transformer surface: stateless fit, transform maps records to payloads."""

    def fit(self, X=None, y=None):
        return self

    def transform(self, X, y=None):
        return [self.fingerprint(img, rid) for rid, img in as_records(X, y)]

    # subclasses define backend_id, fingerprint, batch_distances


class BlockHashEncoder(_Encoder):
    """Block perceptual hashes: ahash, phash, dhash, whash, crop_resistant."""

    def __init__(self, algorithm: str = "dhash", bits: int = 64, min_segment_matches: int = 1):
        self.algorithm = algorithm
        self.bits = bits
        self.min_segment_matches = min_segment_matches

    @property
    def backend_id(self) -> str:
        return f"{self.algorithm}/{self.bits}"

    def fingerprint(self, image, image_id=None):
        if self.algorithm not in _BLOCK_ALGORITHMS:
            raise ValueError(f"unknown block hash algorithm {self.algorithm!r}")
        return _BLOCK_ALGORITHMS[self.algorithm](image, self.bits)

    def batch_distances(self, query, scan) -> np.ndarray:
        if self.algorithm == "crop_resistant":
            return _segmented_batch(query, scan, self.min_segment_matches)
        return hamming_to_all(query, scan) / query.length


class RandomHashEncoder(_Encoder):
    """Null-model backend: a seeded random hash per image id (chance baseline)."""

    def __init__(self, bits: int = 64, seed: int = 0):
        self.bits = bits
        self.seed = seed

    @property
    def backend_id(self) -> str:
        return f"random/{self.bits}"

    def fingerprint(self, image, image_id=None):
        if image_id is None:
            if image is None:
                raise ValueError("random backend needs an image or an image id")
            image_id = hashlib.blake2b(np.ascontiguousarray(image).tobytes(), digest_size=16).hexdigest()
        key = f"{self.seed}|{image_id}".encode()
        stream = np.random.default_rng(int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big"))
        return BitHash(stream.integers(0, 2, size=self.bits))

    def batch_distances(self, query, scan) -> np.ndarray:
        return hamming_to_all(query, scan) / query.length


class OrbEncoder(_Encoder):
    """FAST + rotated binary descriptors, matched on minimal cross-pair BER."""

    def __init__(self, max_features: int = kp.MAX_FEATURES_DEFAULT, fast_threshold: int = kp.FAST_THRESHOLD_DEFAULT):
        self.max_features = max_features
        self.fast_threshold = fast_threshold

    @property
    def backend_id(self) -> str:
        return f"orb/{self.max_features}"

    def fingerprint(self, image, image_id=None):
        return kp.extract_features(image, self.max_features, self.fast_threshold)

    def batch_distances(self, query, scan) -> np.ndarray:
        return _featureset_batch(query, scan)


class EmbeddingLookupEncoder(_Encoder):
    """Embeddings are produced offline; this backend looks them up by image id."""

    def __init__(self, model_id: str = "", metric: str = "jensenshannon", source=None):
        self.model_id = model_id
        self.metric = metric
        self.source = source

    @property
    def backend_id(self) -> str:
        return f"{self.model_id}/{canonical_metric(self.metric)}"

    def fit(self, X=None, y=None):
        self.embeddings_ = self._load()
        return self

    def _load(self) -> dict[str, Embedding]:
        if hasattr(self, "embeddings_"):
            return self.embeddings_
        if self.source is None:
            raise MissingEmbeddingError(
                f"backend {self.backend_id!r} has no embedding source; export an EMB1 file first"
            )
        if isinstance(self.source, dict):
            table = self.source
        else:
            table = load_embeddings(self.source)
        for emb in table.values():
            if self.model_id and emb.model_id != self.model_id:
                raise BackendMismatch(
                    f"EMB1 store holds {emb.model_id!r} vectors, backend expects {self.model_id!r}"
                )
        return table

    def fingerprint(self, image, image_id=None):
        table = self._load()
        if image_id is None or image_id not in table:
            raise MissingEmbeddingError(f"no embedding for image id {image_id!r} in {self.backend_id}")
        return table[image_id]

    def batch_distances(self, query, scan) -> np.ndarray:
        return _embedding_batch(query, scan, canonical_metric(self.metric))


def _segmented_batch(query: bh.SegmentedHash, scan, min_matches: int) -> np.ndarray:
    matrix, offsets = scan
    n_entries = len(offsets) - 1
    out = np.full(n_entries, np.inf)
    per_seg = np.stack([hamming_to_all(s, matrix) for s in query.segments])  # (q_segs, total_segs)
    nbits = query.length
    for i in range(n_entries):
        block = per_seg[:, offsets[i] : offsets[i + 1]].reshape(-1)
        if block.size >= min_matches:
            if min_matches == 1:
                out[i] = block.min() / nbits
            else:
                out[i] = np.partition(block, min_matches - 1)[min_matches - 1] / nbits
    return out


def _featureset_batch(query: kp.FeatureSet, scan) -> np.ndarray:
    matrix, offsets = scan
    n_entries = len(offsets) - 1
    out = np.full(n_entries, np.inf)
    if not query.descriptors or matrix.size == 0:
        return out
    per_desc = np.stack([hamming_to_all(d, matrix) for _, d in query.descriptors])
    nbits = query.descriptors[0][1].length
    for i in range(n_entries):
        if offsets[i + 1] > offsets[i]:
            out[i] = per_desc[:, offsets[i] : offsets[i + 1]].min() / nbits
    return out


def _embedding_batch(query: Embedding, scan, metric: str) -> np.ndarray:
    matrix, model_ids = scan
    for mid in model_ids:
        if mid != query.model_id:
            raise BackendMismatch(f"embedding model mismatch: {mid!r} vs {query.model_id!r}")
    x = query.vector
    if metric == "l1":
        return np.abs(matrix - x).sum(axis=1)
    if metric == "l2":
        return np.sqrt(((matrix - x) ** 2).sum(axis=1))
    if metric == "cosine":
        nx = np.sqrt(np.dot(x, x))
        norms = np.sqrt((matrix ** 2).sum(axis=1))
        out = np.ones(matrix.shape[0])
        both = (norms > 0) & (nx > 0)
        out[both] = np.clip(1.0 - (matrix[both] @ x) / (norms[both] * nx), 0.0, None)
        if nx == 0:
            out[norms == 0] = 0.0
        zero_diff = np.all(matrix == x, axis=1)
        out[zero_diff] = 0.0
        return out
    # jensenshannon; probability mapping mirrors embeddist._as_probabilities
    from .embeddist import JS_EPSILON

    p = np.clip(x, 0.0, None)
    ps = p.sum()
    p = p / ps if ps > 0 else np.full(p.shape, 1.0 / p.size)
    p = p + JS_EPSILON
    p = p / p.sum()
    q = np.clip(matrix, 0.0, None)
    qs = q.sum(axis=1, keepdims=True)
    q = np.where(qs > 0, q / np.where(qs > 0, qs, 1.0), 1.0 / q.shape[1])
    q = q + JS_EPSILON
    q = q / q.sum(axis=1, keepdims=True)
    m = 0.5 * (p + q)
    kl_p = (p * np.log(p / m)).sum(axis=1)
    kl_q = (q * np.log(q / m)).sum(axis=1)
    out = np.sqrt(np.clip(0.5 * kl_p + 0.5 * kl_q, 0.0, None))
    out[np.all(matrix == x, axis=1)] = 0.0
    return out


class Database:
    """Immutable id -> fingerprint store with a vectorized linear scan."""

    def __init__(self, encoder, payloads: dict[str, object], build_seconds: float = 0.0):
        self.encoder = encoder
        self.backend_id = encoder.backend_id
        self.ids = sorted(payloads)
        if len(self.ids) != len(payloads):
            raise ValueError("duplicate image ids in database")
        self.payloads = {i: payloads[i] for i in self.ids}
        self.build_seconds = build_seconds
        self._scan = self._build_scan()

    @classmethod
    def build(cls, encoder, records, ids=None) -> "Database":
        """Fingerprint (id, image) records into a database, timing the build."""
        t0 = time.perf_counter()
        payloads = {}
        for rid, img in as_records(records, ids):
            if rid in payloads:
                raise ValueError(f"duplicate image id {rid!r}")
            payloads[rid] = encoder.fingerprint(img, rid)
        return cls(encoder, payloads, build_seconds=time.perf_counter() - t0)

    def __len__(self) -> int:
        return len(self.ids)

    def _build_scan(self):
        payloads = [self.payloads[i] for i in self.ids]
        if not payloads:
            return None
        first = payloads[0]
        if isinstance(first, BitHash):
            return packed_matrix(payloads)
        if isinstance(first, bh.SegmentedHash):
            return _ragged_matrix([p.segments for p in payloads])
        if isinstance(first, kp.FeatureSet):
            return _ragged_matrix([[d for _, d in p.descriptors] for p in payloads])
        if isinstance(first, Embedding):
            return (np.stack([p.vector for p in payloads]), [p.model_id for p in payloads])
        raise TypeError(f"unsupported fingerprint payload {type(first).__name__}")

    def scan(self, query_payload) -> np.ndarray:
        """Distance from the query to every entry, aligned with sorted ids."""
        if not self.ids:
            return np.empty(0)
        return self.encoder.batch_distances(query_payload, self._scan)


def _ragged_matrix(groups):
    flat = [h for group in groups for h in group]
    offsets = np.zeros(len(groups) + 1, dtype=np.int64)
    for i, group in enumerate(groups):
        offsets[i + 1] = offsets[i] + len(group)
    if not flat:
        return np.empty((0, 0), dtype=np.uint8), offsets
    return packed_matrix(flat), offsets


def best_match(query: Fingerprint | object, db: Database, eta: float):
    """Closest database entry at distance <= eta, or None.

    Equal minimal distances resolve to the lexicographically smallest image
    id, so results are independent of insertion or scan order.
    """
    payload = query.payload if isinstance(query, Fingerprint) else query
    if isinstance(query, Fingerprint):
        _require_same_backend(query.backend_id, db.backend_id)
    if not db.ids:
        return None
    dists = db.scan(payload)
    idx = int(np.argmin(dists))  # ids sorted, argmin takes first = smallest id
    if dists[idx] <= eta:
        return db.ids[idx], float(dists[idx])
    return None


class ThresholdMatcher(BaseEstimator):
    """sklearn-style wrapper: fit a database of references, predict query matches."""

    def __init__(self, encoder=None, threshold: float = 0.25):
        self.encoder = encoder
        self.threshold = threshold

    def fit(self, X, y=None):
        encoder = self.encoder if self.encoder is not None else BlockHashEncoder()
        self.database_ = Database.build(encoder, X, y)
        return self

    def _check_fitted(self):
        if not hasattr(self, "database_"):
            raise RuntimeError("ThresholdMatcher is not fitted; call fit() first")

    def match(self, X):
        """Per query: (matched id or None, best distance or inf)."""
        self._check_fitted()
        out = []
        for rid, img in as_records(X):
            payload = self.database_.encoder.fingerprint(img, rid)
            dists = self.database_.scan(payload)
            if dists.size == 0:
                out.append((None, float("inf")))
                continue
            idx = int(np.argmin(dists))
            d = float(dists[idx])
            out.append((self.database_.ids[idx], d) if d <= self.threshold else (None, d))
        return out

    def predict(self, X):
        return np.array([m[0] for m in self.match(X)], dtype=object)


# --- serialization -----------------------------------------------------------

def serialize_payload(payload, backend_id: str | None = None) -> object:
    """JSON-able form; bit hashes carry the algorithm tag, e.g. 'dhash/64:...'."""
    tag = f"{backend_id.split('/', 1)[0]}/" if backend_id else ""
    if isinstance(payload, BitHash):
        return f"{tag}{payload.encode()}"
    if isinstance(payload, bh.SegmentedHash):
        return tag + "+".join(s.encode() for s in payload.segments)
    if isinstance(payload, kp.FeatureSet):
        return {
            "max_features": payload.max_features,
            "features": [[k.x, k.y, k.orientation, d.encode()] for k, d in payload.descriptors],
        }
    if isinstance(payload, Embedding):
        return {"model_id": payload.model_id, "vector": [float(v) for v in payload.vector]}
    raise TypeError(f"unsupported fingerprint payload {type(payload).__name__}")


def deserialize_payload(backend_id: str, raw) -> object:
    algorithm = backend_id.split("/", 1)[0]
    if isinstance(raw, str):
        body = raw
        if not raw[:1].isdigit():  # algorithm-tagged form
            tag, _, body = raw.partition("/")
            if tag != algorithm:
                raise ValueError(f"fingerprint tagged {tag!r} in a {backend_id!r} database")
        hashes = [BitHash.decode(p) for p in body.split("+")]
        if algorithm == "crop_resistant":
            return bh.SegmentedHash(tuple(hashes))
        if len(hashes) != 1:
            raise ValueError(f"backend {backend_id!r} expects a single hash, got {len(hashes)}")
        return hashes[0]
    if isinstance(raw, dict) and "features" in raw:
        # response is not serialized; restore a positive placeholder
        descs = tuple(
            (kp.Keypoint(x, y, 1.0, orientation), BitHash.decode(enc))
            for x, y, orientation, enc in raw["features"]
        )
        return kp.FeatureSet(descs, raw["max_features"])
    if isinstance(raw, dict) and "vector" in raw:
        return Embedding(raw["model_id"], np.asarray(raw["vector"], dtype=np.float64))
    raise ValueError(f"cannot deserialize fingerprint {raw!r}")


def save_database(db: Database, path) -> None:
    doc = {
        "format": "simdb/1",
        "backend": db.backend_id,
        "params": db.encoder.get_params(),
        "build_seconds": db.build_seconds,
        "entries": [
            {"id": i, "fingerprint": serialize_payload(db.payloads[i], db.backend_id)} for i in db.ids
        ],
    }
    Path(path).write_text(json.dumps(_jsonable(doc), indent=1, sort_keys=True))


def load_database(path) -> Database:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "simdb/1":
        raise ValueError(f"not a simdb/1 database file: {path}")
    params = doc.get("params", {})
    params.pop("source", None)
    encoder = make_backend(doc["backend"], **params)
    payloads = {e["id"]: deserialize_payload(doc["backend"], e["fingerprint"]) for e in doc["entries"]}
    return Database(encoder, payloads, build_seconds=doc.get("build_seconds", 0.0))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def make_backend(spec: str, **kwargs):
    """Build an encoder from a backend string like 'dhash/64', 'orb/30',
    'random/64' or '<model_id>/<metric>' (embedding lookup)."""
    name, _, arg = spec.partition("/")
    if name in _BLOCK_ALGORITHMS:
        bits = int(arg) if arg else 64
        allowed = {k: v for k, v in kwargs.items() if k in ("min_segment_matches",)}
        return BlockHashEncoder(name, bits, **allowed)
    if name == "orb":
        feats = int(arg) if arg else kp.MAX_FEATURES_DEFAULT
        allowed = {k: v for k, v in kwargs.items() if k in ("fast_threshold",)}
        return OrbEncoder(feats, **allowed)
    if name == "random":
        bits = int(arg) if arg else 64
        allowed = {k: v for k, v in kwargs.items() if k in ("seed",)}
        return RandomHashEncoder(bits, **allowed)
    if arg:
        metric = canonical_metric(arg)
        return EmbeddingLookupEncoder(name, metric, kwargs.get("source") or kwargs.get("embeddings"))
    raise ValueError(f"cannot parse backend spec {spec!r}")
