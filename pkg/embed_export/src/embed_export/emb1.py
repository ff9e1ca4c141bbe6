"""EMB1 writer (the wire format consumed by the matching toolkit).

Layout, little-endian: magic ``EMB1`` | u32 record count | u32 dim |
u16 model-id length | model id UTF-8 | per record: u16 id length | id UTF-8 |
dim float32. Records are written sorted by id so files are byte-reproducible.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"


def write_emb1(path, model_id: str, records: dict[str, np.ndarray]) -> None:
    ids = sorted(records)
    dims = {int(np.asarray(records[i]).size) for i in ids}
    if len(dims) > 1:
        raise ValueError(f"records have inconsistent dims: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    model_raw = model_id.encode("utf-8")
    with open(Path(path), "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIH", len(ids), dim, len(model_raw)))
        fh.write(model_raw)
        for rid in ids:
            vec = np.ascontiguousarray(np.asarray(records[rid], dtype=np.float32).reshape(-1))
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"non-finite values in record {rid!r}")
            raw = rid.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(vec.tobytes())


def read_emb1(path) -> tuple[str, dict[str, np.ndarray]]:
    """Minimal reader used by this package's own tests."""
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"bad magic in {path}")
    count, dim, midlen = struct.unpack_from("<IIH", data, 4)
    off = 14
    model_id = data[off : off + midlen].decode("utf-8")
    off += midlen
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        (idlen,) = struct.unpack_from("<H", data, off)
        off += 2
        rid = data[off : off + idlen].decode("utf-8")
        off += idlen
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=off).copy()
        off += 4 * dim
        out[rid] = vec
    if off != len(data):
        raise ValueError(f"trailing bytes in {path}")
    return model_id, out
