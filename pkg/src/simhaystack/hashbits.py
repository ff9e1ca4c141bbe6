"""Fixed-length bit-string fingerprints and their distances.

BitHash is the shared currency of every hash-based method in this package:
block hashes produce one, segmented hashes hold several, and binary keypoint
descriptors are 256-bit ones. Bits are stored packed (numpy uint8, bit 0 of
the hash = most significant bit of byte 0) with the length kept separately;
trailing pad bits are always zero so XOR+popcount never sees them.
"""

from __future__ import annotations

import numpy as np

__all__ = ["BitHash", "hamming", "ber", "HashLengthMismatch"]

# popcount of every byte value, used for vectorized Hamming over packed arrays
_POPCOUNT8 = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(axis=1).astype(np.uint16)


class HashLengthMismatch(ValueError):
    """Raised when two hashes of different bit lengths are compared."""


class BitHash:
    """An immutable fixed-length binary fingerprint.

    Bit 0 is the top-left cell of the generating grid and maps to the most
    significant bit of the first packed byte, so equal images yield
    byte-identical hashes and the hex encoding is order-stable.
    """

    __slots__ = ("_packed", "_length", "_int")

    def __init__(self, bits, length: int | None = None):
        """Build from an iterable of 0/1 values, or from packed bytes + length."""
        if isinstance(bits, (bytes, bytearray, np.ndarray)) and length is not None:
            packed = np.frombuffer(bytes(bits), dtype=np.uint8).copy()
            if packed.size != (length + 7) // 8:
                raise ValueError(f"need {(length + 7) // 8} bytes for {length} bits, got {packed.size}")
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
            arr = (arr.reshape(-1) != 0).astype(np.uint8)
            if length is None:
                length = int(arr.size)
            if arr.size != length:
                raise ValueError(f"got {arr.size} bits for declared length {length}")
            packed = np.packbits(arr)
        if length < 1:
            raise ValueError("hash length must be >= 1")
        # enforce zero pad bits so popcount comparisons are unambiguous
        pad = packed.size * 8 - length
        if pad:
            mask = np.uint8(0xFF << pad & 0xFF)
            packed[-1] &= mask
        packed.setflags(write=False)
        self._packed = packed
        self._length = int(length)
        self._int = int.from_bytes(packed.tobytes(), "big")

    @property
    def length(self) -> int:
        return self._length

    @property
    def packed(self) -> np.ndarray:
        """Packed bytes, most-significant-bit-first, pad bits zero."""
        return self._packed

    def bits(self) -> np.ndarray:
        """The unpacked 0/1 array, length exactly ``length``."""
        return np.unpackbits(self._packed)[: self._length]

    def encode(self) -> str:
        """Canonical text form: decimal length, colon, lowercase hex (MSB first)."""
        return f"{self._length}:{self._packed.tobytes().hex()}"

    @classmethod
    def decode(cls, text: str) -> "BitHash":
        head, sep, hexpart = text.partition(":")
        if not sep:
            raise ValueError(f"missing ':' in bit-hash encoding: {text!r}")
        try:
            length = int(head)
            raw = bytes.fromhex(hexpart)
        except ValueError as exc:
            raise ValueError(f"bad bit-hash encoding {text!r}: {exc}") from None
        if length < 1 or len(raw) != (length + 7) // 8:
            raise ValueError(f"hex payload of {len(raw)} bytes does not fit length {length}")
        out = cls(raw, length)
        if out._packed.tobytes() != raw:
            raise ValueError(f"nonzero pad bits in {text!r}")
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitHash)
            and self._length == other._length
            and self._int == other._int
        )

    def __hash__(self) -> int:
        return hash((self._length, self._int))

    def __len__(self) -> int:
        return self._length

    def __repr__(self) -> str:
        return f"BitHash({self.encode()!r})"

    def __sub__(self, other: "BitHash") -> int:
        return hamming(self, other)


def hamming(a: BitHash, b: BitHash) -> int:
    """Number of differing bit positions between two equal-length hashes."""
    if not isinstance(a, BitHash) or not isinstance(b, BitHash):
        raise TypeError("hamming() expects BitHash operands")
    if a.length != b.length:
        raise HashLengthMismatch(f"length mismatch: {a.length} vs {b.length}")
    return (a._int ^ b._int).bit_count()


def ber(a: BitHash, b: BitHash) -> float:
    """Bit error rate: Hamming distance divided by the hash length, in [0, 1]."""
    return hamming(a, b) / a.length


def packed_matrix(hashes) -> np.ndarray:
    """Stack the packed bytes of equal-length hashes into an (n, bytes) matrix."""
    hashes = list(hashes)
    if not hashes:
        return np.empty((0, 0), dtype=np.uint8)
    n = hashes[0].length
    for h in hashes:
        if h.length != n:
            raise HashLengthMismatch(f"length mismatch: {h.length} vs {n}")
    return np.stack([h.packed for h in hashes])


def hamming_to_all(query: BitHash, matrix: np.ndarray) -> np.ndarray:
    """Vectorized Hamming distance from one hash to every row of a packed matrix."""
    if matrix.size == 0:
        return np.zeros(matrix.shape[0], dtype=np.int64)
    xor = np.bitwise_xor(matrix, query.packed[None, :])
    return _POPCOUNT8[xor].sum(axis=1).astype(np.int64)
