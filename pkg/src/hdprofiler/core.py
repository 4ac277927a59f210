"""Packed binary hypervectors and the algebra everything else builds on.

A hypervector is a D-bit binary string stored little-endian in 64-bit
words: bit ``j`` lives in ``words[j // 64]`` at position ``j % 64``, and
every bit past ``D`` in the last word is zero. The four primitives are:

* binding            — element-wise XOR of two vectors,
* permutation        — circular rotation of the bit string toward higher
                       indexes (wrapping), used to encode symbol order,
* similarity         — Hamming distance via XOR + popcount,
* bundling           — per-position counters over many vectors, collapsed
                       back to one bit per position by strict majority.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, EmptyBundleError

WORD_BITS = 64


def _n_words(dimension: int) -> int:
    return -(-dimension // WORD_BITS)


def _le_bytes(words: np.ndarray) -> np.ndarray:
    """uint8 view of packed words in little-endian byte order.

    Free on little-endian hosts; byteswap-copies on big-endian ones so the
    bit-to-byte mapping is platform independent.
    """
    return np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array into zero-padded uint64 words (bit j -> word j//64)."""
    bits = np.asarray(bits)
    packed = np.packbits(bits, bitorder="little")
    buf = np.zeros(_n_words(bits.size) * 8, dtype=np.uint8)
    buf[: packed.size] = packed
    return buf.view("<u8").astype(np.uint64, copy=False)


class HDVector:
    """A fixed-dimension binary hypervector packed into uint64 words.

    The word array is adopted, not copied; treat vectors as immutable and
    create new ones through the module operations.
    """

    __slots__ = ("dimension", "words")

    def __init__(self, dimension: int, words: np.ndarray):
        dimension = int(dimension)
        if dimension < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (_n_words(dimension),):
            raise ValueError(
                f"expected {_n_words(dimension)} words for dimension {dimension}, "
                f"got shape {words.shape}"
            )
        rem = dimension % WORD_BITS
        if rem:
            words[-1] &= np.uint64((1 << rem) - 1)
        self.dimension = dimension
        self.words = words

    @classmethod
    def zeros(cls, dimension: int) -> "HDVector":
        return cls(dimension, np.zeros(_n_words(dimension), dtype=np.uint64))

    @classmethod
    def from_bits(cls, bits) -> "HDVector":
        """Build from a 0/1 sequence; element 0 becomes bit 0."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("bits must be a non-empty 1-D sequence")
        return cls(bits.size, pack_bits(bits))

    def to_bits(self) -> np.ndarray:
        """0/1 uint8 array of length `dimension` (bit 0 first)."""
        return np.unpackbits(_le_bytes(self.words), count=self.dimension, bitorder="little")

    @classmethod
    def from_bytes(cls, data: bytes, dimension: int) -> "HDVector":
        n_bytes = -(-int(dimension) // 8)
        if len(data) != n_bytes:
            raise ValueError(f"expected {n_bytes} bytes for dimension {dimension}, got {len(data)}")
        buf = np.zeros(_n_words(dimension) * 8, dtype=np.uint8)
        buf[:n_bytes] = np.frombuffer(data, dtype=np.uint8)
        return cls(dimension, buf.view("<u8").astype(np.uint64, copy=False))

    def to_bytes(self) -> bytes:
        """ceil(D/8) bytes, bit-packed little-endian; the serialization form."""
        return _le_bytes(self.words)[: -(-self.dimension // 8)].tobytes()

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def complement(self) -> "HDVector":
        return HDVector(self.dimension, ~self.words)

    def copy(self) -> "HDVector":
        return HDVector(self.dimension, self.words.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, HDVector):
            return NotImplemented
        return self.dimension == other.dimension and bool(np.array_equal(self.words, other.words))

    __hash__ = None

    def __repr__(self) -> str:
        return f"HDVector(dimension={self.dimension}, popcount={self.popcount()})"


def _check_same_dimension(a: HDVector, b: HDVector) -> None:
    if a.dimension != b.dimension:
        raise DimensionError(f"dimension mismatch: {a.dimension} vs {b.dimension}")


def xor_bind(a: HDVector, b: HDVector) -> HDVector:
    """Bind two vectors: result bit j = a[j] XOR b[j].

    Associative, commutative, self-inverse, with the zero vector as identity.
    """
    _check_same_dimension(a, b)
    return HDVector(a.dimension, a.words ^ b.words)


def rotate(a: HDVector, k: int) -> HDVector:
    """Circularly rotate the bit string k positions toward higher indexes.

    ``rotate(a, 0) == a`` and rotations compose additively modulo the
    dimension; k is reduced modulo the dimension first.
    """
    k = int(k) % a.dimension
    if k == 0:
        return a.copy()
    return HDVector(a.dimension, pack_bits(np.roll(a.to_bits(), k)))


def hamming(a: HDVector, b: HDVector) -> int:
    """Number of differing bit positions (popcount of the XOR)."""
    _check_same_dimension(a, b)
    return int(np.bitwise_count(a.words ^ b.words).sum())


class BundleAccumulator:
    """Per-position counters used to bundle many vectors into one.

    ``counts[j]`` is how many of the ``added`` vectors had bit j set, so
    ``0 <= counts[j] <= added`` always holds. Counters are full-width
    integers; they never saturate.
    """

    __slots__ = ("dimension", "counts", "added")

    def __init__(self, dimension: int):
        dimension = int(dimension)
        if dimension < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        self.dimension = dimension
        self.counts = np.zeros(dimension, dtype=np.int64)
        self.added = 0

    def add(self, vector: HDVector) -> "BundleAccumulator":
        """Add one vector: counts[j] += vector[j], added += 1."""
        if vector.dimension != self.dimension:
            raise DimensionError(f"dimension mismatch: {self.dimension} vs {vector.dimension}")
        self.counts += vector.to_bits()
        self.added += 1
        return self

    def add_packed(self, rows: np.ndarray) -> "BundleAccumulator":
        """Add a (n, n_words) uint64 matrix of packed vectors in one pass.

        Equivalent to n sequential `add` calls; exists because unpacking a
        batch at once is far cheaper than unpacking row by row.
        """
        rows = np.asarray(rows, dtype=np.uint64)
        if rows.ndim != 2 or rows.shape[1] != _n_words(self.dimension):
            raise DimensionError(
                f"expected (n, {_n_words(self.dimension)}) packed rows, got shape {rows.shape}"
            )
        if rows.shape[0] == 0:
            return self
        bits = np.unpackbits(
            _le_bytes(rows).reshape(rows.shape[0], -1),
            axis=1,
            count=self.dimension,
            bitorder="little",
        )
        self.counts += bits.sum(axis=0, dtype=np.int64)
        self.added += rows.shape[0]
        return self

    def binarize(self) -> HDVector:
        """Strict-majority vector: bit j = 1 iff counts[j] > added/2.

        Exact half counts (possible when `added` is even) resolve to 0.
        """
        if self.added == 0:
            raise EmptyBundleError("cannot binarize an empty bundle")
        return HDVector(self.dimension, pack_bits(2 * self.counts > self.added))
