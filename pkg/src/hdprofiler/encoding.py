"""Sliding-window sequence encoding.

Every window of N consecutive symbols is bound into one order-aware
vector,

    window(c_1 .. c_N) = atom(c_1) XOR rot(atom(c_2), 1) XOR ...
                         XOR rot(atom(c_N), N - 1),

then all valid windows of a sequence are bundled and majority-binarized
into a single query or prototype vector. Windows containing a symbol
outside the alphabet (e.g. 'N' bases) are skipped; windows never straddle
segment boundaries of multi-record references.

The hot path gathers windows from precomputed XOR tables: symbols are
grouped (4 at a time for a 4-letter alphabet) and each group's combined
contribution is one table lookup, so a window costs ceil(N/4) gathers
instead of N. Tables are built once per encoder from the item memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import BundleAccumulator, HDVector, rotate
from .errors import (
    AmbiguousSymbolError,
    ConfigMismatchError,
    EmptyReferenceError,
    TooShortError,
    WindowError,
)
from .space import HDSpaceConfig, ItemMemory

# Largest number of symbol combinations in one precomputed gather table.
_MAX_GROUP_COMBOS = 256

_RC_TABLE = str.maketrans("ACGT", "TGCA")


@dataclass
class SequenceView:
    """One named sequence record; bases may include out-of-alphabet symbols."""

    id: str
    bases: str

    def __len__(self) -> int:
        return len(self.bases)


def reverse_complement(bases: str) -> str:
    """Watson-Crick reverse complement; non-ACGT symbols pass through."""
    return bases.translate(_RC_TABLE)[::-1]


class SequenceEncoder:
    """Reusable window encoder for one (item memory, config) pair.

    Instances are immutable after construction and safe to share across
    threads; each call owns its accumulators.
    """

    def __init__(
        self,
        item_memory: ItemMemory,
        config: HDSpaceConfig,
        include_reverse_complement: bool = False,
        window_batch: int = 256,
    ):
        if item_memory.config_fingerprint != config.fingerprint():
            raise ConfigMismatchError(
                "item memory was generated for a different configuration "
                f"({item_memory.config_fingerprint} != {config.fingerprint()})"
            )
        if include_reverse_complement and tuple(config.alphabet) != ("A", "C", "G", "T"):
            raise ValueError("reverse-complement encoding requires the A/C/G/T alphabet")
        if window_batch < 1:
            raise ValueError("window_batch must be >= 1")
        self.config = config
        self.include_reverse_complement = include_reverse_complement
        self.window_batch = int(window_batch)

        alphabet = config.alphabet
        self._lookup = np.full(256, -1, dtype=np.int64)
        for index, symbol in enumerate(alphabet):
            code = ord(symbol)
            if code > 255:
                raise ValueError(f"alphabet symbol {symbol!r} is not an 8-bit character")
            self._lookup[code] = index

        n, n_sym = config.ngram_size, len(alphabet)
        # Offset i in a window contributes rotate(atom, i).
        rotated = [
            np.stack([rotate(item_memory[s], i).words for s in alphabet])
            for i in range(n)
        ]
        group = 1
        while group < n and n_sym ** (group + 1) <= _MAX_GROUP_COMBOS:
            group += 1
        self._groups = []
        for base in range(0, n, group):
            width = min(group, n - base)
            table = rotated[base]
            for j in range(1, width):
                # combo index: symbol at offset base+j carries weight n_sym**j
                table = (rotated[base + j][:, None, :] ^ table[None, :, :]).reshape(
                    -1, table.shape[1]
                )
            weights = np.array([n_sym**j for j in range(width)], dtype=np.int64)
            self._groups.append((base, width, weights, table))

    def _symbol_indexes(self, bases: str) -> np.ndarray:
        codes = np.frombuffer(bases.encode("latin-1", errors="replace"), dtype=np.uint8)
        return self._lookup[codes]

    def _valid_starts(self, indexes: np.ndarray) -> np.ndarray:
        """Start positions of windows containing only alphabet symbols."""
        n = self.config.ngram_size
        if indexes.size < n:
            return np.empty(0, dtype=np.int64)
        bad = np.concatenate(([0], np.cumsum(indexes < 0)))
        return np.flatnonzero(bad[n:] == bad[:-n])

    def _window_rows(self, indexes: np.ndarray, starts: np.ndarray) -> np.ndarray:
        """Packed (len(starts), n_words) matrix of bound window vectors."""
        acc = None
        for base, width, weights, table in self._groups:
            combo = indexes[starts + base].copy()
            for j in range(1, width):
                combo += indexes[starts + base + j] * weights[j]
            part = table[combo]
            if acc is None:
                acc = part
            else:
                np.bitwise_xor(acc, part, out=acc)
        return acc

    def encode_ngram(self, window: str) -> HDVector:
        """Bind one window of exactly N alphabet symbols."""
        n = self.config.ngram_size
        if len(window) != n:
            raise WindowError(f"window length {len(window)} != ngram_size {n}")
        indexes = self._symbol_indexes(window)
        bad = np.flatnonzero(indexes < 0)
        if bad.size:
            pos = int(bad[0])
            raise AmbiguousSymbolError(
                f"symbol {window[pos]!r} at window position {pos} is outside the alphabet"
            )
        rows = self._window_rows(indexes, np.zeros(1, dtype=np.int64))
        return HDVector(self.config.dimension, rows[0])

    def accumulate(
        self,
        bases: str,
        acc: BundleAccumulator | None = None,
        limit: int | None = None,
    ) -> tuple[BundleAccumulator, int]:
        """Bundle every valid window of `bases` (capped at `limit`) into `acc`.

        Returns the accumulator and the number of windows bundled by this
        call. Windows are enumerated left to right; the reverse-complement
        windows follow the forward ones when the encoder was built with
        `include_reverse_complement`.
        """
        if acc is None:
            acc = BundleAccumulator(self.config.dimension)
        added = self._accumulate_forward(bases, acc, limit)
        if self.include_reverse_complement:
            remaining = None if limit is None else limit - added
            added += self._accumulate_forward(reverse_complement(bases), acc, remaining)
        return acc, added

    def _accumulate_forward(self, bases, acc, limit) -> int:
        if limit is not None and limit <= 0:
            return 0
        indexes = self._symbol_indexes(bases)
        starts = self._valid_starts(indexes)
        if limit is not None:
            starts = starts[:limit]
        for lo in range(0, starts.size, self.window_batch):
            acc.add_packed(self._window_rows(indexes, starts[lo : lo + self.window_batch]))
        return int(starts.size)

    def encode_sequence(self, seq: SequenceView | str) -> HDVector:
        """Encode one read/sequence into a single majority-binarized vector."""
        bases = seq.bases if isinstance(seq, SequenceView) else seq
        acc, added = self.accumulate(bases, limit=self.config.bundling_cap)
        if added == 0:
            raise TooShortError(
                f"no valid {self.config.ngram_size}-symbol window in sequence "
                f"of length {len(bases)}"
            )
        return acc.binarize()

    def encode_reference(self, segments: Iterable[SequenceView | str]) -> tuple[HDVector, int]:
        """Encode a whole (possibly multi-segment) genome into one prototype.

        One accumulator spans all segments but windows never straddle
        segment boundaries. Returns the prototype and the total base count.
        """
        cap = self.config.bundling_cap
        acc = BundleAccumulator(self.config.dimension)
        total_bases = 0
        for segment in segments:
            bases = segment.bases if isinstance(segment, SequenceView) else segment
            total_bases += len(bases)
            remaining = None if cap is None else cap - acc.added
            self.accumulate(bases, acc, limit=remaining)
        if acc.added == 0:
            raise EmptyReferenceError(
                f"no valid encoding window in any segment ({total_bases} bases total)"
            )
        return acc.binarize(), total_bases


def encode_ngram(window: str, item_memory: ItemMemory, config: HDSpaceConfig) -> HDVector:
    return SequenceEncoder(item_memory, config).encode_ngram(window)


def encode_sequence(
    seq: SequenceView | str,
    item_memory: ItemMemory,
    config: HDSpaceConfig,
    include_reverse_complement: bool = False,
) -> HDVector:
    encoder = SequenceEncoder(item_memory, config, include_reverse_complement)
    return encoder.encode_sequence(seq)


def encode_reference(
    segments: Iterable[SequenceView | str],
    item_memory: ItemMemory,
    config: HDSpaceConfig,
    include_reverse_complement: bool = False,
) -> tuple[HDVector, int]:
    encoder = SequenceEncoder(item_memory, config, include_reverse_complement)
    return encoder.encode_reference(segments)
