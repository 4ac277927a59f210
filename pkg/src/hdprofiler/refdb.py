"""Reference database: build, serialize, load, and size the prototype store.

File format (version 1, all integers little-endian):

    magic "HDRF" | u16 version | u32 config_len | config text (embeds its
    fingerprint) | u32 n_records | per record: i64 taxon_id, u32
    segment_index, u64 genome_length, u16 name_len, name (UTF-8) | payload:
    n_records * ceil(D/8) bytes of bit-packed vectors in record order.

The payload size is exactly ``n_records * ceil(D/8)`` bytes, which is what
`footprint` reports; everything before the payload is the header. Build
metadata (timestamp, tool version) deliberately stays out of the file so
identical inputs serialize byte-identically.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .core import HDVector
from .encoding import SequenceEncoder, SequenceView
from .errors import (
    ConfigMismatchError,
    DbFormatError,
    DuplicateTaxonError,
    EmptyReferenceError,
)
from .space import HDSpaceConfig, ItemMemory, config_to_text, generate_item_memory, parse_config_text

_MAGIC = b"HDRF"
_FORMAT_VERSION = 1


@dataclass
class PrototypeRecord:
    """One classification target: a taxon (or a slice of one) and its vector."""

    taxon_id: int
    name: str
    genome_length: int
    vector: HDVector
    segment_index: int = 0


@dataclass(frozen=True)
class TaxonInfo:
    """Per-taxon aggregate over records (segments collapse onto their taxon)."""

    taxon_id: int
    name: str
    genome_length: int


class HDRefDB:
    """Ordered, immutable collection of prototype records plus their config."""

    def __init__(
        self,
        config: HDSpaceConfig,
        records: Sequence[PrototypeRecord],
        built_at: str | None = None,
        tool_version: str | None = None,
    ):
        records = list(records)
        seen = set()
        for record in records:
            if record.vector.dimension != config.dimension:
                raise ConfigMismatchError(
                    f"record {record.taxon_id} has dimension {record.vector.dimension}, "
                    f"database expects {config.dimension}"
                )
            if record.genome_length < 1:
                raise ValueError(f"record {record.taxon_id}: genome_length must be positive")
            key = (record.taxon_id, record.segment_index)
            if key in seen:
                raise DuplicateTaxonError(
                    f"duplicate (taxon_id, segment_index) = {key} in database records"
                )
            seen.add(key)
        self.config = config
        self.records = records
        self.built_at = built_at
        self.tool_version = tool_version
        self._matrix = None
        self._taxa = None
        self._record_taxon = None

    @property
    def dimension(self) -> int:
        return self.config.dimension

    def fingerprint(self) -> str:
        return self.config.fingerprint()

    def __len__(self) -> int:
        return len(self.records)

    def vectors_matrix(self) -> np.ndarray:
        """Packed (n_records, n_words) matrix; cached, treat as read-only."""
        if self._matrix is None:
            n_words = -(-self.dimension // 64)
            if self.records:
                self._matrix = np.stack([r.vector.words for r in self.records])
            else:
                self._matrix = np.empty((0, n_words), dtype=np.uint64)
        return self._matrix

    def _build_taxa(self):
        taxa: list[TaxonInfo] = []
        position: dict[int, int] = {}
        record_taxon = np.empty(len(self.records), dtype=np.int64)
        for i, record in enumerate(self.records):
            if record.taxon_id not in position:
                position[record.taxon_id] = len(taxa)
                taxa.append(TaxonInfo(record.taxon_id, record.name, 0))
            pos = position[record.taxon_id]
            taxa[pos] = TaxonInfo(
                record.taxon_id, taxa[pos].name, taxa[pos].genome_length + record.genome_length
            )
            record_taxon[i] = pos
        self._taxa = taxa
        self._record_taxon = record_taxon

    def taxa(self) -> list[TaxonInfo]:
        """Distinct taxa in first-appearance order, genome lengths summed."""
        if self._taxa is None:
            self._build_taxa()
        return self._taxa

    def record_taxon_positions(self) -> np.ndarray:
        """Map record index -> position in `taxa()`."""
        if self._record_taxon is None:
            self._build_taxa()
        return self._record_taxon


def build_refdb(
    references: Sequence[tuple[int, str, Iterable[SequenceView | str]]],
    config: HDSpaceConfig,
    item_memory: ItemMemory | None = None,
    segment_size: int | None = None,
    include_reverse_complement: bool = False,
    threads: int | None = None,
) -> HDRefDB:
    """Encode every reference into prototype records, in input order.

    `references` is a sequence of (taxon_id, name, segments) where segments
    yields the genome's sequence records. With `segment_size`, each genome
    is sliced into consecutive `segment_size`-base pieces and every piece
    becomes its own record (same taxon_id, increasing segment_index).
    """
    if not references:
        raise ValueError("at least one reference is required")
    if segment_size is not None and segment_size < config.ngram_size:
        raise ValueError(
            f"segment_size ({segment_size}) must be >= ngram_size ({config.ngram_size})"
        )
    taxon_ids = [taxon_id for taxon_id, _, _ in references]
    if len(set(taxon_ids)) != len(taxon_ids):
        dupes = sorted({t for t in taxon_ids if taxon_ids.count(t) > 1})
        raise DuplicateTaxonError(f"duplicate taxon_id(s) in reference inputs: {dupes}")

    if item_memory is None:
        item_memory = generate_item_memory(config)
    encoder = SequenceEncoder(item_memory, config, include_reverse_complement)

    def encode_one(ref) -> list[PrototypeRecord]:
        taxon_id, name, segments = ref
        try:
            if segment_size is None:
                vector, total = encoder.encode_reference(segments)
                return [PrototypeRecord(taxon_id, name, total, vector)]
            return _encode_sliced(encoder, taxon_id, name, segments, segment_size)
        except EmptyReferenceError as exc:
            raise EmptyReferenceError(f"reference {taxon_id} ({name}): {exc}") from exc

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_ref = list(pool.map(encode_one, references))
    else:
        per_ref = [encode_one(ref) for ref in references]

    records = [record for group in per_ref for record in group]
    return HDRefDB(
        config,
        records,
        built_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        tool_version=__version__,
    )


def _encode_sliced(encoder, taxon_id, name, segments, segment_size) -> list[PrototypeRecord]:
    records = []
    total_bases = 0
    segment_index = 0
    for segment in segments:
        bases = segment.bases if isinstance(segment, SequenceView) else segment
        total_bases += len(bases)
        for lo in range(0, len(bases), segment_size):
            piece = bases[lo : lo + segment_size]
            acc, added = encoder.accumulate(piece, limit=encoder.config.bundling_cap)
            if added == 0:
                continue  # slice with no valid window contributes no prototype
            records.append(
                PrototypeRecord(taxon_id, name, len(piece), acc.binarize(), segment_index)
            )
            segment_index += 1
    if not records:
        raise EmptyReferenceError(
            f"no valid encoding window in any segment ({total_bases} bases total)"
        )
    return records


def footprint(db: HDRefDB) -> int:
    """Vector payload size in bytes: n_records * ceil(D/8)."""
    return len(db.records) * (-(-db.dimension // 8))


def header_bytes(db: HDRefDB) -> int:
    """Exact size of everything before the vector payload."""
    return len(_serialize_header(db))


def serialized_size(db: HDRefDB) -> int:
    """Exact on-disk size: header + footprint."""
    return header_bytes(db) + footprint(db)


def _serialize_header(db: HDRefDB) -> bytes:
    config_blob = config_to_text(db.config).encode("utf-8")
    parts = [_MAGIC, struct.pack("<H", _FORMAT_VERSION)]
    parts.append(struct.pack("<I", len(config_blob)))
    parts.append(config_blob)
    parts.append(struct.pack("<I", len(db.records)))
    for record in db.records:
        name_blob = record.name.encode("utf-8")
        if len(name_blob) > 0xFFFF:
            raise ValueError(f"record name too long ({len(name_blob)} bytes)")
        parts.append(
            struct.pack(
                "<qIQH",
                record.taxon_id,
                record.segment_index,
                record.genome_length,
                len(name_blob),
            )
        )
        parts.append(name_blob)
    return b"".join(parts)


def save_refdb(db: HDRefDB, path) -> None:
    """Write the database; byte-identical for identical inputs."""
    with open(path, "wb") as handle:
        handle.write(_serialize_header(db))
        for record in db.records:
            handle.write(record.vector.to_bytes())


class _Reader:
    def __init__(self, data: bytes, source: str):
        self.data = data
        self.source = source
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self.data):
            raise DbFormatError(f"{self.source}: truncated file while reading {what}")
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def load_refdb(path, expected_config: HDSpaceConfig | None = None) -> HDRefDB:
    """Load and verify a database file.

    Raises DbFormatError for structural problems and ConfigMismatchError
    when `expected_config` has a different fingerprint than the file.
    """
    try:
        with open(path, "rb") as handle:
            data = handle.read()
    except OSError as exc:
        raise DbFormatError(f"cannot read database {path}: {exc}") from exc

    reader = _Reader(data, str(path))
    if reader.take(4, "magic") != _MAGIC:
        raise DbFormatError(f"{path}: bad magic bytes (not an HD reference database)")
    (version,) = reader.unpack("<H", "format version")
    if version != _FORMAT_VERSION:
        raise DbFormatError(f"{path}: unsupported format version {version}")
    (config_len,) = reader.unpack("<I", "config length")
    config_blob = reader.take(config_len, "config")
    try:
        config = parse_config_text(config_blob.decode("utf-8"), source=f"{path}[config]")
    except UnicodeDecodeError as exc:
        raise DbFormatError(f"{path}: config block is not UTF-8") from exc
    except Exception as exc:
        raise DbFormatError(f"{path}: embedded config is invalid: {exc}") from exc

    if expected_config is not None and expected_config.fingerprint() != config.fingerprint():
        raise ConfigMismatchError(
            f"{path}: database fingerprint {config.fingerprint()} does not match "
            f"expected {expected_config.fingerprint()}"
        )

    (n_records,) = reader.unpack("<I", "record count")
    metas = []
    for i in range(n_records):
        taxon_id, segment_index, genome_length, name_len = reader.unpack(
            "<qIQH", f"record {i} metadata"
        )
        name = reader.take(name_len, f"record {i} name").decode("utf-8")
        metas.append((taxon_id, segment_index, genome_length, name))

    vector_bytes = -(-config.dimension // 8)
    records = []
    for taxon_id, segment_index, genome_length, name in metas:
        blob = reader.take(vector_bytes, f"vector for taxon {taxon_id}")
        records.append(
            PrototypeRecord(
                taxon_id,
                name,
                genome_length,
                HDVector.from_bytes(blob, config.dimension),
                segment_index,
            )
        )
    if reader.offset != len(data):
        raise DbFormatError(f"{path}: {len(data) - reader.offset} trailing bytes after payload")
    try:
        return HDRefDB(config, records)
    except (DuplicateTaxonError, ValueError) as exc:
        raise DbFormatError(f"{path}: inconsistent records: {exc}") from exc
