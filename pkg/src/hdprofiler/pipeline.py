"""Streaming orchestration: build databases and profile read streams.

Reads flow through a single reader into fixed-size batches, a bounded
pool of workers encodes and classifies each batch, and results are merged
back in submission order. Aggregation therefore never depends on thread
timing: the same inputs produce byte-identical outputs for any thread
count.
"""

from __future__ import annotations

import struct
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .abundance import AbundanceProfile, estimate
from .classify import UNMAPPED, _category, score_records
from .core import HDVector
from .encoding import SequenceEncoder, SequenceView
from .errors import ParseError, TooShortError
from .ingest import open_stream
from .refdb import HDRefDB, build_refdb
from .space import HDSpaceConfig, generate_item_memory

_READ_BATCH = 256


@dataclass(frozen=True)
class ReadOutcome:
    """Compact per-read result kept for abundance and reporting.

    `matched` holds record indices; `taxa` the collapsed taxon ids;
    `category` is judged after collapsing, so two segments of one genome
    still count as a unique match.
    """

    read_id: str
    length: int
    matched: tuple[int, ...]
    taxa: tuple[int, ...]
    category: str
    best_taxon: int | None
    best_score: float | None


@dataclass
class ProfileResult:
    profile: AbundanceProfile
    outcomes: list[ReadOutcome]
    wall_seconds: float
    timings: dict[str, float]


def _ordered_parallel(fn: Callable, items: Iterable, threads: int) -> Iterator:
    """Map `fn` over `items` with bounded in-flight work, yielding in order."""
    if threads <= 1:
        for item in items:
            yield fn(item)
        return
    prefetch = 2 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= prefetch:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def _batched(records: Iterable[SequenceView], size: int) -> Iterator[list[SequenceView]]:
    batch: list[SequenceView] = []
    for record in records:
        batch.append(record)
        if len(batch) >= size:
            yield batch
            batch = []
    if batch:
        yield batch


def profile_reads(
    db: HDRefDB,
    records: Iterable[SequenceView],
    threshold: float | None = None,
    threads: int = 1,
    include_reverse_complement: bool = False,
    per_read: Callable[[ReadOutcome], None] | None = None,
    query_sink: Callable[[str, int, HDVector], None] | None = None,
) -> ProfileResult:
    """Encode, classify, and profile a stream of reads against `db`.

    Reads are never buffered as a whole; only compact per-read outcomes
    are retained for the two abundance passes. Reads with no valid window
    are reported unmapped, not dropped.
    """
    if threshold is None:
        threshold = db.config.similarity_threshold
    encoder = SequenceEncoder(
        generate_item_memory(db.config), db.config, include_reverse_complement
    )
    record_taxon = db.record_taxon_positions()
    taxa = db.taxa()
    keep_vectors = query_sink is not None

    def work(batch: list[SequenceView]):
        t_encode = t_classify = 0.0
        results = []
        for seq in batch:
            t0 = time.perf_counter()
            try:
                query = encoder.encode_sequence(seq)
            except TooShortError:
                t_encode += time.perf_counter() - t0
                results.append(
                    (ReadOutcome(seq.id, len(seq), (), (), UNMAPPED, None, None), None)
                )
                continue
            t1 = time.perf_counter()
            scores = score_records(query, db)
            matched = tuple(int(i) for i in (scores >= threshold).nonzero()[0])
            taxa_pos = sorted({int(record_taxon[i]) for i in matched})
            best = int(scores.argmax()) if scores.size else None
            t2 = time.perf_counter()
            t_encode += t1 - t0
            t_classify += t2 - t1
            outcome = ReadOutcome(
                read_id=seq.id,
                length=len(seq),
                matched=matched,
                taxa=tuple(taxa[p].taxon_id for p in taxa_pos),
                category=_category(len(taxa_pos)),
                best_taxon=taxa[int(record_taxon[best])].taxon_id if best is not None else None,
                best_score=float(scores[best]) if best is not None else None,
            )
            results.append((outcome, query if keep_vectors else None))
        return results, t_encode, t_classify

    wall_start = time.perf_counter()
    timings = {"encode": 0.0, "classify": 0.0, "estimate": 0.0}
    outcomes: list[ReadOutcome] = []
    for results, t_encode, t_classify in _ordered_parallel(
        work, _batched(records, _READ_BATCH), threads
    ):
        timings["encode"] += t_encode
        timings["classify"] += t_classify
        for outcome, query in results:
            outcomes.append(outcome)
            if per_read is not None:
                per_read(outcome)
            if query_sink is not None and query is not None:
                query_sink(outcome.read_id, outcome.length, query)

    t0 = time.perf_counter()
    profile = estimate(outcomes, db)
    timings["estimate"] = time.perf_counter() - t0
    wall = time.perf_counter() - wall_start
    return ProfileResult(profile=profile, outcomes=outcomes, wall_seconds=wall, timings=timings)


def load_reference_manifest(path) -> list[tuple[int, str, str]]:
    """Parse 'taxon_id<TAB>name<TAB>fasta_path' rows."""
    rows: list[tuple[int, str, str]] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(
                    f"expected 'taxon_id<TAB>name<TAB>fasta_path', got {line!r}",
                    path=str(path),
                    line=lineno,
                )
            try:
                taxon_id = int(parts[0])
            except ValueError:
                raise ParseError(
                    f"taxon_id {parts[0]!r} is not an integer", path=str(path), line=lineno
                ) from None
            rows.append((taxon_id, parts[1].strip(), parts[2].strip()))
    if not rows:
        raise ParseError("reference manifest has no entries", path=str(path))
    return rows


class _FileSegments:
    """Re-iterable view of one FASTA file's records (opened per iteration)."""

    def __init__(self, path: str):
        self.path = path

    def __iter__(self):
        with open_stream(self.path) as stream:
            yield from stream


def build_database(
    manifest_rows: list[tuple[int, str, str]],
    config: HDSpaceConfig,
    segment_size: int | None = None,
    include_reverse_complement: bool = False,
    threads: int = 1,
) -> tuple[HDRefDB, float]:
    """Build a database from (taxon_id, name, fasta_path) rows; returns
    the database and the build wall time in seconds."""
    references = [
        (taxon_id, name, _FileSegments(path)) for taxon_id, name, path in manifest_rows
    ]
    t0 = time.perf_counter()
    db = build_refdb(
        references,
        config,
        segment_size=segment_size,
        include_reverse_complement=include_reverse_complement,
        threads=threads,
    )
    return db, time.perf_counter() - t0


class QueryVectorWriter:
    """Optional store of query vectors, one record per read.

    Format: magic "HDRQ" | u16 version | u32 config_len | config text |
    u64 count (patched on close) | per read: u16 id_len, id UTF-8, u32
    read_length, ceil(D/8) vector bytes.
    """

    MAGIC = b"HDRQ"
    VERSION = 1

    def __init__(self, path, config: HDSpaceConfig):
        from .space import config_to_text

        self.path = str(path)
        self.count = 0
        self._handle = open(path, "wb")
        blob = config_to_text(config).encode("utf-8")
        self._handle.write(self.MAGIC)
        self._handle.write(struct.pack("<H", self.VERSION))
        self._handle.write(struct.pack("<I", len(blob)))
        self._handle.write(blob)
        self._count_offset = self._handle.tell()
        self._handle.write(struct.pack("<Q", 0))

    def write(self, read_id: str, length: int, vector: HDVector) -> None:
        id_blob = read_id.encode("utf-8")
        self._handle.write(struct.pack("<H", len(id_blob)))
        self._handle.write(id_blob)
        self._handle.write(struct.pack("<I", length))
        self._handle.write(vector.to_bytes())
        self.count += 1

    def close(self) -> None:
        self._handle.seek(self._count_offset)
        self._handle.write(struct.pack("<Q", self.count))
        self._handle.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
        return False


def read_query_vectors(path) -> tuple[HDSpaceConfig, list[tuple[str, int, HDVector]]]:
    """Load a query-vector store written by QueryVectorWriter."""
    from .errors import DbFormatError
    from .space import parse_config_text

    with open(path, "rb") as handle:
        data = handle.read()
    if data[:4] != QueryVectorWriter.MAGIC:
        raise DbFormatError(f"{path}: not a query-vector store")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != QueryVectorWriter.VERSION:
        raise DbFormatError(f"{path}: unsupported version {version}")
    (config_len,) = struct.unpack_from("<I", data, 6)
    offset = 10
    config = parse_config_text(data[offset : offset + config_len].decode("utf-8"), source=str(path))
    offset += config_len
    (count,) = struct.unpack_from("<Q", data, offset)
    offset += 8
    n_bytes = -(-config.dimension // 8)
    out = []
    for _ in range(count):
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        read_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        (length,) = struct.unpack_from("<I", data, offset)
        offset += 4
        vector = HDVector.from_bytes(data[offset : offset + n_bytes], config.dimension)
        offset += n_bytes
        out.append((read_id, length, vector))
    if offset != len(data):
        raise DbFormatError(f"{path}: trailing bytes after {count} records")
    return config, out
