"""Streaming FASTA/FASTQ ingestion for references and samples.

Format is auto-detected from the first byte ('>' vs '@') and can be
forced; gzip inputs are detected by magic bytes and decompressed
transparently; "-" reads standard input. Bases are uppercased on ingest
and out-of-alphabet characters are kept (the encoder skips windows that
contain them).
"""

from __future__ import annotations

import gzip
import io
import sys

from .encoding import SequenceView
from .errors import IoError, ParseError

_GZIP_MAGIC = b"\x1f\x8b"


def _open_binary(path):
    if path == "-":
        stream = sys.stdin.buffer
        return stream if isinstance(stream, io.BufferedReader) else io.BufferedReader(stream)
    try:
        return open(path, "rb")
    except OSError as exc:
        raise IoError(f"cannot open {path}: {exc}") from exc


class RecordStream:
    """Lazy iterator of SequenceView records from one sequence file."""

    def __init__(self, path, fmt: str | None = None):
        if fmt not in (None, "fasta", "fastq"):
            raise ValueError(f"format must be 'fasta' or 'fastq', got {fmt!r}")
        self.path = str(path)
        raw = _open_binary(path)
        buffered = raw if isinstance(raw, io.BufferedReader) else io.BufferedReader(raw)
        if buffered.peek(2)[:2] == _GZIP_MAGIC:
            buffered = io.BufferedReader(gzip.GzipFile(fileobj=buffered))
        head = buffered.peek(1)[:1]
        if fmt is None:
            if head == b">":
                fmt = "fasta"
            elif head == b"@":
                fmt = "fastq"
            elif head == b"":
                fmt = "empty"
            else:
                raise ParseError(
                    f"cannot detect format from first byte {head!r} "
                    "(expected '>' or '@'; use an explicit format)",
                    path=self.path,
                    line=1,
                )
        self.format = fmt
        # non-ASCII bytes degrade to replacement chars, which the encoder
        # treats as out-of-alphabet symbols
        self._text = io.TextIOWrapper(buffered, encoding="ascii", errors="replace")

    def __iter__(self):
        if self.format == "fasta":
            return _iter_fasta(self._text, self.path)
        if self.format == "fastq":
            return _iter_fastq(self._text, self.path)
        return iter(())

    def close(self):
        self._text.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
        return False


def open_stream(path, fmt: str | None = None) -> RecordStream:
    """Open a FASTA/FASTQ file (optionally gzipped, '-' for stdin)."""
    return RecordStream(path, fmt=fmt)


def _record_id(header: str, path: str, line: int) -> str:
    # id is the first whitespace-delimited token after the marker
    token = header[1:].split(None, 1)
    if not token or not token[0]:
        raise ParseError("record header has an empty id", path=path, line=line)
    return token[0]


def _iter_fasta(text, path):
    record_id = None
    chunks: list[str] = []
    for lineno, line in enumerate(text, start=1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        if line.startswith(">"):
            if record_id is not None:
                yield SequenceView(record_id, "".join(chunks))
            record_id = _record_id(line, path, lineno)
            chunks = []
        else:
            if record_id is None:
                raise ParseError(
                    f"sequence data before any '>' header: {line[:30]!r}", path=path, line=lineno
                )
            chunks.append(line.upper())
    if record_id is not None:
        yield SequenceView(record_id, "".join(chunks))


def _iter_fastq(text, path):
    lines = iter(enumerate(text, start=1))
    for lineno, line in lines:
        header = line.rstrip("\r\n")
        if not header:
            continue
        if not header.startswith("@"):
            raise ParseError(f"expected '@' header, got {header[:30]!r}", path=path, line=lineno)
        record_id = _record_id(header, path, lineno)
        try:
            _, seq = next(lines)
            plus_no, plus = next(lines)
            qual_no, qual = next(lines)
        except StopIteration:
            raise ParseError(f"truncated record {record_id!r}", path=path, line=lineno) from None
        seq = seq.rstrip("\r\n")
        plus = plus.rstrip("\r\n")
        qual = qual.rstrip("\r\n")
        if not plus.startswith("+"):
            raise ParseError(
                f"expected '+' separator for record {record_id!r}, got {plus[:30]!r}",
                path=path,
                line=plus_no,
            )
        if len(qual) != len(seq):
            raise ParseError(
                f"quality length {len(qual)} != sequence length {len(seq)} "
                f"for record {record_id!r}",
                path=path,
                line=qual_no,
            )
        yield SequenceView(record_id, seq.upper())


def write_fasta(records, handle, width: int = 60) -> None:
    """Write records as FASTA with `width`-column wrapped bodies."""
    for record in records:
        handle.write(f">{record.id}\n")
        bases = record.bases
        for lo in range(0, len(bases), width):
            handle.write(bases[lo : lo + width] + "\n")
        if not bases:
            handle.write("\n")
