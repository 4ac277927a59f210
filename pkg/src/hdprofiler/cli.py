"""Command-line surface: build, profile, eval, cost, inspect.

Data goes to files or stdout as TSV; human-readable summaries and
diagnostics go to stderr; the exit code is 0 iff no error. build and
profile always write a JSON run manifest next to their output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .abundance import AbundanceProfile, TaxonAbundance
from .costmodel import CostParams, cost_report, load_cost_params
from .errors import ParseError, ProfilerError
from .ingest import open_stream
from .metrics import DEFAULT_PRESENCE_EPSILON, evaluate, load_truth, throughput_report
from .pipeline import QueryVectorWriter, build_database, load_reference_manifest, profile_reads
from .refdb import footprint, header_bytes, load_refdb, save_refdb, serialized_size
from .space import HDSpaceConfig, default_config, load_config

PROFILE_COLUMNS = ("taxon_id", "name", "unique_reads", "assigned_reads", "relative_abundance")
PER_READ_COLUMNS = ("read_id", "category", "matched_taxa", "best_taxon", "best_score")


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def _write_manifest(path, subcommand, config, inputs, outputs, threads, timings) -> None:
    manifest = {
        "subcommand": subcommand,
        "tool_version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
        "threads": threads,
        "timings_s": {k: round(v, 6) for k, v in timings.items()},
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _resolve_config(args) -> HDSpaceConfig:
    config = load_config(args.config) if args.config else default_config()
    overrides = {}
    for flag, name in (
        ("dimension", "dimension"),
        ("ngram_size", "ngram_size"),
        ("density", "density"),
        ("threshold", "similarity_threshold"),
        ("seed", "seed"),
        ("bundling_cap", "bundling_cap"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _default_threads() -> int:
    return os.cpu_count() or 1


def cmd_build(args) -> int:
    config = _resolve_config(args)
    rows = load_reference_manifest(args.refs)
    threads = args.threads or _default_threads()
    db, build_seconds = build_database(
        rows,
        config,
        segment_size=args.segment_size,
        include_reverse_complement=args.reverse_complement,
        threads=threads,
    )
    save_refdb(db, args.out)
    _log(
        f"built {len(db.records)} record(s) from {len(rows)} reference(s) in "
        f"{build_seconds:.2f} s"
    )
    _log(
        f"payload {footprint(db)} bytes + header {header_bytes(db)} bytes = "
        f"{serialized_size(db)} bytes on disk"
    )
    _write_manifest(
        args.out + ".manifest.json",
        "build",
        config.as_dict(),
        {"refs": args.refs, "fastas": [path for _, _, path in rows]},
        {"db": args.out},
        threads,
        {"build": build_seconds},
    )
    return 0


def cmd_profile(args) -> int:
    db = load_refdb(args.db)
    threads = args.threads or _default_threads()
    threshold = args.threshold if args.threshold is not None else db.config.similarity_threshold

    per_read_handle = None
    per_read = None
    if args.per_read:
        per_read_handle = open(args.per_read, "w", encoding="utf-8")
        per_read_handle.write("\t".join(PER_READ_COLUMNS) + "\n")

        def per_read(outcome):
            per_read_handle.write(
                "\t".join(
                    (
                        outcome.read_id,
                        outcome.category,
                        ";".join(str(t) for t in outcome.taxa),
                        "" if outcome.best_taxon is None else str(outcome.best_taxon),
                        "" if outcome.best_score is None else _fmt(outcome.best_score),
                    )
                )
                + "\n"
            )

    query_writer = None
    query_sink = None
    if args.save_queries:
        os.makedirs(args.save_queries, exist_ok=True)
        query_writer = QueryVectorWriter(
            os.path.join(args.save_queries, "queries.hdq"), db.config
        )
        query_sink = query_writer.write

    try:
        result = profile_reads(
            db,
            open_stream(args.reads, fmt=args.format),
            threshold=threshold,
            threads=threads,
            per_read=per_read,
            query_sink=query_sink,
        )
    finally:
        if per_read_handle is not None:
            per_read_handle.close()
        if query_writer is not None:
            query_writer.close()

    profile = result.profile
    with open(args.out, "w", encoding="utf-8") as handle:
        write_profile_tsv(profile, handle)

    if result.wall_seconds > 0 and profile.total_reads:
        rate = throughput_report(profile.total_reads, result.wall_seconds)
        _log(
            f"throughput: {rate.million_reads_per_minute:.4f} Mreads/min "
            f"({profile.total_reads} reads in {result.wall_seconds:.2f} s)"
        )
    _log(
        f"reads: total={profile.total_reads} unique={profile.unique_count} "
        f"multi={profile.multi_count} unmapped={profile.unmapped_count} "
        f"(threshold {threshold:g})"
    )
    outputs = {"profile": args.out}
    if args.per_read:
        outputs["per_read"] = args.per_read
    if args.save_queries:
        outputs["queries"] = os.path.join(args.save_queries, "queries.hdq")
    _write_manifest(
        args.out + ".manifest.json",
        "profile",
        {**db.config.as_dict(), "similarity_threshold": threshold},
        {"db": args.db, "reads": args.reads},
        outputs,
        threads,
        {**result.timings, "wall": result.wall_seconds},
    )
    return 0


def write_profile_tsv(profile: AbundanceProfile, handle) -> None:
    handle.write("\t".join(PROFILE_COLUMNS) + "\n")
    for taxon in profile.taxa:
        handle.write(
            f"{taxon.taxon_id}\t{taxon.name}\t{taxon.unique_count}\t"
            f"{_fmt(taxon.assigned_total)}\t{_fmt(taxon.relative_abundance)}\n"
        )


def read_profile_tsv(path) -> AbundanceProfile:
    """Rebuild a profile from its TSV (global counters are not stored there)."""
    taxa = []
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if header.split("\t") != list(PROFILE_COLUMNS):
            raise ParseError(f"unexpected profile header {header!r}", path=str(path), line=1)
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(PROFILE_COLUMNS):
                raise ParseError(
                    f"expected {len(PROFILE_COLUMNS)} columns, got {len(parts)}",
                    path=str(path),
                    line=lineno,
                )
            try:
                taxa.append(
                    TaxonAbundance(
                        taxon_id=int(parts[0]),
                        name=parts[1],
                        unique_count=int(parts[2]),
                        assigned_total=float(parts[3]),
                        relative_abundance=float(parts[4]),
                    )
                )
            except ValueError as exc:
                raise ParseError(str(exc), path=str(path), line=lineno) from None
    unique = sum(t.unique_count for t in taxa)
    return AbundanceProfile(
        taxa=tuple(taxa),
        total_reads=0,
        unique_count=unique,
        multi_count=0,
        unmapped_count=0,
    )


def cmd_eval(args) -> int:
    profile = read_profile_tsv(args.profile)
    truth = load_truth(args.truth)
    report = evaluate(profile, truth, presence_epsilon=args.epsilon)
    handle = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        handle.write("metric\tvalue\n")
        for name in ("tp", "fp", "fn", "tn"):
            handle.write(f"{name}\t{getattr(report, name)}\n")
        handle.write(f"precision\t{_fmt(report.precision)}\n")
        handle.write(f"recall\t{_fmt(report.recall)}\n")
        handle.write(f"l1_error\t{_fmt(report.l1_error)}\n")
    finally:
        if args.out:
            handle.close()
    _log(
        f"precision={report.precision:.4f} recall={report.recall:.4f} "
        f"L1={report.l1_error:.4f} (epsilon {args.epsilon:g})"
    )
    if args.manifest:
        _write_manifest(
            args.manifest,
            "eval",
            {"presence_epsilon": args.epsilon},
            {"profile": args.profile, "truth": args.truth},
            {"report": args.out or "-"},
            1,
            {},
        )
    return 0


def _parse_param_sets(pairs) -> dict:
    overrides = {}
    int_fields = {"array_rows", "array_cols", "adc_resolution_bits"}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise ParseError(f"--set expects name=value, got {pair!r}")
        key = key.strip()
        try:
            overrides[key] = int(value) if key in int_fields else float(value)
        except ValueError:
            raise ParseError(f"--set {key}: {value.strip()!r} is not a number") from None
    return overrides


def cmd_cost(args) -> int:
    db = load_refdb(args.db)
    params = load_cost_params(args.params) if args.params else CostParams()
    overrides = _parse_param_sets(args.set)
    if overrides:
        try:
            params = params.with_overrides(overrides)
        except ValueError as exc:
            raise ParseError(f"--set: {exc}") from exc
    report = cost_report(
        read_length=args.read_length,
        ngram_size=db.config.ngram_size,
        num_prototypes=max(len(db.records), 1),
        dimension=db.config.dimension,
        params=params,
        bundling_cap=db.config.bundling_cap,
        alphabet_size=len(db.config.alphabet),
    )
    handle = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        handle.write("metric\tvalue\n")
        for name, value in report.rows():
            handle.write(f"{name}\t{value if isinstance(value, int) else _fmt(value)}\n")
    finally:
        if args.out:
            handle.close()
    _log(
        f"encode {report.encode.latency_ns / 1000:.3f} us/read, classify "
        f"{report.classify.latency_ns / 1000:.3f} us/query over {len(db.records)} prototype(s)"
    )
    if args.manifest:
        _write_manifest(
            args.manifest,
            "cost",
            {"read_length": args.read_length},
            {"db": args.db, "params": args.params},
            {"report": args.out or "-"},
            1,
            {},
        )
    return 0


def cmd_inspect(args) -> int:
    db = load_refdb(args.db)
    out = sys.stdout
    out.write("field\tvalue\n")
    for key, value in db.config.as_dict().items():
        out.write(f"config.{key}\t{value}\n")
    out.write(f"fingerprint\t{db.fingerprint()}\n")
    out.write(f"records\t{len(db.records)}\n")
    out.write(f"payload_bytes\t{footprint(db)}\n")
    out.write(f"header_bytes\t{header_bytes(db)}\n")
    out.write(f"file_bytes\t{serialized_size(db)}\n")
    out.write("\n")
    out.write("taxon_id\tsegment\tname\tgenome_length\tvector_density\n")
    for record in db.records:
        density = record.vector.popcount() / db.dimension
        out.write(
            f"{record.taxon_id}\t{record.segment_index}\t{record.name}\t"
            f"{record.genome_length}\t{density:.6f}\n"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdprofiler",
        description="Hyperdimensional-computing read profiler",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build", help="encode references into a database")
    p.add_argument("--refs", required=True, help="TSV manifest: taxon_id, name, fasta_path")
    p.add_argument("--out", required=True, help="output database path")
    p.add_argument("--config", help="HD-space config file (default: built-in defaults)")
    p.add_argument("--segment-size", type=int, help="slice genomes into prototypes of this many bases")
    p.add_argument("--reverse-complement", action="store_true", help="also bundle reverse-complement windows")
    p.add_argument("--dimension", type=int, help="override config dimension")
    p.add_argument("--ngram-size", type=int, dest="ngram_size", help="override config n-gram size")
    p.add_argument("--density", type=float, help="override config atomic-vector density")
    p.add_argument("--threshold", type=float, help="override config similarity threshold")
    p.add_argument("--seed", type=int, help="override config seed")
    p.add_argument("--bundling-cap", type=int, dest="bundling_cap", help="override config bundling cap")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("profile", help="classify reads and estimate abundance")
    p.add_argument("--db", required=True, help="database from `build`")
    p.add_argument("--reads", required=True, help="FASTA/FASTQ reads, '-' for stdin")
    p.add_argument("--out", required=True, help="output abundance TSV")
    p.add_argument("--threshold", type=float, help="similarity threshold (default: from DB config)")
    p.add_argument("--per-read", dest="per_read", help="also write per-read classifications TSV")
    p.add_argument("--save-queries", dest="save_queries", help="directory for the query-vector store")
    p.add_argument("--format", choices=("fasta", "fastq"), help="force input format")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("eval", help="compare a profile against a truth table")
    p.add_argument("--profile", required=True, help="abundance TSV from `profile`")
    p.add_argument("--truth", required=True, help="TSV: taxon<TAB>fraction")
    p.add_argument("--epsilon", type=float, default=DEFAULT_PRESENCE_EPSILON, help="presence-call threshold")
    p.add_argument("--out", help="write the report TSV here instead of stdout")
    p.add_argument("--manifest", help="also write a JSON run manifest here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cost", help="accelerator cost estimate for a database")
    p.add_argument("--db", required=True)
    p.add_argument("--read-length", dest="read_length", type=int, required=True)
    p.add_argument("--params", help="cost-parameter overrides file")
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="override one cost parameter (repeatable)")
    p.add_argument("--out", help="write the report TSV here instead of stdout")
    p.add_argument("--manifest", help="also write a JSON run manifest here")
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("inspect", help="dump database config and records")
    p.add_argument("--db", required=True)
    p.set_defaults(func=cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProfilerError as exc:
        _log(f"error: {exc}")
        return 1
    except OSError as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
