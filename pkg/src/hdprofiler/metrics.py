"""Evaluation against a known composition, and throughput accounting.

Presence/absence is judged per taxon of the database universe: a taxon is
called present when its estimated relative abundance exceeds
`presence_epsilon`, and is truly present when the truth table gives it a
positive fraction. Confusion counts partition the universe exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abundance import AbundanceProfile
from .errors import ParseError, TaxonMappingError

DEFAULT_PRESENCE_EPSILON = 0.001  # 0.1% relative abundance


@dataclass(frozen=True)
class TruthProfile:
    """Expected composition: raw taxon key (id or name) -> fraction in [0, 1]."""

    fractions: dict[str, float]

    def __post_init__(self):
        for key, fraction in self.fractions.items():
            if not 0.0 <= fraction <= 1.0:
                raise ValueError(f"truth fraction for {key!r} must be in [0, 1], got {fraction}")


def load_truth(path) -> TruthProfile:
    """Read a 'taxon<TAB>fraction' TSV (comments with '#', blank lines ok)."""
    fractions: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(
                    f"expected 'taxon<TAB>fraction', got {line!r}", path=str(path), line=lineno
                )
            key = parts[0].strip()
            try:
                fraction = float(parts[1])
            except ValueError:
                raise ParseError(
                    f"fraction {parts[1]!r} is not a number", path=str(path), line=lineno
                ) from None
            if key in fractions:
                raise ParseError(f"duplicate taxon {key!r}", path=str(path), line=lineno)
            fractions[key] = fraction
    try:
        return TruthProfile(fractions)
    except ValueError as exc:
        raise ParseError(str(exc), path=str(path)) from exc


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    l1_error: float


def _resolve_truth(profile: AbundanceProfile, truth: TruthProfile) -> dict[int, float]:
    """Map truth keys onto database taxa by id first, then by exact name."""
    by_id = {t.taxon_id: t.taxon_id for t in profile.taxa}
    by_name = {t.name: t.taxon_id for t in profile.taxa}
    resolved: dict[int, float] = {}
    for key, fraction in truth.fractions.items():
        taxon_id = None
        try:
            candidate = int(key)
        except ValueError:
            candidate = None
        if candidate is not None and candidate in by_id:
            taxon_id = candidate
        elif key in by_name:
            taxon_id = by_name[key]
        if taxon_id is None:
            raise TaxonMappingError(f"truth taxon {key!r} is not in the database")
        if taxon_id in resolved:
            raise TaxonMappingError(f"truth taxon {key!r} resolves to an already-used taxon")
        resolved[taxon_id] = fraction
    return resolved


def evaluate(
    profile: AbundanceProfile,
    truth: TruthProfile,
    presence_epsilon: float = DEFAULT_PRESENCE_EPSILON,
) -> EvalReport:
    """Confusion counts, precision/recall, and L1 abundance error."""
    if presence_epsilon < 0:
        raise ValueError(f"presence_epsilon must be >= 0, got {presence_epsilon}")
    expected = _resolve_truth(profile, truth)
    tp = fp = fn = tn = 0
    l1 = 0.0
    for taxon in profile.taxa:
        truth_fraction = expected.get(taxon.taxon_id, 0.0)
        called = taxon.relative_abundance > presence_epsilon
        present = truth_fraction > 0.0
        if called and present:
            tp += 1
        elif called:
            fp += 1
        elif present:
            fn += 1
        else:
            tn += 1
        l1 += abs(taxon.relative_abundance - truth_fraction)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return EvalReport(tp=tp, fp=fp, fn=fn, tn=tn, precision=precision, recall=recall, l1_error=l1)


@dataclass(frozen=True)
class ThroughputReport:
    read_count: int
    wall_seconds: float
    million_reads_per_minute: float
    reads_per_second: float
    bases_per_joule: float | None = None  # populated only with a cost model attached


def throughput_report(read_count: int, wall_seconds: float) -> ThroughputReport:
    """Convert a (reads, wall time) measurement into the standard units."""
    if wall_seconds <= 0:
        raise ValueError(f"wall_seconds must be positive, got {wall_seconds}")
    if read_count < 0:
        raise ValueError(f"read_count must be >= 0, got {read_count}")
    return ThroughputReport(
        read_count=read_count,
        wall_seconds=wall_seconds,
        million_reads_per_minute=(read_count / 1e6) / (wall_seconds / 60.0),
        reads_per_second=read_count / wall_seconds,
    )
