"""Two-pass species-level relative abundance estimation.

Pass 1 counts uniquely mapped reads per taxon. Pass 2 splits each
multi-mapped read over its matched taxa proportionally to that taxon's
unique count divided by its genome length, renormalized over the read's
matched set (the only normalization that conserves read mass); when every
matched taxon has zero unique reads the split falls back to uniform.
Unmapped reads never enter the abundance denominator and are reported
separately.

In segmented databases, matches collapse to their taxon before a read is
categorized, so two segments of one genome still make a read unique.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InternalConsistencyError
from .refdb import HDRefDB

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TaxonAbundance:
    taxon_id: int
    name: str
    unique_count: int
    assigned_total: float
    relative_abundance: float


@dataclass(frozen=True)
class AbundanceProfile:
    """Per-taxon estimates plus global read accounting.

    Relative abundances sum to 1 when at least one read mapped, and are
    all zero otherwise. unique + multi + unmapped == total_reads.
    """

    taxa: tuple[TaxonAbundance, ...]
    total_reads: int
    unique_count: int
    multi_count: int
    unmapped_count: int

    def abundance_by_taxon(self) -> dict[int, float]:
        return {t.taxon_id: t.relative_abundance for t in self.taxa}


def _collapse(matched: Sequence[int], record_taxon: np.ndarray) -> tuple[int, ...]:
    n_records = record_taxon.shape[0]
    positions = set()
    for index in matched:
        if not 0 <= index < n_records:
            raise InternalConsistencyError(
                f"matched record index {index} outside database of {n_records} records"
            )
        positions.add(int(record_taxon[index]))
    return tuple(sorted(positions))


def estimate(classifications: Sequence, db: HDRefDB) -> AbundanceProfile:
    """Estimate relative abundance from stored per-read classifications.

    `classifications` is any sequence of objects with a `matched` tuple of
    record indices (two passes are made over it, so it must be re-iterable).
    """
    taxa = db.taxa()
    record_taxon = db.record_taxon_positions()
    n_taxa = len(taxa)
    lengths = np.array([t.genome_length for t in taxa], dtype=np.float64)

    unique = np.zeros(n_taxa, dtype=np.int64)
    multi_reads: list[tuple[int, ...]] = []
    total = unmapped = 0
    for record in classifications:
        total += 1
        positions = _collapse(record.matched, record_taxon)
        if len(positions) == 0:
            unmapped += 1
        elif len(positions) == 1:
            unique[positions[0]] += 1
        else:
            multi_reads.append(positions)

    assigned = unique.astype(np.float64)
    rate = unique / lengths if n_taxa else np.empty(0)
    fallback_reads = 0
    for positions in multi_reads:
        weights = rate[list(positions)]
        weight_sum = weights.sum()
        if weight_sum == 0.0:
            fallback_reads += 1
            weights = np.full(len(positions), 1.0 / len(positions))
        else:
            weights = weights / weight_sum
        assigned[list(positions)] += weights
    if fallback_reads:
        logger.info(
            "%d multi-mapped read(s) split uniformly (no unique reads on any matched taxon)",
            fallback_reads,
        )

    assigned_sum = assigned.sum()
    relative = assigned / assigned_sum if assigned_sum > 0 else np.zeros(n_taxa)
    return AbundanceProfile(
        taxa=tuple(
            TaxonAbundance(
                taxon_id=info.taxon_id,
                name=info.name,
                unique_count=int(unique[i]),
                assigned_total=float(assigned[i]),
                relative_abundance=float(relative[i]),
            )
            for i, info in enumerate(taxa)
        ),
        total_reads=total,
        unique_count=int(unique.sum()),
        multi_count=len(multi_reads),
        unmapped_count=unmapped,
    )
