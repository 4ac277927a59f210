import numpy as np
import pytest

from hdprofiler import (
    HDSpaceConfig,
    HDVector,
    InternalConsistencyError,
    PrototypeRecord,
    estimate,
)
from hdprofiler.refdb import HDRefDB


class FakeRead:
    """estimate() only needs the matched record indices."""

    def __init__(self, *matched):
        self.matched = tuple(matched)


def _db(lengths, taxon_ids=None, segment_indexes=None):
    config = HDSpaceConfig(dimension=16, ngram_size=4, similarity_threshold=0.6)
    records = []
    for i, length in enumerate(lengths):
        records.append(
            PrototypeRecord(
                taxon_id=taxon_ids[i] if taxon_ids else i + 1,
                name=f"t{taxon_ids[i] if taxon_ids else i + 1}",
                genome_length=length,
                vector=HDVector.zeros(16),
                segment_index=segment_indexes[i] if segment_indexes else 0,
            )
        )
    return HDRefDB(config, records)


def test_symmetric_split():
    db = _db([5000, 5000])
    reads = [FakeRead(0)] * 10 + [FakeRead(1)] * 10 + [FakeRead(0, 1)] * 10
    profile = estimate(reads, db)
    assert [t.unique_count for t in profile.taxa] == [10, 10]
    assert [t.assigned_total for t in profile.taxa] == [15.0, 15.0]
    assert [t.relative_abundance for t in profile.taxa] == [0.5, 0.5]
    assert profile.multi_count == 10
    assert profile.unmapped_count == 0


def test_length_weighted_worked_example():
    # 12 unique on a 3000-base genome vs 6 unique on a 1000-base genome:
    # per-base rates 0.004 vs 0.006 -> the multi read splits 0.4/0.6
    db = _db([3000, 1000])
    reads = [FakeRead(0)] * 12 + [FakeRead(1)] * 6 + [FakeRead(0, 1)]
    profile = estimate(reads, db)
    a, b = profile.taxa
    assert a.assigned_total == pytest.approx(12.4, abs=1e-9)
    assert b.assigned_total == pytest.approx(6.6, abs=1e-9)
    assert a.relative_abundance == pytest.approx(12.4 / 19.0, abs=1e-9)
    assert b.relative_abundance == pytest.approx(6.6 / 19.0, abs=1e-9)
    assert a.relative_abundance == pytest.approx(0.6526, abs=5e-5)
    assert b.relative_abundance == pytest.approx(0.3474, abs=5e-5)


def test_all_unmapped():
    db = _db([1000, 2000])
    profile = estimate([FakeRead() for _ in range(7)], db)
    assert profile.unmapped_count == 7
    assert profile.total_reads == 7
    assert all(t.relative_abundance == 0.0 for t in profile.taxa)
    assert all(t.assigned_total == 0.0 for t in profile.taxa)


def test_no_reads_at_all():
    db = _db([1000])
    profile = estimate([], db)
    assert profile.total_reads == 0
    assert profile.taxa[0].relative_abundance == 0.0


def test_mass_conservation_and_normalization():
    rng = np.random.default_rng(42)
    db = _db(list(rng.integers(500, 50_000, size=6)))
    reads = []
    for _ in range(500):
        k = int(rng.integers(0, 4))
        if k == 0:
            reads.append(FakeRead())
        else:
            reads.append(FakeRead(*rng.choice(6, size=k, replace=False)))
    profile = estimate(reads, db)
    mapped = profile.unique_count + profile.multi_count
    assert sum(t.assigned_total for t in profile.taxa) == pytest.approx(mapped, abs=1e-9)
    if mapped:
        assert sum(t.relative_abundance for t in profile.taxa) == pytest.approx(1.0, abs=1e-9)
    assert profile.unique_count + profile.multi_count + profile.unmapped_count == 500
    assert all(t.assigned_total >= t.unique_count for t in profile.taxa)


def test_read_order_invariance():
    rng = np.random.default_rng(43)
    db = _db(list(rng.integers(500, 50_000, size=4)))
    reads = [FakeRead(*rng.choice(4, size=int(rng.integers(1, 4)), replace=False)) for _ in range(200)]
    forward = estimate(reads, db)
    shuffled = list(reads)
    rng.shuffle(shuffled)
    backward = estimate(shuffled, db)
    for a, b in zip(forward.taxa, backward.taxa):
        assert a.unique_count == b.unique_count
        assert a.assigned_total == pytest.approx(b.assigned_total, abs=1e-12)
        assert a.relative_abundance == pytest.approx(b.relative_abundance, abs=1e-12)


def test_uniform_fallback_only_when_no_unique_anywhere_in_matched_set():
    db = _db([1000, 1000, 1000])
    # taxa 0 and 1 have no unique reads; taxon 2 does
    reads = [FakeRead(2)] * 4 + [FakeRead(0, 1)] * 2
    profile = estimate(reads, db)
    # fallback: each {0,1} read splits 0.5/0.5
    assert profile.taxa[0].assigned_total == pytest.approx(1.0)
    assert profile.taxa[1].assigned_total == pytest.approx(1.0)

    # with a unique read on taxon 0, the same multi reads follow the rates
    reads = [FakeRead(2)] * 4 + [FakeRead(0)] + [FakeRead(0, 1)] * 2
    profile = estimate(reads, db)
    assert profile.taxa[0].assigned_total == pytest.approx(3.0)  # 1 + 2 * 1.0
    assert profile.taxa[1].assigned_total == pytest.approx(0.0)


def test_unique_counts_dominate_without_multi():
    db = _db([1234, 9999, 777])
    reads = [FakeRead(0)] * 6 + [FakeRead(1)] * 3 + [FakeRead(2)] * 1
    profile = estimate(reads, db)
    assert [t.relative_abundance for t in profile.taxa] == [0.6, 0.3, 0.1]


def test_segments_collapse_to_taxon():
    # two segments of taxon 7 plus one segment of taxon 8
    db = _db([600, 400, 1000], taxon_ids=[7, 7, 8], segment_indexes=[0, 1, 0])
    reads = [FakeRead(0, 1)] * 5 + [FakeRead(2)] * 5
    profile = estimate(reads, db)
    assert len(profile.taxa) == 2
    seven = profile.taxa[0]
    assert seven.taxon_id == 7
    assert seven.unique_count == 5  # multi-segment matches are unique to the taxon
    assert profile.multi_count == 0
    # collapsed genome length covers both segments
    assert db.taxa()[0].genome_length == 1000


def test_bad_record_index():
    db = _db([1000])
    with pytest.raises(InternalConsistencyError):
        estimate([FakeRead(5)], db)
