import pytest

from hdprofiler import (
    ParseError,
    TaxonMappingError,
    TruthProfile,
    evaluate,
    load_truth,
    throughput_report,
)
from hdprofiler.abundance import AbundanceProfile, TaxonAbundance


def _profile(entries):
    """entries: list of (taxon_id, name, abundance)."""
    taxa = tuple(
        TaxonAbundance(
            taxon_id=taxon_id,
            name=name,
            unique_count=int(round(abundance * 100)),
            assigned_total=abundance * 100,
            relative_abundance=abundance,
        )
        for taxon_id, name, abundance in entries
    )
    return AbundanceProfile(
        taxa=taxa, total_reads=100, unique_count=100, multi_count=0, unmapped_count=0
    )


def test_perfect_profile():
    profile = _profile([(1, "a", 0.6), (2, "b", 0.4), (3, "c", 0.0)])
    truth = TruthProfile({"a": 0.6, "b": 0.4})
    report = evaluate(profile, truth)
    assert (report.tp, report.fp, report.fn, report.tn) == (2, 0, 0, 1)
    assert report.precision == 1.0
    assert report.recall == 1.0
    assert report.l1_error == pytest.approx(0.0, abs=1e-12)


def test_false_positive_halves_precision():
    profile = _profile([(1, "a", 0.7), (2, "b", 0.3)])
    truth = TruthProfile({"a": 1.0})
    report = evaluate(profile, truth)
    assert (report.tp, report.fp, report.fn, report.tn) == (1, 1, 0, 0)
    assert report.precision == 0.5
    assert report.recall == 1.0
    assert report.l1_error == pytest.approx(0.3 + 0.3, abs=1e-12)


def test_empty_profile_misses_truth():
    profile = _profile([(1, "a", 0.0), (2, "b", 0.0)])
    truth = TruthProfile({"a": 1.0})
    report = evaluate(profile, truth)
    assert (report.tp, report.fp, report.fn, report.tn) == (0, 0, 1, 1)
    assert report.recall == 0.0
    assert report.precision == 0.0  # zero denominator convention


def test_confusion_partitions_universe():
    profile = _profile([(i, f"t{i}", v) for i, v in enumerate((0.5, 0.25, 0.25, 0.0, 0.0))])
    truth = TruthProfile({"t0": 0.5, "t3": 0.5})
    report = evaluate(profile, truth)
    assert report.tp + report.fp + report.fn + report.tn == 5


def test_taxon_order_invariance():
    entries = [(1, "a", 0.6), (2, "b", 0.4), (3, "c", 0.0)]
    truth = TruthProfile({"a": 0.5, "b": 0.5})
    forward = evaluate(_profile(entries), truth)
    backward = evaluate(_profile(entries[::-1]), truth)
    assert forward == backward


def test_truth_resolution_by_id_and_name():
    profile = _profile([(10, "alpha", 0.5), (20, "beta", 0.5)])
    by_name = evaluate(profile, TruthProfile({"alpha": 0.5, "beta": 0.5}))
    by_id = evaluate(profile, TruthProfile({"10": 0.5, "20": 0.5}))
    assert by_name == by_id
    with pytest.raises(TaxonMappingError):
        evaluate(profile, TruthProfile({"gamma": 1.0}))


def test_presence_epsilon_is_strict():
    profile = _profile([(1, "a", 0.001), (2, "b", 0.999)])
    truth = TruthProfile({"b": 1.0})
    report = evaluate(profile, truth, presence_epsilon=0.001)
    assert report.fp == 0  # exactly epsilon is not called present
    report = evaluate(profile, truth, presence_epsilon=0.0009)
    assert report.fp == 1


def test_truth_fraction_validation():
    with pytest.raises(ValueError):
        TruthProfile({"a": 1.5})


def test_load_truth(tmp_path):
    path = tmp_path / "truth.tsv"
    path.write_text("# comment\na\t0.6\n42\t0.4\n\n")
    truth = load_truth(path)
    assert truth.fractions == {"a": 0.6, "42": 0.4}

    path.write_text("a\t0.6\tjunk\n")
    with pytest.raises(ParseError):
        load_truth(path)
    path.write_text("a\tnotanumber\n")
    with pytest.raises(ParseError):
        load_truth(path)
    path.write_text("a\t0.5\na\t0.5\n")
    with pytest.raises(ParseError, match="duplicate"):
        load_truth(path)


def test_throughput_units():
    assert throughput_report(1_000_000, 60.0).million_reads_per_minute == pytest.approx(1.0)
    assert throughput_report(500_000, 30.0).million_reads_per_minute == pytest.approx(1.0)
    report = throughput_report(0, 10.0)
    assert report.million_reads_per_minute == 0.0
    assert report.reads_per_second == 0.0
    assert report.bases_per_joule is None
    with pytest.raises(ValueError):
        throughput_report(10, 0.0)
    with pytest.raises(ValueError):
        throughput_report(-1, 1.0)
