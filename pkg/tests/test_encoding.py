import numpy as np
import pytest

from hdprofiler import (
    AmbiguousSymbolError,
    BundleAccumulator,
    ConfigMismatchError,
    EmptyReferenceError,
    HDSpaceConfig,
    SequenceEncoder,
    SequenceView,
    TooShortError,
    WindowError,
    encode_ngram,
    encode_reference,
    encode_sequence,
    generate_item_memory,
    hamming,
    reverse_complement,
)

from helpers import (
    bits_of,
    item_memory_from_bits,
    naive_ngram,
    naive_valid_windows,
    random_item_memory,
)


def _small_config(dimension=8, n=2, **kwargs):
    kwargs.setdefault("similarity_threshold", 0.6)
    return HDSpaceConfig(dimension=dimension, ngram_size=n, **kwargs)


def _hand_im(config):
    return item_memory_from_bits(
        config,
        {
            "A": "10110010",
            "C": "01110001",
            "G": "11001100",
            "T": "00011011",
        },
    )


def test_ngram_single_symbol_is_atomic_vector():
    config = _small_config(n=1)
    im = _hand_im(config)
    assert encode_ngram("A", im, config) == im["A"]


def test_ngram_hand_example():
    config = _small_config(n=2)
    im = _hand_im(config)
    assert bits_of(encode_ngram("AC", im, config)) == "00001010"


def test_ngram_window_errors():
    config = _small_config(n=2)
    im = _hand_im(config)
    with pytest.raises(WindowError):
        encode_ngram("ACG", im, config)
    with pytest.raises(AmbiguousSymbolError):
        encode_ngram("AN", im, config)


def test_ngram_order_sensitivity():
    # same multiset, different order -> far-apart vectors
    config = HDSpaceConfig(dimension=1024, ngram_size=2, similarity_threshold=0.6)
    rng = np.random.default_rng(17)
    distances = []
    for _ in range(25):
        im = random_item_memory(rng, config)
        fwd = encode_ngram("AC", im, config)
        rev = encode_ngram("CA", im, config)
        assert fwd != rev
        distances.append(hamming(fwd, rev))
    assert np.mean(distances) > 0.4 * config.dimension


def test_reversed_window_far_apart():
    config = HDSpaceConfig(dimension=1024, ngram_size=6, similarity_threshold=0.6)
    rng = np.random.default_rng(23)
    distances = []
    for _ in range(25):
        im = random_item_memory(rng, config)
        window = "".join(rng.choice(list("ACGT"), config.ngram_size))
        distances.append(hamming(encode_ngram(window, im, config),
                                 encode_ngram(window[::-1], im, config)))
    assert np.mean(distances) > 0.4 * config.dimension


@pytest.mark.parametrize("dimension", [16, 64, 67])
@pytest.mark.parametrize("n", [1, 2, 4])
def test_ngram_matches_naive_oracle(dimension, n):
    rng = np.random.default_rng(dimension * 10 + n)
    config = HDSpaceConfig(dimension=dimension, ngram_size=n, similarity_threshold=0.6)
    for _ in range(25):
        im = random_item_memory(rng, config)
        atomic_bits = {s: list(im[s].to_bits()) for s in config.alphabet}
        window = "".join(rng.choice(list("ACGT"), n))
        expected = naive_ngram(window, atomic_bits, dimension)
        got = encode_ngram(window, im, config)
        assert list(got.to_bits()) == expected


def test_sequence_single_window_equals_ngram():
    config = _small_config(n=3)
    im = _hand_im(config)
    assert encode_sequence("ACG", im, config) == encode_ngram("ACG", im, config)


def test_sequence_skips_ambiguous_windows():
    # brute-force window enumeration is the oracle for the bundled count
    config = HDSpaceConfig(dimension=64, ngram_size=4, similarity_threshold=0.6)
    rng = np.random.default_rng(5)
    im = random_item_memory(rng, config)
    encoder = SequenceEncoder(im, config)
    read = "ACGN GTACGTNNACGTACGTACGTXACGTAC"[:30]
    expected = naive_valid_windows(read, 4)
    acc, added = encoder.accumulate(read)
    assert added == len(expected)
    assert acc.added == len(expected)

    # and the counts equal the naive per-window bundle
    atomic_bits = {s: list(im[s].to_bits()) for s in config.alphabet}
    counts = np.zeros(64, dtype=int)
    for p in expected:
        counts += np.array(naive_ngram(read[p : p + 4], atomic_bits, 64))
    assert np.array_equal(acc.counts, counts)


def test_sequence_deterministic():
    config = HDSpaceConfig(dimension=256, ngram_size=5, similarity_threshold=0.6)
    im = generate_item_memory(config)
    rng = np.random.default_rng(9)
    read = "".join(rng.choice(list("ACGT"), 120))
    assert encode_sequence(read, im, config) == encode_sequence(read, im, config)


def test_sequence_too_short():
    config = HDSpaceConfig(dimension=64, ngram_size=8, similarity_threshold=0.6)
    im = generate_item_memory(config)
    with pytest.raises(TooShortError):
        encode_sequence("ACGT", im, config)
    with pytest.raises(TooShortError):
        encode_sequence("ACGTNACGTN", im, config)  # long enough, no clean window


def test_bundling_cap():
    config = HDSpaceConfig(
        dimension=64, ngram_size=4, similarity_threshold=0.6, bundling_cap=5
    )
    im = generate_item_memory(config)
    encoder = SequenceEncoder(im, config)
    read = "ACGTACGTACGTACGTACGT"  # 17 windows uncapped
    acc, added = encoder.accumulate(read, limit=config.bundling_cap)
    assert added == 5
    _, n_uncapped = SequenceEncoder(im, config).accumulate(read)
    assert n_uncapped == 17


def test_reference_single_segment_equals_sequence():
    config = HDSpaceConfig(dimension=128, ngram_size=4, similarity_threshold=0.6)
    im = generate_item_memory(config)
    vector, length = encode_reference(["ACGTACGTAC"], im, config)
    assert length == 10
    assert vector == encode_sequence("ACGTACGTAC", im, config)


def test_reference_segments_never_straddle():
    # two segments lose exactly the N-1 straddling windows of the concatenation
    config = HDSpaceConfig(dimension=64, ngram_size=4, similarity_threshold=0.6)
    rng = np.random.default_rng(21)
    im = random_item_memory(rng, config)
    encoder = SequenceEncoder(im, config)
    left = "".join(rng.choice(list("ACGT"), 30))
    right = "".join(rng.choice(list("ACGT"), 20))

    split_acc = BundleAccumulator(64)
    encoder.accumulate(left, split_acc)
    encoder.accumulate(right, split_acc)
    joined_acc, _ = encoder.accumulate(left + right)
    assert joined_acc.added - split_acc.added == config.ngram_size - 1

    # counts match the brute-force window sets in both arrangements
    atomic_bits = {s: list(im[s].to_bits()) for s in config.alphabet}

    def brute_counts(*pieces):
        counts = np.zeros(64, dtype=int)
        for piece in pieces:
            for p in naive_valid_windows(piece, 4):
                counts += np.array(naive_ngram(piece[p : p + 4], atomic_bits, 64))
        return counts

    assert np.array_equal(split_acc.counts, brute_counts(left, right))
    assert np.array_equal(joined_acc.counts, brute_counts(left + right))


def test_reference_empty_error():
    config = HDSpaceConfig(dimension=64, ngram_size=8, similarity_threshold=0.6)
    im = generate_item_memory(config)
    with pytest.raises(EmptyReferenceError):
        encode_reference(["ACG", "NNNNNNNNNN"], im, config)


def test_reference_accepts_sequence_views():
    config = HDSpaceConfig(dimension=64, ngram_size=4, similarity_threshold=0.6)
    im = generate_item_memory(config)
    segs = [SequenceView("s1", "ACGTACGT"), SequenceView("s2", "TTTTACGT")]
    vector, length = encode_reference(segs, im, config)
    assert length == 16


def test_streaming_equivalence_across_batch_sizes():
    # the internal window batch size must not affect the prototype
    config = HDSpaceConfig(dimension=256, ngram_size=6, similarity_threshold=0.6)
    im = generate_item_memory(config)
    rng = np.random.default_rng(33)
    genome = "".join(rng.choice(list("ACGT"), 700))
    reference = None
    for batch in (1, 7, 64, 1024):
        encoder = SequenceEncoder(im, config, window_batch=batch)
        vector, _ = encoder.encode_reference([genome])
        if reference is None:
            reference = vector
        else:
            assert vector == reference


def test_prototype_density_is_balanced():
    config = HDSpaceConfig(dimension=4096, ngram_size=16, similarity_threshold=0.55)
    im = generate_item_memory(config)
    rng = np.random.default_rng(55)
    for _ in range(3):
        genome = "".join(rng.choice(list("ACGT"), 5000))
        vector, _ = encode_reference([genome], im, config)
        assert 0.35 <= vector.popcount() / config.dimension <= 0.65


def test_reverse_complement_helper():
    assert reverse_complement("AACG") == "CGTT"
    assert reverse_complement("ACGT") == "ACGT"
    assert reverse_complement("AANTT") == "AANTT"


def test_reverse_complement_flag_bundles_both_strands():
    config = HDSpaceConfig(dimension=128, ngram_size=4, similarity_threshold=0.6)
    im = generate_item_memory(config)
    read = "ACGTTGCAAC"
    plain = SequenceEncoder(im, config)
    both = SequenceEncoder(im, config, include_reverse_complement=True)
    acc_plain, n_plain = plain.accumulate(read)
    acc_both, n_both = both.accumulate(read)
    assert n_both == 2 * n_plain

    manual = BundleAccumulator(128)
    plain.accumulate(read, manual)
    plain.accumulate(reverse_complement(read), manual)
    assert np.array_equal(acc_both.counts, manual.counts)


def test_encoder_rejects_foreign_item_memory():
    config_a = HDSpaceConfig(dimension=64, ngram_size=4, similarity_threshold=0.6, seed=1)
    config_b = HDSpaceConfig(dimension=64, ngram_size=4, similarity_threshold=0.6, seed=2)
    im = generate_item_memory(config_a)
    with pytest.raises(ConfigMismatchError):
        SequenceEncoder(im, config_b)
