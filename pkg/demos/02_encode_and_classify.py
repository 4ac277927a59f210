"""From DNA windows to a multi-species match set.

Shows the full encoding stack: atomic vectors from the item memory, one
bound window, a whole-sequence bundle, reference prototypes, and finally
classification of reads that hit one, several, or none of the references.
"""

import numpy as np

from hdprofiler import (
    HDSpaceConfig,
    SequenceEncoder,
    build_refdb,
    classify,
    generate_item_memory,
    hamming,
    similarity,
)

rng = np.random.default_rng(7)

config = HDSpaceConfig(dimension=8192, ngram_size=8, similarity_threshold=0.54, seed=1)
im = generate_item_memory(config)
encoder = SequenceEncoder(im, config)

print(f"HD space: D={config.dimension}, N={config.ngram_size}, "
      f"T={config.similarity_threshold}, fingerprint {config.fingerprint()}")
print()

# --- windows are order-sensitive ---------------------------------------------

w1 = encoder.encode_ngram("ACGTACGT")
w2 = encoder.encode_ngram("TGCATGCA")
w3 = encoder.encode_ngram("ACGTACGA")  # one symbol differs
print("distance(ACGTACGT, TGCATGCA) =", hamming(w1, w2), "(unrelated windows)")
print("distance(ACGTACGT, ACGTACGA) =", hamming(w1, w3), "(still unrelated: binding scrambles)")
print()

# --- two related genomes and one unrelated one -------------------------------

core = "".join(rng.choice(list("ACGT"), 3000))
genome_a = core + "".join(rng.choice(list("ACGT"), 1000))
genome_b = core + "".join(rng.choice(list("ACGT"), 1000))  # shares 3 kb with A
genome_c = "".join(rng.choice(list("ACGT"), 4000))

db = build_refdb(
    [(1, "species-A", [genome_a]), (2, "species-B", [genome_b]), (3, "species-C", [genome_c])],
    config,
    item_memory=im,
)
print("prototype densities:",
      [round(r.vector.popcount() / config.dimension, 3) for r in db.records])
print()

# --- reads hitting one, many, or no references --------------------------------


def show(label, read):
    result = classify(encoder.encode_sequence(read), db, read_id=label)
    scores = ", ".join(f"{r.name}={s:.4f}" for r, s in zip(db.records, result.scores))
    taxa = [db.records[i].name for i in result.matched]
    print(f"{label:<14} {result.category:<9} matched={taxa}\n{'':<14} scores: {scores}")


unique_read = genome_a[3400:3550]        # in A's private tail
shared_read = core[1000:1150]            # in the region A and B share
foreign_read = "".join(rng.choice(list("ACGT"), 150))  # from nowhere

show("private-to-A", unique_read)
show("shared-A-B", shared_read)
show("foreign", foreign_read)
print()

# --- the same query, re-thresholded ------------------------------------------
# Scores are kept for every prototype, so tightening T never needs re-encoding.

query = encoder.encode_sequence(shared_read)
for t in (0.52, 0.54, 0.60):
    matched = classify(query, db, threshold=t).matched
    print(f"threshold {t:.2f}: matched {[db.records[i].name for i in matched]}")

print()
print("self-similarity of a prototype:", similarity(db.records[0].vector, db.records[0].vector))
