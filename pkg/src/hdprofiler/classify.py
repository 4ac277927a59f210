"""Per-read similarity check against every prototype in the database.

A query can land close to one, several, or none of the prototypes; all
three outcomes are first-class (unique / multi / unmapped) and all scores
are retained so results can be re-thresholded without re-encoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HDVector, hamming
from .errors import ConfigMismatchError
from .refdb import HDRefDB

UNIQUE = "unique"
MULTI = "multi"
UNMAPPED = "unmapped"


@dataclass
class ReadClassification:
    """Scores and the thresholded match set for one read.

    `matched` holds record indices with score >= threshold; `best` is the
    argmax score (lowest index on ties) and is informational only.
    """

    read_id: str
    scores: np.ndarray
    matched: tuple[int, ...]
    category: str
    best: int | None


def similarity(a: HDVector, b: HDVector) -> float:
    """Fraction of agreeing bit positions: (D - hamming) / D, in [0, 1]."""
    return (a.dimension - hamming(a, b)) / a.dimension


def _category(n_matched: int) -> str:
    if n_matched == 0:
        return UNMAPPED
    return UNIQUE if n_matched == 1 else MULTI


def score_records(query: HDVector, db: HDRefDB) -> np.ndarray:
    """Normalized similarity of `query` against every record, in order."""
    if query.dimension != db.dimension:
        raise ConfigMismatchError(
            f"query dimension {query.dimension} does not match database "
            f"dimension {db.dimension}"
        )
    matrix = db.vectors_matrix()
    if matrix.shape[0] == 0:
        return np.empty(0, dtype=np.float64)
    distances = np.bitwise_count(matrix ^ query.words).sum(axis=1)
    return (db.dimension - distances) / db.dimension


def classify(
    query: HDVector,
    db: HDRefDB,
    threshold: float | None = None,
    read_id: str = "",
) -> ReadClassification:
    """Score `query` against all prototypes and threshold into a match set.

    `threshold` defaults to the database config's similarity threshold;
    matching is inclusive (score >= threshold).
    """
    if threshold is None:
        threshold = db.config.similarity_threshold
    scores = score_records(query, db)
    matched = tuple(int(i) for i in np.flatnonzero(scores >= threshold))
    best = int(np.argmax(scores)) if scores.size else None
    return ReadClassification(
        read_id=read_id,
        scores=scores,
        matched=matched,
        category=_category(len(matched)),
        best=best,
    )
