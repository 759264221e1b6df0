"""Synthetic corpora so benchmark runs need no dataset download."""

from __future__ import annotations

import numpy as np

from dynsketch.core import SparseBinaryVector, ValidationError
from dynsketch.ingest import Corpus

# Keeps the corpus stream independent of the permutation and workload streams
# drawn from the same master seed.
_SYNTHETIC_STREAM = 11


def synthetic_corpus(dim: int, support_size: int, num_points: int, seed: int) -> Corpus:
    """Points with supports sampled uniformly without replacement at a fixed size."""
    if dim < 1:
        raise ValidationError("dimension must be at least 1")
    if not 0 <= support_size <= dim:
        raise ValidationError(
            f"support size {support_size} out of range 0..{dim}"
        )
    if num_points < 1:
        raise ValidationError("need at least one point")
    if seed < 0:
        raise ValidationError("seed must be non-negative")
    rng = np.random.default_rng(np.random.SeedSequence([seed, _SYNTHETIC_STREAM]))
    vectors = []
    for _ in range(num_points):
        chosen = np.sort(rng.choice(dim, size=support_size, replace=False)) + 1
        vectors.append(SparseBinaryVector(dim, tuple(int(s) for s in chosen)))
    return Corpus(num_docs=num_points, vocab_size=dim, vectors=tuple(vectors))
