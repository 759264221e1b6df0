"""Jaccard ground truth, sketch-based estimation, RMSE, and uniformity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dynsketch.core import EMPTY, Permutation, Sketch, SparseBinaryVector, ValidationError


@dataclass(frozen=True)
class PairEstimate:
    """Sketch collision statistics for one pair of points.

    Slots where both sketches are EMPTY are not comparable; slots where
    exactly one side is EMPTY count as comparable non-collisions.
    """

    true_jaccard: float
    estimated_jaccard: float
    collisions: int
    comparable_slots: int


def jaccard_true(x: SparseBinaryVector, y: SparseBinaryVector) -> float:
    """Exact set Jaccard of two supports; 0.0 when both are empty."""
    if x.dim != y.dim:
        raise ValidationError(f"dimension mismatch: {x.dim} != {y.dim}")
    a, b = set(x.support), set(y.support)
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def jaccard_estimate(sa: Sketch, sb: Sketch, true_jaccard: float = float("nan")) -> PairEstimate:
    """Collision fraction across comparable sketch slots."""
    if sa.num_perms != sb.num_perms:
        raise ValidationError(
            f"sketch size mismatch: {sa.num_perms} != {sb.num_perms}"
        )
    collisions = 0
    comparable = 0
    for va, vb in zip(sa.values, sb.values):
        if va is EMPTY and vb is EMPTY:
            continue
        comparable += 1
        if va is not EMPTY and vb is not EMPTY and va == vb:
            collisions += 1
    estimated = collisions / comparable if comparable > 0 else 0.0
    return PairEstimate(
        true_jaccard=float(true_jaccard),
        estimated_jaccard=estimated,
        collisions=collisions,
        comparable_slots=comparable,
    )


def rmse(pairs) -> float:
    """Root mean squared error of estimated vs true Jaccard over pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("need at least one pair")
    total = 0.0
    for p in pairs:
        diff = p.estimated_jaccard - p.true_jaccard
        total += diff * diff
    return math.sqrt(total / len(pairs))


@dataclass(frozen=True)
class UniformityResult:
    """Empirical argmin distribution over a fixed support set."""

    frequencies: dict
    max_deviation: float
    trials: int


def minwise_uniformity_test(perm_source, support_set, trials: int) -> UniformityResult:
    """Tally which element of ``support_set`` attains the minimum rank.

    ``perm_source`` is called with the trial number and must return a
    permutation covering every element of the set. For a minwise uniform
    source each element should win with frequency 1/|set|; the result
    reports the raw frequencies and the largest absolute deviation, leaving
    any pass/fail thresholding to the caller.
    """
    elements = tuple(sorted({int(u) for u in support_set}))
    if len(elements) <= 1:
        raise ValidationError("support set must contain at least two elements")
    if trials < 10 * len(elements) ** 2:
        raise ValidationError(
            f"need at least {10 * len(elements) ** 2} trials for a set of "
            f"{len(elements)} elements"
        )
    if elements[0] < 1:
        raise ValidationError("support elements must be at least 1")
    idx = np.fromiter(elements, dtype=np.int64, count=len(elements)) - 1
    counts = dict.fromkeys(elements, 0)
    for t in range(trials):
        perm = perm_source(t)
        if not isinstance(perm, Permutation):
            raise ValidationError("perm_source must yield Permutation values")
        if elements[-1] > perm.dim:
            raise ValidationError(
                f"support element {elements[-1]} exceeds permutation dimension {perm.dim}"
            )
        winner = elements[int(np.argmin(perm.rank[idx]))]
        counts[winner] += 1
    target = 1.0 / len(elements)
    frequencies = {u: c / trials for u, c in counts.items()}
    max_deviation = max(abs(f - target) for f in frequencies.values())
    return UniformityResult(
        frequencies=frequencies, max_deviation=max_deviation, trials=trials
    )
