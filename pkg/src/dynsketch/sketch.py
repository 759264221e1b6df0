"""MinHash computation and the fast in-place sketch update rules.

Each update rule returns exactly what re-sketching the edited vector under
the corresponding lifted/dropped permutation would return, without ever
materializing that permutation. The lifted/dropped constructions in
:mod:`dynsketch.permgen` serve as the exact oracles in the test suite.
"""

from __future__ import annotations

import numpy as np

from dynsketch.core import (
    EMPTY,
    HashValue,
    InsertionBatch,
    DeletionBatch,
    Permutation,
    Sketch,
    SparseBinaryVector,
    ValidationError,
    _as_hash,
)


def min_hash(vector: SparseBinaryVector, pi: Permutation) -> HashValue:
    """The minimum rank over the vector's support; EMPTY if there is none."""
    if vector.dim != pi.dim:
        raise ValidationError(
            f"vector dimension {vector.dim} != permutation dimension {pi.dim}"
        )
    if not vector.support:
        return EMPTY
    return int(pi.rank[vector.support_index() - 1].min())


def build_sketch(vector: SparseBinaryVector, perms) -> Sketch:
    """One :func:`min_hash` value per permutation."""
    perms = list(perms)
    if not perms:
        raise ValidationError("need at least one permutation")
    return Sketch(tuple(min_hash(vector, p) for p in perms))


def lift_hash(old_hash: HashValue, inserted_rank: int, bit: int) -> HashValue:
    """Update a hash for a single feature insertion.

    ``inserted_rank`` is the rank the insertion slot holds in the current
    permutation. A hash below it is untouched; otherwise an inserted 1
    becomes the new minimum and an inserted 0 just shifts the old minimum up
    by one. An EMPTY hash stays EMPTY unless the inserted bit is 1.
    """
    if bit not in (0, 1):
        raise ValidationError("bit must be 0 or 1")
    inserted_rank = int(inserted_rank)
    if inserted_rank < 1:
        raise ValidationError("inserted rank must be at least 1")
    old_hash = _as_hash(old_hash)
    if old_hash is EMPTY:
        return inserted_rank if bit == 1 else EMPTY
    if old_hash < inserted_rank:
        return old_hash
    if bit == 1:
        return inserted_rank
    return old_hash + 1


def partial_min_hash(pi: Permutation, positions, bits):
    """Minimum final rank among inserted bits equal to 1, or None if all are 0.

    After a batch insertion, inserted element i ends up with rank
    ``pi(positions[i])`` plus the number of inserted elements whose base rank
    is smaller: the insertion order of the batch puts each new element
    directly below the original element whose slot it took, so the inserted
    elements sort among themselves by base rank.
    """
    batch = InsertionBatch(tuple(positions), tuple(bits))
    batch.validate_for_dim(pi.dim)
    ones = np.fromiter(batch.bits, dtype=np.int64, count=len(batch)) == 1
    if not ones.any():
        return None
    base = pi.rank[np.fromiter(batch.positions, dtype=np.int64, count=len(batch)) - 1]
    smaller = np.empty(len(base), dtype=np.int64)
    smaller[np.argsort(base, kind="stable")] = np.arange(len(base))
    return int((base + smaller)[ones].min())


def multiple_lift_hash(old_hash: HashValue, pi: Permutation, positions, bits) -> HashValue:
    """Update a hash for a batch feature insertion.

    The surviving old minimum shifts up by the number of inserted base ranks
    at or below it; the result is the smaller of that and the best inserted
    1-bit rank from :func:`partial_min_hash`.
    """
    batch = InsertionBatch(tuple(positions), tuple(bits))
    batch.validate_for_dim(pi.dim)
    partial = partial_min_hash(pi, batch.positions, batch.bits)
    old_hash = _as_hash(old_hash)
    if old_hash is EMPTY:
        return EMPTY if partial is None else partial
    ranks = pi.rank[np.fromiter(batch.positions, dtype=np.int64, count=len(batch)) - 1]
    shifted = old_hash + int((ranks <= old_hash).sum())
    return shifted if partial is None else min(shifted, partial)


def drop_hash(
    old_hash: HashValue,
    vector: SparseBinaryVector,
    pi: Permutation,
    position: int,
) -> HashValue:
    """Update a hash for a single feature deletion.

    A hash below the deleted rank is untouched; above it, it slides down by
    one. When the deleted feature was itself the minimum, the next support
    bit is found by walking ranks upward through the inverse permutation.
    """
    if vector.dim != pi.dim:
        raise ValidationError(
            f"vector dimension {vector.dim} != permutation dimension {pi.dim}"
        )
    if not 1 <= position <= vector.dim:
        raise ValidationError(f"position {position} out of range 1..{vector.dim}")
    old_hash = _as_hash(old_hash)
    if old_hash is EMPTY:
        return EMPTY
    deleted_rank = pi.value_at(position)
    if old_hash < deleted_rank:
        return old_hash
    if old_hash > deleted_rank:
        return old_hash - 1
    members = set(vector.support)
    inverse = pi.inverse
    for r in range(deleted_rank + 1, vector.dim + 1):
        if int(inverse[r - 1]) in members:
            return r - 1
    return EMPTY


def multiple_drop_hash(
    old_hash: HashValue,
    vector: SparseBinaryVector,
    pi: Permutation,
    positions,
) -> HashValue:
    """Update a hash for a batch feature deletion.

    A surviving minimum slides down by the number of deleted ranks at or
    below it. If the minimum itself was deleted, the new minimum is the
    smallest surviving support rank, slid down by the deleted ranks below
    it; EMPTY when nothing survives.
    """
    if vector.dim != pi.dim:
        raise ValidationError(
            f"vector dimension {vector.dim} != permutation dimension {pi.dim}"
        )
    batch = DeletionBatch(tuple(positions))
    batch.validate_for_dim(vector.dim)
    old_hash = _as_hash(old_hash)
    if old_hash is EMPTY:
        return EMPTY
    idx = np.fromiter(batch.positions, dtype=np.int64, count=len(batch)) - 1
    deleted = np.sort(pi.rank[idx])
    below_eq = int(np.searchsorted(deleted, old_hash, side="right"))
    was_deleted = below_eq > 0 and int(deleted[below_eq - 1]) == old_hash
    if not was_deleted:
        return old_hash - below_eq
    support_ranks = pi.rank[vector.support_index() - 1]
    surviving = support_ranks[~np.isin(support_ranks, deleted)]
    if surviving.size == 0:
        return EMPTY
    new_min = int(surviving.min())
    return new_min - int(np.searchsorted(deleted, new_min, side="left"))


def update_sketch_insert(sk: Sketch, perms, batch: InsertionBatch) -> Sketch:
    """Apply :func:`multiple_lift_hash` to every slot of a sketch.

    The caller is responsible for lifting the permutations (lazily or on
    demand) before issuing further updates against the widened frame.
    """
    perms = list(perms)
    if len(perms) != sk.num_perms:
        raise ValidationError(
            f"sketch has {sk.num_perms} slots but {len(perms)} permutations given"
        )
    return Sketch(
        tuple(
            multiple_lift_hash(v, p, batch.positions, batch.bits)
            for v, p in zip(sk.values, perms)
        )
    )


def update_sketch_delete(
    sk: Sketch, perms, vector: SparseBinaryVector, batch: DeletionBatch
) -> Sketch:
    """Apply :func:`multiple_drop_hash` to every slot of a sketch."""
    perms = list(perms)
    if len(perms) != sk.num_perms:
        raise ValidationError(
            f"sketch has {sk.num_perms} slots but {len(perms)} permutations given"
        )
    return Sketch(
        tuple(
            multiple_drop_hash(v, vector, p, batch.positions)
            for v, p in zip(sk.values, perms)
        )
    )
