"""Vectorized twins of the per-slot sketch operations.

The benchmark runner works on a (points x permutations) matrix of hash
values with 0 standing in for EMPTY. Every kernel here mirrors one of the
scalar update rules in :mod:`dynsketch.sketch` slot for slot; the test suite
asserts the equivalence, so a change to either side that breaks the other
fails loudly.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_left, insort
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from dynsketch.core import EMPTY, DeletionBatch, InsertionBatch, Sketch, ValidationError


@dataclass(frozen=True)
class SupportPack:
    """Supports of many points flattened for gather/reduceat kernels."""

    count: int
    dim: int
    arrays: tuple          # per-point 0-based index arrays
    flat: np.ndarray       # all supports concatenated
    lengths: np.ndarray    # per-point support sizes
    nonempty_rows: np.ndarray
    nonempty_starts: np.ndarray


def pack_supports(vectors) -> SupportPack:
    vectors = list(vectors)
    if not vectors:
        raise ValidationError("need at least one point")
    dim = vectors[0].dim
    arrays = []
    for v in vectors:
        if v.dim != dim:
            raise ValidationError("all points must share one dimension")
        arrays.append(v.support_index() - 1)
    lengths = np.fromiter((a.size for a in arrays), dtype=np.int64, count=len(arrays))
    flat = np.concatenate(arrays) if arrays else np.empty(0, dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(lengths)[:-1]])
    nonempty = np.nonzero(lengths > 0)[0]
    return SupportPack(
        count=len(arrays),
        dim=dim,
        arrays=tuple(arrays),
        flat=flat,
        lengths=lengths,
        nonempty_rows=nonempty,
        nonempty_starts=starts[nonempty],
    )


def sketch_matrix(pack: SupportPack, perms, threads: int = 1) -> np.ndarray:
    """(points x perms) matrix of min ranks; 0 marks an empty support."""
    perms = list(perms)
    out = np.zeros((pack.count, len(perms)), dtype=np.int64)

    def fill(j):
        vals = perms[j].rank[pack.flat]
        if vals.size:
            out[pack.nonempty_rows, j] = np.minimum.reduceat(
                vals, pack.nonempty_starts
            )

    if threads > 1 and len(perms) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(len(perms))))
    else:
        for j in range(len(perms)):
            fill(j)
    return out


def apply_batch_insert(h: np.ndarray, perms, batch: InsertionBatch) -> np.ndarray:
    """Matrix twin of :func:`dynsketch.sketch.multiple_lift_hash`."""
    out = np.empty_like(h)
    pos_idx = np.fromiter(batch.positions, dtype=np.int64, count=len(batch)) - 1
    ones = np.fromiter(batch.bits, dtype=np.int64, count=len(batch)) == 1
    any_ones = bool(ones.any())
    for j, perm in enumerate(perms):
        base = perm.rank[pos_idx]
        ordered = np.sort(base)
        col = h[:, j]
        shifted = col + np.searchsorted(ordered, col, side="right")
        if any_ones:
            smaller = np.empty(base.size, dtype=np.int64)
            smaller[np.argsort(base, kind="stable")] = np.arange(base.size)
            best_inserted = int((base + smaller)[ones].min())
            out[:, j] = np.where(
                col == 0, best_inserted, np.minimum(shifted, best_inserted)
            )
        else:
            out[:, j] = np.where(col == 0, 0, shifted)
    return out


def apply_sequential_insert(h: np.ndarray, perms, batch: InsertionBatch) -> np.ndarray:
    """One lift_hash application per batch entry, oldest position first.

    The rank each insertion takes in the current (already widened) frame is
    its base rank plus the number of earlier-inserted base ranks below it.
    """
    out = h.copy()
    for j, perm in enumerate(perms):
        col = out[:, j]
        earlier: list[int] = []
        for m, b in zip(batch.positions, batch.bits):
            w = int(perm.rank[m - 1])
            a = w + bisect_left(earlier, w)
            if b == 1:
                col[:] = np.where((col == 0) | (col >= a), a, col)
            else:
                col[:] = np.where((col == 0) | (col < a), col, col + 1)
            insort(earlier, w)
    return out


def apply_batch_delete(
    h: np.ndarray, pack: SupportPack, perms, batch: DeletionBatch
) -> np.ndarray:
    """Matrix twin of :func:`dynsketch.sketch.multiple_drop_hash`."""
    out = np.empty_like(h)
    pos_idx = np.fromiter(batch.positions, dtype=np.int64, count=len(batch)) - 1
    for j, perm in enumerate(perms):
        deleted = np.sort(perm.rank[pos_idx])
        col = h[:, j]
        below_eq = np.searchsorted(deleted, col, side="right")
        hit = (below_eq > 0) & (deleted[np.maximum(below_eq - 1, 0)] == col)
        new = np.where(col == 0, 0, col - below_eq)
        for row in np.nonzero(hit)[0]:
            ranks = perm.rank[pack.arrays[row]]
            surviving = ranks[~np.isin(ranks, deleted)]
            if surviving.size == 0:
                new[row] = 0
            else:
                v = int(surviving.min())
                new[row] = v - int(np.searchsorted(deleted, v, side="left"))
        out[:, j] = new
    return out


def apply_sequential_delete(
    h: np.ndarray, pack: SupportPack, perms, batch: DeletionBatch
) -> np.ndarray:
    """One drop_hash application per batch entry, oldest position first."""
    out = h.copy()
    dpos = np.fromiter(batch.positions, dtype=np.int64, count=len(batch)) - 1
    for j, perm in enumerate(perms):
        col = out[:, j]
        removed: list[int] = []  # deleted ranks in the original frame, sorted
        for i, m in enumerate(batch.positions):
            w = int(perm.rank[m - 1])
            a = w - bisect_left(removed, w)
            hit_rows = np.nonzero(col == a)[0]
            col[:] = np.where((col == 0) | (col < a), col, col - 1)
            insort(removed, w)
            for row in hit_rows:
                sup = pack.arrays[row]
                surviving = sup[~np.isin(sup, dpos[: i + 1])]
                if surviving.size == 0:
                    col[row] = 0
                else:
                    ranks = perm.rank[surviving]
                    v = int(ranks.min())
                    col[row] = v - bisect_left(removed, v)
    return out


def pairwise_true_jaccard(pack: SupportPack) -> tuple[np.ndarray, np.ndarray]:
    """Condensed (i < j) exact Jaccard plus a both-supports-empty mask."""
    p = pack.count
    if pack.dim > 0 and pack.flat.size > 0:
        indptr = np.concatenate([[0], np.cumsum(pack.lengths)])
        mat = sparse.csr_matrix(
            (np.ones(pack.flat.size, dtype=np.int64), pack.flat, indptr),
            shape=(p, pack.dim),
        )
        inter = np.asarray((mat @ mat.T).todense(), dtype=np.int64)
    else:
        inter = np.zeros((p, p), dtype=np.int64)
    sizes = pack.lengths
    union = sizes[:, None] + sizes[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        jac = np.where(union > 0, inter / np.maximum(union, 1), 0.0)
    rows, cols = np.triu_indices(p, k=1)
    both_empty = (sizes[rows] == 0) & (sizes[cols] == 0)
    return jac[rows, cols], both_empty


def pairwise_estimates(h: np.ndarray) -> np.ndarray:
    """Condensed (i < j) collision-fraction estimates from a hash matrix."""
    p = h.shape[0]
    chunks = []
    for i in range(p - 1):
        row = h[i]
        rest = h[i + 1 :]
        collisions = ((rest == row) & (row != 0)).sum(axis=1)
        comparable = (~((rest == 0) & (row == 0))).sum(axis=1)
        chunks.append(
            np.where(comparable > 0, collisions / np.maximum(comparable, 1), 0.0)
        )
    if not chunks:
        return np.empty(0, dtype=np.float64)
    return np.concatenate(chunks)


def rmse_condensed(estimates: np.ndarray, truth: np.ndarray, include: np.ndarray) -> float:
    """RMSE over the included pairs; NaN when nothing is included."""
    if estimates.shape != truth.shape or estimates.shape != include.shape:
        raise ValidationError("estimate/truth/include shapes must match")
    kept = include.sum()
    if kept == 0:
        return float("nan")
    diff = estimates[include] - truth[include]
    return float(np.sqrt(np.mean(diff * diff)))


def sketch_digest(h: np.ndarray) -> str:
    """Stable fingerprint of a hash matrix, for slot-identity checks."""
    payload = repr(h.shape).encode("ascii") + np.ascontiguousarray(h).tobytes()
    return hashlib.md5(payload).hexdigest()


def matrix_row_to_sketch(h: np.ndarray, row: int) -> Sketch:
    """Convert one matrix row back to a Sketch (0 becomes EMPTY)."""
    return Sketch(tuple(EMPTY if v == 0 else int(v) for v in h[row]))
