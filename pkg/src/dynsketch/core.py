"""Domain types for sparse binary vectors, permutations, and minwise sketches.

All positions and ranks are 1-based at the API boundary. "Position" names a
feature slot of a vector, "rank" names the value a permutation assigns to a
position. The distinguished hash value EMPTY marks the sketch slot of a
vector with no support.

Everything here is an immutable value; the operations are pure functions and
safe to call concurrently.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np


class ValidationError(ValueError):
    """An input violated a documented precondition."""


class _EmptyHash:
    """Singleton marker for the hash of a vector with empty support."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "EMPTY"


EMPTY = _EmptyHash()

HashValue = int | _EmptyHash


def _as_positions(positions, what: str = "position") -> tuple[int, ...]:
    """Coerce and check a strictly increasing, 1-based position sequence."""
    out = []
    prev = 0
    for p in positions:
        if not isinstance(p, (int, np.integer)):
            raise ValidationError(f"{what} {p!r} is not an integer")
        p = int(p)
        if p <= prev:
            if p < 1:
                raise ValidationError(f"{what} {p} must be at least 1")
            raise ValidationError(
                f"{what}s must be strictly increasing (got {p} after {prev})"
            )
        out.append(p)
        prev = p
    return tuple(out)


@dataclass(frozen=True)
class SparseBinaryVector:
    """A point in {0,1}^dim stored as its dimension plus sorted 1-positions."""

    dim: int
    support: tuple[int, ...] = ()

    def __post_init__(self):
        dim = int(self.dim)
        if dim < 0:
            raise ValidationError("dimension must be non-negative")
        support = _as_positions(self.support, "support index")
        if support and support[-1] > dim:
            raise ValidationError(
                f"support index {support[-1]} exceeds dimension {dim}"
            )
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "support", support)

    @classmethod
    def from_dense(cls, bits) -> "SparseBinaryVector":
        """Build from a dense 0/1 sequence, e.g. [1, 0, 0, 1]."""
        bits = list(bits)
        if any(b not in (0, 1) for b in bits):
            raise ValidationError("dense entries must be 0 or 1")
        return cls(len(bits), tuple(i + 1 for i, b in enumerate(bits) if b == 1))

    def to_dense(self) -> list[int]:
        dense = [0] * self.dim
        for s in self.support:
            dense[s - 1] = 1
        return dense

    def support_index(self) -> np.ndarray:
        """The support as a 0-based numpy index array."""
        return np.fromiter(self.support, dtype=np.int64, count=len(self.support))


class Permutation:
    """A bijection on {1..dim}; ``rank[i - 1]`` is the rank given to position i."""

    def __init__(self, rank):
        arr = np.array(rank, dtype=np.int64, copy=True)
        if arr.ndim != 1:
            raise ValidationError("rank must be a flat sequence")
        dim = int(arr.size)
        if dim:
            if int(arr.min()) < 1 or int(arr.max()) > dim:
                raise ValidationError(f"ranks must lie in 1..{dim}")
            if int(np.bincount(arr, minlength=dim + 1)[1:].max()) > 1:
                raise ValidationError("ranks must not repeat")
        arr.setflags(write=False)
        self.rank = arr
        self.dim = dim
        self._inverse = None

    def value_at(self, position: int) -> int:
        """The rank assigned to a 1-based position."""
        if not 1 <= position <= self.dim:
            raise ValidationError(f"position {position} out of range 1..{self.dim}")
        return int(self.rank[position - 1])

    @property
    def inverse(self) -> np.ndarray:
        """Lookup table: ``inverse[r - 1]`` is the 1-based position holding rank r."""
        if self._inverse is None:
            inv = np.empty(self.dim, dtype=np.int64)
            inv[self.rank - 1] = np.arange(1, self.dim + 1)
            inv.setflags(write=False)
            self._inverse = inv
        return self._inverse

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.rank)

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.rank, other.rank))

    def __hash__(self):
        return hash((self.dim, self.rank.tobytes()))

    def __repr__(self):
        return f"Permutation({list(self.as_tuple())})"


def _as_hash(value) -> HashValue:
    if value is EMPTY:
        return EMPTY
    if isinstance(value, (int, np.integer)):
        v = int(value)
        if v < 1:
            raise ValidationError(f"hash value {v} must be at least 1 or EMPTY")
        return v
    raise ValidationError(f"{value!r} is not a hash value")


@dataclass(frozen=True)
class Sketch:
    """K minwise hash values for one point, entry j taken under permutation j."""

    values: tuple

    def __post_init__(self):
        values = tuple(_as_hash(v) for v in self.values)
        if not values:
            raise ValidationError("a sketch needs at least one slot")
        object.__setattr__(self, "values", values)

    @property
    def num_perms(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class InsertionBatch:
    """Sorted distinct positions to insert, with the bit value for each.

    Positions are expressed in the pre-insertion frame; processing them in
    ascending order, insertion i lands at index ``positions[i] + i`` of the
    widened vector (0-based i).
    """

    positions: tuple[int, ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        positions = _as_positions(self.positions)
        bits = tuple(int(b) for b in self.bits)
        if not positions:
            raise ValidationError("batch must contain at least one position")
        if len(bits) != len(positions):
            raise ValidationError("positions and bits must have equal length")
        if any(b not in (0, 1) for b in bits):
            raise ValidationError("bits must be 0 or 1")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.positions)

    def validate_for_dim(self, dim: int) -> None:
        if self.positions[-1] > dim:
            raise ValidationError(
                f"position {self.positions[-1]} out of range for dimension {dim}"
            )


@dataclass(frozen=True)
class DeletionBatch:
    """Sorted distinct positions to delete, in the pre-deletion frame."""

    positions: tuple[int, ...]

    def __post_init__(self):
        positions = _as_positions(self.positions)
        if not positions:
            raise ValidationError("batch must contain at least one position")
        object.__setattr__(self, "positions", positions)

    def __len__(self) -> int:
        return len(self.positions)

    def validate_for_dim(self, dim: int) -> None:
        if self.positions[-1] > dim:
            raise ValidationError(
                f"position {self.positions[-1]} out of range for dimension {dim}"
            )


def insert_features(vector: SparseBinaryVector, batch: InsertionBatch) -> SparseBinaryVector:
    """Widen a vector by one slot per batch entry.

    An old feature at position j moves right by the number of batch positions
    at or below j; inserted bit i (ascending order) lands at position
    ``positions[i] + i`` (0-based i) and contributes to the support iff its
    bit is 1.
    """
    batch.validate_for_dim(vector.dim)
    positions = batch.positions
    shifted = [j + bisect_right(positions, j) for j in vector.support]
    new_ones = [m + i for i, (m, b) in enumerate(zip(positions, batch.bits)) if b == 1]
    merged = sorted(shifted + new_ones)
    return SparseBinaryVector(vector.dim + len(batch), tuple(merged))


def delete_features(vector: SparseBinaryVector, batch: DeletionBatch) -> SparseBinaryVector:
    """Remove the batch positions; surviving position j moves left by the
    number of deleted positions below j."""
    batch.validate_for_dim(vector.dim)
    positions = batch.positions
    deleted = set(positions)
    survivors = [
        j - bisect_left(positions, j) for j in vector.support if j not in deleted
    ]
    return SparseBinaryVector(vector.dim - len(batch), tuple(survivors))
