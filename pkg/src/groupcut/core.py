"""Instance and partition primitives.

A problem instance is a symmetric distance matrix over ``n`` items.  A
solution assigns every item a group label; its cost is the sum of distances
over unordered item pairs sharing a group.  Group labels carry no meaning,
so comparisons between partitions go through a canonical first-occurrence
relabeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .validation import check_distance_array, check_labels

__all__ = [
    "DistanceMatrix",
    "FixedSizes",
    "VariableCount",
    "GroupSpec",
    "Partition",
    "partition_cost",
    "insertion_cost",
    "removal_gain",
    "canonicalize",
    "validate_partition",
    "group_members",
]


@dataclass(frozen=True)
class FixedSizes:
    """Prescribed group sizes; the k-th size is the capacity of the k-th seeded group."""

    sizes: tuple[int, ...]

    def __init__(self, sizes: Iterable[int]):
        object.__setattr__(self, "sizes", tuple(int(s) for s in sizes))
        if not self.sizes:
            raise ValueError("at least one group size is required")
        if any(s < 1 for s in self.sizes):
            raise ValueError(f"group sizes must be positive, got {self.sizes}")

    @property
    def p(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)


@dataclass(frozen=True)
class VariableCount:
    """A bare group count; every group must be non-empty but sizes are free."""

    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"group count must be positive, got {self.p}")


GroupSpec = Union[FixedSizes, VariableCount]


def check_spec(spec: GroupSpec, n_items: int) -> None:
    """Raise if the spec is infeasible for an instance with ``n_items`` items."""
    if isinstance(spec, FixedSizes):
        if spec.n != n_items:
            raise ValueError(f"group sizes sum to {spec.n}, expected {n_items}")
    elif isinstance(spec, VariableCount):
        if not 1 <= spec.p <= n_items:
            raise ValueError(f"group count {spec.p} out of range 1..{n_items}")
    else:
        raise TypeError(f"not a group spec: {spec!r}")


class DistanceMatrix:
    """Symmetric nonnegative cost table with a zero diagonal.

    Integer input is stored as ``int64`` and all derived costs stay exact
    integers; any float input is stored as ``float64``.
    """

    __slots__ = ("values", "n", "is_integral")

    def __init__(self, values):
        arr, integral = check_distance_array(values)
        self.values = arr
        self.values.setflags(write=False)
        self.n = arr.shape[0]
        self.is_integral = integral

    @classmethod
    def from_text(cls, text: str) -> "DistanceMatrix":
        """Parse the matrix text format: first line ``n``, then ``n`` rows."""
        tokens = text.split()
        if not tokens:
            raise ValueError("empty matrix document")
        n = int(tokens[0])
        body = tokens[1:]
        if len(body) != n * n:
            raise ValueError(f"expected {n * n} entries for n={n}, got {len(body)}")
        integral = all(_is_int_token(t) for t in body)
        dtype = np.int64 if integral else np.float64
        arr = np.array([int(t) if integral else float(t) for t in body], dtype=dtype)
        return cls(arr.reshape(n, n))

    def to_text(self) -> str:
        lines = [str(self.n)]
        for row in self.values:
            lines.append(" ".join(_format_entry(v) for v in row))
        return "\n".join(lines) + "\n"

    def __repr__(self):
        kind = "int" if self.is_integral else "float"
        return f"DistanceMatrix(n={self.n}, {kind})"


def _is_int_token(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def _format_entry(v) -> str:
    return str(int(v)) if np.issubdtype(type(v), np.integer) else repr(float(v))


class Partition:
    """Assignment of each item to a group label in ``0..p-1``."""

    __slots__ = ("labels", "p")

    def __init__(self, labels, p: int | None = None):
        arr = check_labels(labels)
        if arr.shape[0] == 0:
            raise ValueError("partition must cover at least one item")
        if arr.min() < 0:
            raise ValueError("labels must be nonnegative")
        self.labels = arr
        self.labels.setflags(write=False)
        self.p = int(arr.max()) + 1 if p is None else int(p)
        if self.p < 1 or arr.max() >= self.p:
            raise ValueError(f"labels must lie in 0..{self.p - 1}")

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @classmethod
    def from_text(cls, text: str, p: int | None = None) -> "Partition":
        """Parse the partition text format: one line of space-separated labels."""
        return cls([int(t) for t in text.split()], p=p)

    def to_text(self) -> str:
        return " ".join(str(int(v)) for v in self.labels) + "\n"

    def __eq__(self, other):
        return (
            isinstance(other, Partition)
            and self.p == other.p
            and np.array_equal(self.labels, other.labels)
        )

    def __hash__(self):
        return hash((self.p, self.labels.tobytes()))

    def __repr__(self):
        return f"Partition({self.labels.tolist()}, p={self.p})"


def group_members(part: Partition, k: int) -> np.ndarray:
    """Indices of the items assigned to group ``k``."""
    return np.flatnonzero(part.labels == k)


def _check_pair(matrix: DistanceMatrix, part: Partition) -> None:
    if part.n != matrix.n:
        raise ValueError(f"partition covers {part.n} items, matrix has {matrix.n}")


def partition_cost(matrix: DistanceMatrix, part: Partition):
    """Sum of distances over unordered same-group pairs.

    Exact ``int`` for integral matrices, ``float`` otherwise.
    """
    _check_pair(matrix, part)
    d = matrix.values
    total = 0
    for k in range(part.p):
        members = np.flatnonzero(part.labels == k)
        if members.shape[0] >= 2:
            block = d[np.ix_(members, members)]
            total = total + block.sum()
    if matrix.is_integral:
        return int(total) // 2
    return float(total) / 2.0


def insertion_cost(matrix: DistanceMatrix, members, item: int):
    """Objective increase from adding ``item`` to the group holding ``members``."""
    members = np.asarray(list(members), dtype=np.int64)
    if np.any(members == item):
        raise ValueError(f"item {item} already belongs to the group")
    if members.shape[0] == 0:
        return 0 if matrix.is_integral else 0.0
    total = matrix.values[item, members].sum()
    return int(total) if matrix.is_integral else float(total)


def removal_gain(matrix: DistanceMatrix, members, item: int):
    """Objective decrease from removing ``item`` from the group holding ``members``."""
    members = np.asarray(list(members), dtype=np.int64)
    if not np.any(members == item):
        raise ValueError(f"item {item} is not in the group")
    others = members[members != item]
    if others.shape[0] == 0:
        return 0 if matrix.is_integral else 0.0
    total = matrix.values[item, others].sum()
    return int(total) if matrix.is_integral else float(total)


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel groups in first-occurrence order (restricted-growth form)."""
    labels = np.asarray(labels, dtype=np.int64)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first, kind="stable"), kind="stable")
    return rank[inverse].astype(np.int64)


def canonicalize(part: Partition) -> Partition:
    """Canonical form of a partition; idempotent and relabel-invariant."""
    return Partition(canonical_labels(part.labels), p=part.p)


def validate_partition(part: Partition, spec: GroupSpec, n_items: int) -> list[str]:
    """Check a partition against a group spec; returns a list of violations.

    An empty list means the partition is valid.  Fixed sizes are compared as
    a multiset since group labels are interchangeable.
    """
    violations: list[str] = []
    if part.n != n_items:
        violations.append(f"partition covers {part.n} items, expected {n_items}")
        return violations
    p = spec.p if isinstance(spec, VariableCount) else len(spec.sizes)
    if part.p != p:
        violations.append(f"partition declares {part.p} groups, spec has {p}")
    bad = np.flatnonzero((part.labels < 0) | (part.labels >= p))
    for i in bad:
        violations.append(f"item {int(i)} has out-of-range label {int(part.labels[i])}")
    if bad.shape[0]:
        return violations
    counts = np.bincount(part.labels, minlength=p)
    if isinstance(spec, VariableCount):
        for k in np.flatnonzero(counts == 0):
            violations.append(f"group {int(k)} is empty")
    else:
        got = sorted(int(c) for c in counts)
        want = sorted(spec.sizes)
        if got != want:
            for slot, (g, w) in enumerate(zip(got, want)):
                if g != w:
                    violations.append(f"group size {g} where {w} expected (slot {slot})")
    return violations
