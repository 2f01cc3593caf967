"""Partitions of the grid [s] x [b] with three structural guarantees:
bounded group size, at most one cell per column per group, and a bound on
how many groups may meet any two columns simultaneously.

The workhorse constructor assigns, for every column j, its s cells to the
s lowest-indexed input sets containing j; all three guarantees are then
inherited from the set system.  Good parameters come from repeating an
affine-line design enough times that every point is covered s-fold.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .designs import affine_line_design, repeat_design
from .norms import BlockShape

__all__ = [
    "Partition",
    "PartitionReport",
    "partition_from_sets",
    "good_partition",
    "restrict",
    "verify_partition",
    "singleton_partition",
]

Cell = tuple[int, int]


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of the grid [s] x [b] by nonempty cell groups.

    r bounds every group size, l bounds the number of groups meeting any
    fixed pair of columns; both are certified bounds carried from the
    construction, verify_partition reports the observed values.  Empty
    groups are dropped from ``groups`` but counted in ``dropped_empty``
    since the dimension of the induced subspace counts nonempty groups
    only.
    """

    shape: BlockShape
    groups: tuple[tuple[Cell, ...], ...]
    r: int
    l: int
    dropped_empty: int = 0

    @property
    def m(self) -> int:
        return len(self.groups)

    def to_json_dict(self) -> dict:
        return {
            "s": self.shape.s,
            "b": self.shape.b,
            "m": self.m,
            "r": self.r,
            "l": self.l,
            "groups": [[[i, j] for (i, j) in g] for g in self.groups],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Partition":
        groups = tuple(tuple((int(i), int(j)) for i, j in g) for g in data["groups"])
        return cls(
            shape=BlockShape(int(data["s"]), int(data["b"])),
            groups=groups,
            r=int(data["r"]),
            l=int(data["l"]),
        )


def partition_from_sets(sets: Sequence[Sequence[int]], s: int, b: int) -> Partition:
    """Partition [s] x [b] by assigning column j's cells to the s
    lowest-indexed sets containing j.

    Requires every point of [b] to lie in at least s sets.  The certified
    r is the largest set size, the certified l the largest number of sets
    containing any single pair of points.
    """
    membership: list[list[int]] = [[] for _ in range(b)]
    for k, a in enumerate(sets):
        for j in a:
            if not 0 <= j < b:
                raise ValueError(f"set {k} contains point {j} outside [0, {b})")
            membership[j].append(k)

    for j in range(b):
        if len(membership[j]) < s:
            raise ValueError(
                f"point {j} lies in {len(membership[j])} sets, "
                f"but every point needs at least {s}"
            )

    groups: list[list[Cell]] = [[] for _ in sets]
    for j in range(b):
        chosen = membership[j][:s]
        for i, k in enumerate(chosen):
            groups[k].append((i, j))

    r_bound = max((len(a) for a in sets), default=0)
    pair_counts: Counter = Counter()
    for a in sets:
        for pair in combinations(sorted(set(a)), 2):
            pair_counts[pair] += 1
    l_bound = max(pair_counts.values(), default=0)

    nonempty = tuple(tuple(g) for g in groups if g)
    return Partition(
        shape=BlockShape(s, b),
        groups=nonempty,
        r=r_bound,
        l=l_bound,
        dropped_empty=len(sets) - len(nonempty),
    )


@lru_cache(maxsize=None)
def _good_partition_full(s: int, d: int, u: int) -> Partition:
    r = 2**u
    b_full = 2 ** (u * d)
    l = -(-(s * (r - 1)) // (b_full - 1))  # ceil
    rep = repeat_design(affine_line_design(r, d), l)
    return partition_from_sets(rep.sets, s, b_full)


def good_partition(s: int, b: int, d: int) -> Partition:
    """Partition of [s] x [b] (s >= b) with r between b^(1/d) and 2*b^(1/d).

    Routes through the smallest b' = 2^(u*d) >= b: builds the affine-line
    design on b' points with block size r = 2^u, repeats each set
    l = ceil(s*(r-1)/(b'-1)) times so every point is covered s-fold,
    partitions [s] x [b'], and restricts to the first b columns.
    """
    if d < 2:
        raise ValueError(f"dimension {d} must be at least 2")
    if b < 1:
        raise ValueError("b must be positive")
    if s < b:
        raise ValueError(
            f"s={s} < b={b}: this construction needs s >= b "
            "(group the columns first)"
        )
    if b == 1:
        groups = tuple(((i, 0),) for i in range(s))
        return Partition(BlockShape(s, 1), groups, r=1, l=0)

    u = 1
    while 2 ** (u * d) < b:
        u += 1
    full = _good_partition_full(s, d, u)
    return restrict(full, s, b)


def restrict(partition: Partition, s: int, b: int) -> Partition:
    """Induced partition of the sub-grid [s] x [b]; empties are dropped
    and the certified (r, l) bounds are carried over unchanged."""
    if not (1 <= s <= partition.shape.s and 1 <= b <= partition.shape.b):
        raise ValueError(
            f"restriction {s}x{b} not inside {partition.shape.s}x{partition.shape.b}"
        )
    if s == partition.shape.s and b == partition.shape.b:
        return partition
    groups = []
    dropped = partition.dropped_empty
    for g in partition.groups:
        kept = tuple((i, j) for (i, j) in g if i < s and j < b)
        if kept:
            groups.append(kept)
        else:
            dropped += 1
    return replace(
        partition,
        shape=BlockShape(s, b),
        groups=tuple(groups),
        dropped_empty=dropped,
    )


def singleton_partition(s: int, b: int) -> Partition:
    """Every cell its own group: r = 1, l = 0; the induced map is the identity."""
    shape = BlockShape(s, b)
    groups = tuple(((i, j),) for j in range(b) for i in range(s))
    return Partition(shape, groups, r=1, l=0)


@dataclass(frozen=True)
class PartitionReport:
    ok: bool
    r_observed: int
    l_observed: int
    cover_ok: bool
    violations: tuple[str, ...]


def verify_partition(partition: Partition) -> PartitionReport:
    """Exhaustive check of the cover and all three structural bounds.

    Intended for grids with at most 10^6 cells; the column-pair scan
    costs one counter update per pair of columns inside each group.
    """
    s, b = partition.shape.s, partition.shape.b
    if s * b > 10**6:
        raise ValueError("grid too large for exhaustive verification")

    violations = []
    seen = np.zeros(s * b, dtype=np.int64)
    r_observed = 0
    pair_counts: Counter = Counter()

    for k, g in enumerate(partition.groups):
        if not g:
            violations.append(f"group {k} is empty")
            continue
        r_observed = max(r_observed, len(g))
        cols = []
        for (i, j) in g:
            if not (0 <= i < s and 0 <= j < b):
                violations.append(f"group {k} has cell ({i}, {j}) outside the grid")
                continue
            seen[j * s + i] += 1
            cols.append(j)
        if len(set(cols)) != len(cols):
            violations.append(f"group {k} meets some column more than once")
        for pair in combinations(sorted(set(cols)), 2):
            pair_counts[pair] += 1

    cover_ok = bool((seen == 1).all())
    if not cover_ok:
        missing = int((seen == 0).sum())
        doubled = int((seen > 1).sum())
        violations.append(f"cover broken: {missing} cells missing, {doubled} duplicated")

    l_observed = max(pair_counts.values(), default=0)
    if r_observed > partition.r:
        violations.append(
            f"observed group size {r_observed} exceeds declared bound {partition.r}"
        )
    if l_observed > partition.l:
        violations.append(
            f"observed column sharing {l_observed} exceeds declared bound {partition.l}"
        )

    return PartitionReport(
        ok=not violations,
        r_observed=r_observed,
        l_observed=l_observed,
        cover_ok=cover_ok,
        violations=tuple(violations),
    )
