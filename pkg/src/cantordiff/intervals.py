"""Closed intervals with exact scalar endpoints and normalized disjoint unions.

Touching intervals merge: a union of closed images that meet end to end is
connected, which is the notion of coverage the difference-set analysis needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .scalars import Scalar


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi], lo <= hi (a point when equal)."""

    lo: Scalar
    hi: Scalar

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self}")

    @property
    def length(self) -> Scalar:
        return self.hi - self.lo

    def contains(self, x: Scalar) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def overlaps_interior(self, other: "Interval") -> bool:
        """True when the intersection has positive length."""
        return self.lo < other.hi and other.lo < self.hi

    def translate(self, c: Scalar) -> "Interval":
        return Interval(self.lo + c, self.hi + c)

    def scale(self, c: Scalar) -> "Interval":
        a, b = self.lo * c, self.hi * c
        return Interval(a, b) if c.sign() >= 0 else Interval(b, a)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


class IntervalSet:
    """Sorted union of pairwise disjoint, non-touching closed intervals."""

    __slots__ = ("parts",)

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.parts: tuple[Interval, ...] = self._normalize(intervals)

    @staticmethod
    def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
        items = sorted(intervals, key=lambda iv: iv.lo)
        merged: list[Interval] = []
        for iv in items:
            if merged and iv.lo <= merged[-1].hi:
                if iv.hi > merged[-1].hi:
                    merged[-1] = Interval(merged[-1].lo, iv.hi)
            else:
                merged.append(iv)
        return tuple(merged)

    # -- queries ---------------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def hull(self) -> Interval:
        if self.is_empty:
            raise ValueError("empty interval set has no hull")
        return Interval(self.parts[0].lo, self.parts[-1].hi)

    def total_length(self) -> Scalar:
        total = Scalar.rational(0)
        for iv in self.parts:
            total = total + iv.length
        return total

    def contains(self, x: Scalar) -> bool:
        return any(iv.contains(x) for iv in self.parts)

    def contains_interval(self, other: Interval) -> bool:
        return any(iv.contains_interval(other) for iv in self.parts)

    # -- algebra -----------------------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet((*self.parts, *other.parts))

    def translate(self, c: Scalar) -> "IntervalSet":
        return IntervalSet(iv.translate(c) for iv in self.parts)

    def scale(self, c: Scalar) -> "IntervalSet":
        return IntervalSet(iv.scale(c) for iv in self.parts)

    def complement_within(self, hull: Interval) -> "IntervalSet":
        """Closure of hull minus this set: the gap intervals."""
        gaps: list[Interval] = []
        cursor = hull.lo
        for iv in self.parts:
            if iv.hi < hull.lo or iv.lo > hull.hi:
                continue
            if iv.lo > cursor:
                gaps.append(Interval(cursor, iv.lo))
            if iv.hi > cursor:
                cursor = iv.hi
        if cursor < hull.hi:
            gaps.append(Interval(cursor, hull.hi))
        return IntervalSet(gaps)

    def __str__(self) -> str:
        return " u ".join(str(iv) for iv in self.parts) if self.parts else "{}"

    def __repr__(self) -> str:
        return f"IntervalSet({list(self.parts)!r})"


def open_union_components(intervals: Sequence[tuple[Scalar, Scalar]]) -> list[list[int]]:
    """Connected components of a union of OPEN intervals (a, b), a < b.

    Open intervals that merely touch do not connect.  Returns index groups in
    ascending order of left endpoint.  Degenerate inputs (a >= b) are ignored.
    """
    order = sorted(
        (i for i, (a, b) in enumerate(intervals) if a < b),
        key=lambda i: (intervals[i][0], intervals[i][1]),
    )
    components: list[list[int]] = []
    reach: Scalar | None = None
    for i in order:
        a, b = intervals[i]
        if reach is not None and a < reach:
            components[-1].append(i)
            if b > reach:
                reach = b
        else:
            components.append([i])
            reach = b
    return components
