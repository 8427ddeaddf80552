"""Exact set algebra on the unit interval and circle.

Everything downstream (measures, partitions, map preimages) is built on
finite unions of half-open rational intervals [a, b) with
0 <= a < b <= 1.  Working in this algebra keeps every set operation a
finite exact computation on Fractions; the only points it cannot
distinguish are the interval endpoints themselves, which carry no mass
for the atomless part of any measure.

Conventions:
  * The carrier set is [0, 1).  On the interval space the point 1 is
    glued to whichever set owns an interval with right endpoint 1
    (``owns_right_endpoint``); on the circle, 1 = 0.
  * Adjacent intervals are always merged, so two IntervalUnions are
    equal as objects iff they are equal as subsets of [0, 1).
"""
from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Sequence

INTERVAL = "interval"
CIRCLE = "circle"

ZERO = Fraction(0)
ONE = Fraction(1)


class SpaceMismatchError(ValueError):
    """Raised when two objects live on different space kinds."""


def check_space(kind: str) -> str:
    if kind not in (INTERVAL, CIRCLE):
        raise ValueError(f"unknown space kind: {kind!r}")
    return kind


def same_space(a: str, b: str) -> str:
    if a != b:
        raise SpaceMismatchError(f"space mismatch: {a} vs {b}")
    return a


def space_diameter(kind: str) -> Fraction:
    return ONE if kind == INTERVAL else Fraction(1, 2)


def point_distance(kind: str, x: Fraction, y: Fraction) -> Fraction:
    """Exact metric: |x-y| on the interval, arc distance on the circle."""
    d = abs(x - y)
    if kind == CIRCLE:
        return min(d, ONE - d)
    return d


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class IntervalUnion:
    """A finite union of half-open intervals [a, b) inside [0, 1).

    Instances are immutable and normalized: intervals are sorted,
    pairwise disjoint, and never adjacent (touching intervals merge).
    """

    __slots__ = ("ivs",)

    def __init__(self, pairs: Iterable[tuple[Fraction, Fraction]] = (), *, _normalized=False):
        if _normalized:
            self.ivs = tuple(pairs)
            return
        cleaned = []
        for a, b in pairs:
            a, b = _as_fraction(a), _as_fraction(b)
            if not (ZERO <= a and b <= ONE):
                raise ValueError(f"interval [{a}, {b}) leaves [0, 1]")
            if a < b:
                cleaned.append((a, b))
        cleaned.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for a, b in cleaned:
            if merged and a <= merged[-1][1]:
                pa, pb = merged[-1]
                if b > pb:
                    merged[-1] = (pa, b)
            else:
                merged.append((a, b))
        self.ivs = tuple(merged)

    # -- constructors -------------------------------------------------

    @staticmethod
    def empty() -> "IntervalUnion":
        return _EMPTY

    @staticmethod
    def full() -> "IntervalUnion":
        return _FULL

    @staticmethod
    def of(a, b) -> "IntervalUnion":
        return IntervalUnion([(_as_fraction(a), _as_fraction(b))])

    # -- basic queries ------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.ivs)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalUnion) and self.ivs == other.ivs

    def __hash__(self) -> int:
        return hash(self.ivs)

    def __repr__(self) -> str:
        body = " u ".join(f"[{a}, {b})" for a, b in self.ivs) or "{}"
        return f"IntervalUnion({body})"

    def length(self) -> Fraction:
        """Total Lebesgue length, an exact rational."""
        return sum((b - a for a, b in self.ivs), ZERO)

    def owns_right_endpoint(self) -> bool:
        """True if some interval ends at 1 (the set then owns the point 1)."""
        return bool(self.ivs) and self.ivs[-1][1] == ONE

    def contains_point(self, x: Fraction) -> bool:
        """Membership of x in [0, 1]; x = 1 uses the right-endpoint glue."""
        x = _as_fraction(x)
        if x == ONE:
            return self.owns_right_endpoint()
        i = bisect_right(self.ivs, (x, ONE + 1))
        if i:
            a, b = self.ivs[i - 1]
            if a <= x < b:
                return True
        return False

    def boundary_points(self) -> tuple[Fraction, ...]:
        out = []
        for a, b in self.ivs:
            out.append(a)
            out.append(b)
        return tuple(out)

    # -- set algebra ----------------------------------------------------

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.ivs + other.ivs)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        i = j = 0
        A, B = self.ivs, other.ivs
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo < hi:
                out.append((lo, hi))
            if A[i][1] <= B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion(out, _normalized=True)

    def difference(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        j = 0
        B = other.ivs
        for a, b in self.ivs:
            cur = a
            while j < len(B) and B[j][1] <= cur:
                j += 1
            k = j
            while k < len(B) and B[k][0] < b:
                if B[k][0] > cur:
                    out.append((cur, B[k][0]))
                cur = max(cur, B[k][1])
                if cur >= b:
                    break
                k += 1
            if cur < b:
                out.append((cur, b))
        return IntervalUnion(out)

    def complement(self) -> "IntervalUnion":
        return _FULL.difference(self)

    def is_subset(self, other: "IntervalUnion") -> bool:
        return not self.difference(other)

    def isdisjoint(self, other: "IntervalUnion") -> bool:
        return not self.intersect(other)

    def translate_mod1(self, t: Fraction) -> "IntervalUnion":
        """Rotation x -> x + t (mod 1); used for circle arcs."""
        t = _as_fraction(t) % ONE
        out = []
        for a, b in self.ivs:
            a, b = a + t, b + t
            if b <= ONE:
                out.append((a, b))
            elif a >= ONE:
                out.append((a - ONE, b - ONE))
            else:
                out.append((a, ONE))
                out.append((ZERO, b - ONE))
        return IntervalUnion(out)


_EMPTY = IntervalUnion([])
_FULL = IntervalUnion([(ZERO, ONE)])


def union_all(parts: Sequence[IntervalUnion]) -> IntervalUnion:
    pairs: list[tuple[Fraction, Fraction]] = []
    for p in parts:
        pairs.extend(p.ivs)
    return IntervalUnion(pairs)


def gap_between(kind: str, u: IntervalUnion, v: IntervalUnion) -> Fraction:
    """Exact infimum distance between two disjoint nonempty unions.

    Treats the intervals as their closures, which is what separation
    certificates need (cores are closed sets).
    """
    if not u.ivs or not v.ivs:
        raise ValueError("gap_between needs nonempty sets")
    best = None
    for a, b in u.ivs:
        for c, d in v.ivs:
            if b <= c:
                g = c - b
            elif d <= a:
                g = a - d
            else:
                g = ZERO
            if kind == CIRCLE:
                g = min(g, ONE - (max(b, d) - min(a, c)))
                if g < ZERO:
                    g = ZERO
            if best is None or g < best:
                best = g
    return best
