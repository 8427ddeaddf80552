"""Exact probability measures on [0,1]: piecewise-constant density plus atoms.

A measure is stored as a finite list of density pieces (half-open
interval, constant rational density) together with a finite list of
atoms (point, positive rational mass).  All masses are Fractions; the
total is exactly 1.  No floating point ever enters this layer.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Iterable, Sequence

from .sets import (CIRCLE, INTERVAL, ONE, ZERO, IntervalUnion, _as_fraction,
                   check_space, same_space)


class RationalMeasure:
    """An exact mixed measure: step density on [0,1) plus point masses.

    ``pieces`` are disjoint sorted (a, b, value) triples with value > 0;
    stretches of density zero are simply absent.  ``atoms`` are sorted
    (point, mass) pairs with distinct points; on the interval space an
    atom may sit at x = 1.
    """

    __slots__ = ("space", "pieces", "atoms")

    def __init__(self, space: str, pieces: Iterable[tuple] = (), atoms: Iterable[tuple] = ()):
        self.space = check_space(space)
        norm: list[tuple[Fraction, Fraction, Fraction]] = []
        for a, b, v in pieces:
            a, b, v = _as_fraction(a), _as_fraction(b), _as_fraction(v)
            if not (ZERO <= a < b <= ONE):
                raise ValueError(f"bad density piece [{a}, {b})")
            if v < 0:
                raise ValueError("negative density")
            if v > 0:
                norm.append((a, b, v))
        norm.sort()
        merged: list[tuple[Fraction, Fraction, Fraction]] = []
        for a, b, v in norm:
            if merged and a < merged[-1][1]:
                raise ValueError("overlapping density pieces")
            if merged and a == merged[-1][1] and v == merged[-1][2]:
                pa, _, pv = merged[-1]
                merged[-1] = (pa, b, pv)
            else:
                merged.append((a, b, v))
        self.pieces = tuple(merged)

        amap: dict[Fraction, Fraction] = {}
        for x, m in atoms:
            x, m = _as_fraction(x), _as_fraction(m)
            hi = ONE if self.space == INTERVAL else ONE  # circle: 1 ~ 0
            if self.space == CIRCLE:
                x = x % ONE
            if not (ZERO <= x <= hi):
                raise ValueError(f"atom at {x} outside the space")
            if m <= 0:
                raise ValueError("atom mass must be positive")
            amap[x] = amap.get(x, ZERO) + m
        self.atoms = tuple(sorted(amap.items()))

        if self.total_mass() != 1:
            raise ValueError(f"total mass is {self.total_mass()}, expected exactly 1")

    # -- constructors --------------------------------------------------

    @staticmethod
    def lebesgue(space: str = INTERVAL) -> "RationalMeasure":
        return RationalMeasure(space, [(ZERO, ONE, ONE)])

    @staticmethod
    def point_mass(space: str, x) -> "RationalMeasure":
        return RationalMeasure(space, [], [(x, ONE)])

    @staticmethod
    def unchecked(space: str, pieces, atoms) -> "RationalMeasure":
        """Internal fast path: inputs already normalized and mass 1."""
        m = object.__new__(RationalMeasure)
        m.space = space
        m.pieces = tuple(pieces)
        m.atoms = tuple(atoms)
        return m

    # -- queries --------------------------------------------------------

    def total_mass(self) -> Fraction:
        s = sum((v * (b - a) for a, b, v in self.pieces), ZERO)
        return s + sum((m for _, m in self.atoms), ZERO)

    def is_atomless(self) -> bool:
        return not self.atoms

    def __eq__(self, other) -> bool:
        return (isinstance(other, RationalMeasure) and self.space == other.space
                and self.pieces == other.pieces and self.atoms == other.atoms)

    def __hash__(self) -> int:
        return hash((self.space, self.pieces, self.atoms))

    def __repr__(self) -> str:
        return f"RationalMeasure({self.space}, pieces={list(self.pieces)}, atoms={list(self.atoms)})"

    def density_on_intervals(self) -> tuple:
        return self.pieces

    def measure_interval(self, a: Fraction, b: Fraction, *, closed_at_1: bool = False) -> Fraction:
        """mu([a, b)), optionally gluing the point 1 onto an interval ending there."""
        if a >= b:
            return ZERO
        total = ZERO
        i = bisect_right(self.pieces, (a, ONE + 1, ZERO)) - 1
        if i < 0:
            i = 0
        while i < len(self.pieces):
            pa, pb, v = self.pieces[i]
            if pa >= b:
                break
            lo, hi = max(pa, a), min(pb, b)
            if lo < hi:
                total += v * (hi - lo)
            i += 1
        lo_i = bisect_left(self.atoms, (a, ZERO))
        for x, m in self.atoms[lo_i:]:
            if x >= b:
                break
            total += m
        if closed_at_1 and b == ONE:
            j = bisect_left(self.atoms, (ONE, ZERO))
            if j < len(self.atoms) and self.atoms[j][0] == ONE:
                total += self.atoms[j][1]
        return total

    def measure_union(self, u: IntervalUnion) -> Fraction:
        """Exact mass of a half-open union; the point 1 follows the owning set."""
        total = ZERO
        for k, (a, b) in enumerate(u.ivs):
            last = k == len(u.ivs) - 1
            total += self.measure_interval(a, b, closed_at_1=last and b == ONE)
        return total

    def masses_on_cuts(self, cuts: Sequence[Fraction], labels: Sequence[int], k: int) -> list[Fraction]:
        """Masses of the k cells of a flat partition (cuts, labels).

        One linear sweep; exactly one cell receives each atom, with an
        atom at 1 going to the label of the last elementary interval.
        """
        out = [ZERO] * k
        for i, lab in enumerate(labels):
            out[lab] += self.measure_interval(cuts[i], cuts[i + 1])
        j = bisect_left(self.atoms, (ONE, ZERO))
        if j < len(self.atoms) and self.atoms[j][0] == ONE:
            out[labels[-1]] += self.atoms[j][1]
        return out

    def restrict_and_rescale(self, u: IntervalUnion) -> tuple["RationalMeasure", Fraction]:
        """Conditional measure mu(.|u): returns (mu restricted to u / c, c)."""
        c = self.measure_union(u)
        if c == 0:
            raise ValueError("cannot condition on a null set")
        pieces = []
        for a, b, v in self.pieces:
            inter = IntervalUnion.of(a, b).intersect(u)
            for lo, hi in inter.ivs:
                pieces.append((lo, hi, v / c))
        atoms = [(x, m / c) for x, m in self.atoms if u.contains_point(x)]
        return RationalMeasure(self.space, pieces, atoms), c

    def support_upper_density(self) -> Fraction:
        return max((v for _, _, v in self.pieces), default=ZERO)
