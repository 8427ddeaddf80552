"""Finite measurable partitions on [0,1] and their entropy calculus.

A partition is stored flat: a global sorted cut list
0 = c_0 < c_1 < ... < c_M = 1 together with a cell label per elementary
interval [c_i, c_{i+1}).  A cell is then a finite union of half-open
intervals; the point 1 belongs to the cell of the last elementary
interval.  This representation makes joins and refinement checks a
single merge sweep, exact in rational arithmetic.

Entropy values are assembled in floating point (math.fsum over exact
rational masses); everything combinatorial stays exact.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .measures import RationalMeasure
from .sets import (INTERVAL, ONE, ZERO, IntervalUnion, _as_fraction,
                   check_space, same_space)


def _log(x: float, base) -> float:
    if base in (None, "e", math.e):
        return math.log(x)
    if base == 2 or base == "2":
        return math.log2(x)
    return math.log(x) / math.log(float(base))


class IntervalSetPartition:
    """A finite exact partition of [0,1) into unions of half-open intervals."""

    __slots__ = ("space", "cuts", "labels", "names")

    def __init__(self, space: str, cuts: Sequence[Fraction], labels: Sequence[int],
                 names: Optional[Sequence[str]] = None):
        self.space = check_space(space)
        cuts = tuple(_as_fraction(c) for c in cuts)
        labels = tuple(labels)
        if len(cuts) < 2 or cuts[0] != ZERO or cuts[-1] != ONE:
            raise ValueError("cuts must run from 0 to 1")
        if any(cuts[i] >= cuts[i + 1] for i in range(len(cuts) - 1)):
            raise ValueError("cuts must be strictly increasing")
        if len(labels) != len(cuts) - 1:
            raise ValueError("need one label per elementary interval")
        k = max(labels) + 1
        if sorted(set(labels)) != list(range(k)):
            raise ValueError("labels must be 0..k-1, each occurring")
        # canonical form: drop cuts separating equal labels
        new_cuts = [cuts[0]]
        new_labels = []
        for i, lab in enumerate(labels):
            if new_labels and new_labels[-1] == lab:
                new_cuts[-1] = cuts[i + 1]
            else:
                new_labels.append(lab)
                new_cuts.append(cuts[i + 1])
        self.cuts = tuple(new_cuts)
        self.labels = tuple(new_labels)
        if names is not None:
            names = tuple(names)
            if len(names) != k:
                raise ValueError("need one name per cell")
        self.names = names

    # -- constructors ---------------------------------------------------

    @staticmethod
    def trivial(space: str = INTERVAL) -> "IntervalSetPartition":
        return IntervalSetPartition(space, (ZERO, ONE), (0,))

    @staticmethod
    def from_cut_points(space: str, points: Iterable) -> "IntervalSetPartition":
        """Cells are the consecutive intervals between the given points."""
        pts = sorted({_as_fraction(p) for p in points} | {ZERO, ONE})
        return IntervalSetPartition(space, pts, range(len(pts) - 1))

    @staticmethod
    def equal_cells(space: str, k: int) -> "IntervalSetPartition":
        if k < 1:
            raise ValueError("need at least one cell")
        cuts = [Fraction(i, k) for i in range(k + 1)]
        return IntervalSetPartition(space, cuts, range(k))

    @staticmethod
    def from_cells(space: str, cells: Sequence[IntervalUnion],
                   names: Optional[Sequence[str]] = None) -> "IntervalSetPartition":
        """Build from explicit cell unions; verifies disjoint and exhaustive."""
        marks: list[tuple[Fraction, Fraction, int]] = []
        for idx, cell in enumerate(cells):
            if not cell:
                raise ValueError(f"cell {idx} is empty")
            for a, b in cell.ivs:
                marks.append((a, b, idx))
        marks.sort()
        cuts = [ZERO]
        labels = []
        cursor = ZERO
        for a, b, idx in marks:
            if a != cursor:
                raise ValueError(f"cells leave a gap or overlap near {cursor}")
            labels.append(idx)
            cuts.append(b)
            cursor = b
        if cursor != ONE:
            raise ValueError("cells do not cover the space")
        return IntervalSetPartition(space, cuts, labels, names)

    # -- queries ----------------------------------------------------------

    @property
    def cell_count(self) -> int:
        return max(self.labels) + 1

    def cell(self, i: int) -> IntervalUnion:
        pairs = [(self.cuts[j], self.cuts[j + 1])
                 for j, lab in enumerate(self.labels) if lab == i]
        return IntervalUnion(pairs)

    def cells(self) -> list[IntervalUnion]:
        return [self.cell(i) for i in range(self.cell_count)]

    def cell_of_point(self, x) -> int:
        x = _as_fraction(x)
        if x == ONE:
            return self.labels[-1]
        from bisect import bisect_right
        j = bisect_right(self.cuts, x) - 1
        return self.labels[min(j, len(self.labels) - 1)]

    def masses(self, mu: RationalMeasure) -> list[Fraction]:
        same_space(self.space, mu.space)
        return mu.masses_on_cuts(self.cuts, self.labels, self.cell_count)

    def __repr__(self) -> str:
        return f"IntervalSetPartition({self.space}, {self.cell_count} cells)"

    def same_cells(self, other: "IntervalSetPartition") -> bool:
        """Equality as set families, ignoring cell order and names."""
        if self.space != other.space or self.cuts != other.cuts:
            return False
        if len(self.labels) != len(other.labels):
            return False
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        for a, b in zip(self.labels, other.labels):
            if fwd.setdefault(a, b) != b or bwd.setdefault(b, a) != a:
                return False
        return True


# -- the calculus -------------------------------------------------------


def join(p: IntervalSetPartition, q: IntervalSetPartition) -> IntervalSetPartition:
    """Common refinement: cells are the nonempty intersections P_i n Q_j.

    Implemented as a global breakpoint merge; output cells are numbered
    by first appearance left to right, which makes the result canonical.
    """
    same_space(p.space, q.space)
    cuts, pairs = _merge_labelled(p, q)
    ids: dict[tuple[int, int], int] = {}
    labels = []
    for pr in pairs:
        if pr not in ids:
            ids[pr] = len(ids)
        labels.append(ids[pr])
    return IntervalSetPartition(p.space, cuts, labels)


def join_all(parts: Sequence[IntervalSetPartition]) -> IntervalSetPartition:
    if not parts:
        raise ValueError("need at least one partition")
    out = parts[0]
    for q in parts[1:]:
        out = join(out, q)
    return out


def _merge_labelled(p: IntervalSetPartition, q: IntervalSetPartition):
    """Merged cut list plus the (p-label, q-label) pair on each piece."""
    cuts = [ZERO]
    pairs = []
    i = j = 0
    while i < len(p.labels) and j < len(q.labels):
        pairs.append((p.labels[i], q.labels[j]))
        pe, qe = p.cuts[i + 1], q.cuts[j + 1]
        nxt = min(pe, qe)
        cuts.append(nxt)
        if pe == nxt:
            i += 1
        if qe == nxt:
            j += 1
    return cuts, pairs


def is_finer(p: IntervalSetPartition, q: IntervalSetPartition) -> bool:
    """True iff every cell of p is exactly contained in a cell of q."""
    same_space(p.space, q.space)
    _, pairs = _merge_labelled(p, q)
    seen: dict[int, int] = {}
    for pl, ql in pairs:
        if seen.setdefault(pl, ql) != ql:
            return False
    return True


def equal_mod_null(p: IntervalSetPartition, q: IntervalSetPartition,
                   mu: RationalMeasure) -> bool:
    """Cell families agree up to mu-null symmetric differences."""
    same_space(p.space, q.space)
    cuts, pairs = _merge_labelled(p, q)
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    for idx, (pl, ql) in enumerate(pairs):
        if mu.measure_interval(cuts[idx], cuts[idx + 1],
                               closed_at_1=(cuts[idx + 1] == ONE)) == 0:
            continue
        if fwd.setdefault(pl, ql) != ql or bwd.setdefault(ql, pl) != pl:
            return False
    return True


def partition_entropy(mu: RationalMeasure, p: IntervalSetPartition, base="e") -> float:
    """H_mu(P) = -sum mu(P_i) log mu(P_i), with 0 log 0 = 0."""
    terms = []
    for m in p.masses(mu):
        if m > 0:
            mf = float(m)
            terms.append(-mf * _log(mf, base))
    return math.fsum(terms)


def conditional_entropy(mu: RationalMeasure, p: IntervalSetPartition,
                        q: IntervalSetPartition, base="e") -> float:
    """H_mu(P|Q); conditioning cells of mass zero are skipped."""
    same_space(p.space, q.space)
    same_space(p.space, mu.space)
    cuts, pairs = _merge_labelled(p, q)
    joint: dict[tuple[int, int], Fraction] = {}
    for idx, pr in enumerate(pairs):
        m = mu.measure_interval(cuts[idx], cuts[idx + 1],
                                closed_at_1=(cuts[idx + 1] == ONE))
        if m > 0:
            joint[pr] = joint.get(pr, ZERO) + m
    qmass: dict[int, Fraction] = {}
    for (pl, ql), m in joint.items():
        qmass[ql] = qmass.get(ql, ZERO) + m
    terms = []
    for (pl, ql), m in sorted(joint.items()):
        ratio = m / qmass[ql]
        if ratio != 1:
            terms.append(-float(m) * _log(float(ratio), base))
    return math.fsum(terms)


# -- sequences ----------------------------------------------------------


class PartitionSequence:
    """A finitely presented rule n -> partition (1-based), with a cache.

    Presentations: a constant partition, a prefix plus periodic tail, or
    an arbitrary deterministic generator function.  A declared cell-count
    bound, when present, is checked on every materialized index.
    """

    def __init__(self, rule: Callable[[int], IntervalSetPartition], *,
                 space: str, bound: Optional[int] = None,
                 prefix_len: int = 0, period: Optional[int] = None,
                 description: str = ""):
        self._rule = rule
        self.space = check_space(space)
        self.bound = bound
        self.prefix_len = prefix_len
        self.period = period  # None when the presentation is not periodic
        self.description = description
        self._cache: dict[int, IntervalSetPartition] = {}
        self._lock = threading.Lock()

    @staticmethod
    def constant(p: IntervalSetPartition, description: str = "") -> "PartitionSequence":
        return PartitionSequence(lambda n: p, space=p.space, bound=p.cell_count,
                                 prefix_len=0, period=1,
                                 description=description or "constant")

    @staticmethod
    def periodic(prefix: Sequence[IntervalSetPartition],
                 cycle: Sequence[IntervalSetPartition],
                 description: str = "") -> "PartitionSequence":
        if not cycle:
            raise ValueError("cycle must be nonempty")
        prefix = list(prefix)
        cycle = list(cycle)
        space = (prefix + cycle)[0].space
        for p in prefix + cycle:
            same_space(space, p.space)

        def rule(n: int) -> IntervalSetPartition:
            if n <= len(prefix):
                return prefix[n - 1]
            return cycle[(n - len(prefix) - 1) % len(cycle)]

        bound = max(p.cell_count for p in prefix + cycle)
        return PartitionSequence(rule, space=space, bound=bound,
                                 prefix_len=len(prefix), period=len(cycle),
                                 description=description or "periodic")

    @staticmethod
    def from_function(fn: Callable[[int], IntervalSetPartition], space: str,
                      bound: Optional[int] = None, description: str = "") -> "PartitionSequence":
        return PartitionSequence(fn, space=space, bound=bound,
                                 description=description or "rule")

    @staticmethod
    def from_list(parts: Sequence[IntervalSetPartition],
                  description: str = "") -> "PartitionSequence":
        """Explicit finite presentation; indices beyond the list raise."""
        parts = list(parts)

        def rule(n: int) -> IntervalSetPartition:
            if n > len(parts):
                raise IndexError(f"partition sequence only defined up to n={len(parts)}")
            return parts[n - 1]

        return PartitionSequence(rule, space=parts[0].space,
                                 bound=max(p.cell_count for p in parts),
                                 description=description or "explicit list")

    def at(self, n: int) -> IntervalSetPartition:
        if n < 1:
            raise ValueError("indices are 1-based")
        with self._lock:
            hit = self._cache.get(n)
        if hit is not None:
            return hit
        p = self._rule(n)
        same_space(self.space, p.space)
        if self.bound is not None and p.cell_count > self.bound:
            raise ValueError(
                f"declared cell bound {self.bound} violated at n={n} "
                f"({p.cell_count} cells)")
        with self._lock:
            self._cache[n] = p
        return p

    def is_eventually_periodic(self) -> bool:
        return self.period is not None


def rokhlin_distance(mu_seq, p_seq: PartitionSequence, q_seq: PartitionSequence,
                     horizon: int, base="e") -> float:
    """Finite-horizon Rokhlin distance between partition sequences.

    sup_{n<=horizon} H(P_n|Q_n) + sup_{n<=horizon} H(Q_n|P_n); a lower
    bound for the true sup-metric, and exact when both sequences and the
    measures are eventually periodic with prefix+period <= horizon.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    a = b = 0.0
    for n in range(1, horizon + 1):
        mu = mu_seq.at(n)
        a = max(a, conditional_entropy(mu, p_seq.at(n), q_seq.at(n), base))
        b = max(b, conditional_entropy(mu, q_seq.at(n), p_seq.at(n), base))
    return a + b
