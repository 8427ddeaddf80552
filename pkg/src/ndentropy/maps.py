"""Piecewise-linear self-maps of [0,1] and the circle, with exact
preimage, pullback, pushforward, and transfer-operator machinery.

A map is a list of affine pieces over breakpoints
0 = x_0 < ... < x_m = 1, each piece (slope, intercept) acting on
[x_i, x_{i+1}).  Maps are right-continuous at interior breakpoints; the
point x = 1 is evaluated with the last piece.  Circle maps are stored as
lifts and evaluated mod 1; their normal form splits pieces at integer
crossings and shifts intercepts so representations are canonical.

All arithmetic in this module is exact rational arithmetic.  The one
systematic concession is that set images and preimages are normalized
into the half-open algebra of ``sets.IntervalUnion``, which can move a
finite number of boundary points; this never changes the mass of an
atomless measure, and atoms are always transported pointwise.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .measures import RationalMeasure
from .partitions import IntervalSetPartition
from .sets import (CIRCLE, INTERVAL, ONE, ZERO, IntervalUnion, _as_fraction,
                   check_space, point_distance, same_space)


class UnsupportedMapError(ValueError):
    """Raised when an operation requires structure the map lacks."""


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


class PiecewiseLinearMap:
    """An exact piecewise-affine map of the interval or circle."""

    __slots__ = ("space", "cuts", "pieces")

    def __init__(self, space: str, cuts: Sequence, pieces: Sequence[tuple]):
        self.space = check_space(space)
        cuts = [_as_fraction(c) for c in cuts]
        pieces = [(_as_fraction(s), _as_fraction(t)) for s, t in pieces]
        if len(cuts) < 2 or cuts[0] != ZERO or cuts[-1] != ONE:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(cuts[i] >= cuts[i + 1] for i in range(len(cuts) - 1)):
            raise ValueError("breakpoints must be strictly increasing")
        if len(pieces) != len(cuts) - 1:
            raise ValueError("need one affine piece per breakpoint gap")
        if self.space == INTERVAL:
            for (a, b), (s, t) in zip(zip(cuts, cuts[1:]), pieces):
                for v in (s * a + t, s * b + t):
                    if not (ZERO <= v <= ONE):
                        raise ValueError(
                            f"piece on [{a}, {b}) maps outside [0, 1] (value {v})")
        else:
            cuts, pieces = _circle_normal_form(cuts, pieces)
        # merge adjacent pieces with identical affine formulas
        ncuts = [cuts[0]]
        npieces: list[tuple[Fraction, Fraction]] = []
        for i, pc in enumerate(pieces):
            if npieces and npieces[-1] == pc:
                ncuts[-1] = cuts[i + 1]
            else:
                npieces.append(pc)
                ncuts.append(cuts[i + 1])
        self.cuts = tuple(ncuts)
        self.pieces = tuple(npieces)

    # -- basic queries ---------------------------------------------------

    @property
    def piece_count(self) -> int:
        return len(self.pieces)

    def lipschitz_constant(self) -> Fraction:
        return max(abs(s) for s, _ in self.pieces)

    def min_abs_slope(self) -> Fraction:
        return min(abs(s) for s, _ in self.pieces)

    def has_flat_piece(self) -> bool:
        return any(s == 0 for s, _ in self.pieces)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PiecewiseLinearMap) and self.space == other.space
                and self.cuts == other.cuts and self.pieces == other.pieces)

    def __hash__(self) -> int:
        return hash((self.space, self.cuts, self.pieces))

    def __repr__(self) -> str:
        return f"PiecewiseLinearMap({self.space}, {self.piece_count} pieces)"

    def piece_index_at(self, x: Fraction) -> int:
        if x == ONE:
            return len(self.pieces) - 1
        return min(bisect_right(self.cuts, x) - 1, len(self.pieces) - 1)

    def evaluate(self, x) -> Fraction:
        """Exact image of a point; right-continuous at breakpoints."""
        x = _as_fraction(x)
        if self.space == CIRCLE:
            x = x % ONE
        elif not (ZERO <= x <= ONE):
            raise ValueError(f"point {x} outside [0, 1]")
        s, t = self.pieces[self.piece_index_at(x)]
        v = s * x + t
        return v % ONE if self.space == CIRCLE else v

    def __call__(self, x) -> Fraction:
        return self.evaluate(x)

    def is_continuous(self) -> bool:
        """Continuity as a map of the space (mod 1 on the circle)."""
        for i in range(1, len(self.pieces)):
            c = self.cuts[i]
            sl, tl = self.pieces[i - 1]
            sr, tr = self.pieces[i]
            gap = (sl * c + tl) - (sr * c + tr)
            if self.space == CIRCLE:
                if gap.denominator != 1:
                    return False
            elif gap != 0:
                return False
        if self.space == CIRCLE:
            s0, t0 = self.pieces[0]
            s1, t1 = self.pieces[-1]
            gap = (s1 * ONE + t1) - t0
            if gap.denominator != 1:
                return False
        return True

    def is_monotone_bijection(self) -> bool:
        """Strictly monotone continuous self-bijection of the interval."""
        if self.space != INTERVAL or self.has_flat_piece():
            return False
        signs = {s > 0 for s, _ in self.pieces}
        if len(signs) != 1 or not self.is_continuous():
            return False
        ends = sorted([self.evaluate(ZERO), self.evaluate(ONE)])
        return ends == [ZERO, ONE]

    # -- set-level operations ---------------------------------------------

    def preimage_union(self, target: IntervalUnion) -> IntervalUnion:
        """Exact f^{-1}(target) in the half-open algebra."""
        out: list[tuple[Fraction, Fraction]] = []
        for i, (s, t) in enumerate(self.pieces):
            a, b = self.cuts[i], self.cuts[i + 1]
            if s == 0:
                v = t % ONE if self.space == CIRCLE else t
                if target.contains_point(v):
                    out.append((a, b))
                continue
            va, vb = s * a + t, s * b + t
            lo_v, hi_v = min(va, vb), max(va, vb)
            if self.space == CIRCLE:
                kmin, kmax = _floor(lo_v), _floor(hi_v) + 1
            else:
                kmin = kmax = 0
            for k in range(kmin, kmax + 1):
                for c, d in target.ivs:
                    ck, dk = c + k, d + k
                    if s > 0:
                        lo, hi = (ck - t) / s, (dk - t) / s
                    else:
                        lo, hi = (dk - t) / s, (ck - t) / s
                    lo, hi = max(lo, a), min(hi, b)
                    if lo < hi:
                        out.append((lo, hi))
        return IntervalUnion(out)

    def image_union(self, u: IntervalUnion) -> IntervalUnion:
        """Exact forward image in the half-open algebra (no flat pieces)."""
        out: list[tuple[Fraction, Fraction]] = []
        for i, (s, t) in enumerate(self.pieces):
            a, b = self.cuts[i], self.cuts[i + 1]
            piece_dom = IntervalUnion.of(a, b).intersect(u)
            for lo, hi in piece_dom.ivs:
                if s == 0:
                    raise UnsupportedMapError(
                        "forward image of a set under a flat piece is a point")
                va, vb = s * lo + t, s * hi + t
                vlo, vhi = (va, vb) if s > 0 else (vb, va)
                if self.space == CIRCLE:
                    k = _floor(vlo)
                    while k < vhi:
                        seg_lo = max(vlo, Fraction(k)) - k
                        seg_hi = min(vhi, Fraction(k + 1)) - k
                        if seg_lo < seg_hi:
                            out.append((seg_lo, seg_hi))
                        k += 1
                else:
                    if vhi > ONE:  # only possible as the unattained endpoint 1
                        vhi = ONE
                    out.append((vlo, min(vhi, ONE)))
        return IntervalUnion(out)

    def pullback_partition(self, p: IntervalSetPartition) -> IntervalSetPartition:
        """Partition with cells f^{-1}(P_i); empty preimages are dropped."""
        same_space(self.space, p.space)
        cells = []
        for i in range(p.cell_count):
            pre = self.preimage_union(p.cell(i))
            if pre:
                cells.append(pre)
        return IntervalSetPartition.from_cells(self.space, cells)


def _circle_normal_form(cuts, pieces):
    """Split circle pieces at integer crossings, reduce intercepts mod 1."""
    ncuts = [ZERO]
    npieces = []
    for i, (s, t) in enumerate(pieces):
        a, b = cuts[i], cuts[i + 1]
        if s == 0:
            ncuts.append(b)
            npieces.append((s, t % ONE))
            continue
        va, vb = s * a + t, s * b + t
        lo_v, hi_v = min(va, vb), max(va, vb)
        crossings = []
        k = _floor(lo_v) + 1
        while k < hi_v:
            x = (Fraction(k) - t) / s
            if a < x < b:
                crossings.append(x)
            k += 1
        crossings.sort()
        xs = [a] + crossings + [b]
        for lo, hi in zip(xs, xs[1:]):
            mid = (lo + hi) / 2
            shift = _floor(s * mid + t)
            ncuts.append(hi)
            npieces.append((s, t - shift))
    return ncuts, npieces


# -- named constructors ----------------------------------------------------


def identity_map(space: str = INTERVAL) -> PiecewiseLinearMap:
    return PiecewiseLinearMap(space, (ZERO, ONE), ((ONE, ZERO),))


def constant_map(space: str, c) -> PiecewiseLinearMap:
    return PiecewiseLinearMap(space, (ZERO, ONE), ((ZERO, _as_fraction(c)),))


def tent_map() -> PiecewiseLinearMap:
    return PiecewiseLinearMap(INTERVAL, (ZERO, Fraction(1, 2), ONE),
                              ((Fraction(2), ZERO), (Fraction(-2), Fraction(2))))


def doubling_map() -> PiecewiseLinearMap:
    return PiecewiseLinearMap(CIRCLE, (ZERO, ONE), ((Fraction(2), ZERO),))


def times_k_mod1_map(k: int) -> PiecewiseLinearMap:
    return PiecewiseLinearMap(CIRCLE, (ZERO, ONE), ((Fraction(k), ZERO),))


def affine_map(space: str, a, b) -> PiecewiseLinearMap:
    return PiecewiseLinearMap(space, (ZERO, ONE), ((_as_fraction(a), _as_fraction(b)),))


def mirror_map() -> PiecewiseLinearMap:
    return affine_map(INTERVAL, -1, 1)


def valley_map() -> PiecewiseLinearMap:
    """x -> |2x - 1|, the mirror conjugate of the tent map."""
    return PiecewiseLinearMap(INTERVAL, (ZERO, Fraction(1, 2), ONE),
                              ((Fraction(-2), ONE), (Fraction(2), -ONE)))


def polyline_map(space: str, points: Sequence[tuple]) -> PiecewiseLinearMap:
    """Continuous map through the given (x, y) vertices."""
    pts = [(_as_fraction(x), _as_fraction(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("a polyline needs at least two vertices")
    cuts = [x for x, _ in pts]
    pieces = []
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x1 <= x0:
            raise ValueError("polyline x-coordinates must increase")
        s = (y1 - y0) / (x1 - x0)
        pieces.append((s, y0 - s * x0))
    return PiecewiseLinearMap(space, cuts, pieces)


def glued_double_tent_map() -> PiecewiseLinearMap:
    """Two scaled tents, one on [0,1/2) onto itself and one on [1/2,1]."""
    h = Fraction(1, 2)
    return PiecewiseLinearMap(
        INTERVAL,
        (ZERO, Fraction(1, 4), h, Fraction(3, 4), ONE),
        ((Fraction(2), ZERO), (Fraction(-2), ONE),
         (Fraction(2), -h), (Fraction(-2), Fraction(5, 2))))


# -- composition ------------------------------------------------------------


def compose(f: PiecewiseLinearMap, g: PiecewiseLinearMap) -> PiecewiseLinearMap:
    """Exact representation of f o g (apply g first).

    Agrees with pointwise evaluation everywhere except possibly at the
    finitely many points where a decreasing piece of g meets a breakpoint
    of f, where the right-continuous convention is re-applied.
    """
    same_space(f.space, g.space)
    circle = f.space == CIRCLE
    cuts: list[Fraction] = [ZERO]
    pieces: list[tuple[Fraction, Fraction]] = []
    for i, (s, t) in enumerate(g.pieces):
        a, b = g.cuts[i], g.cuts[i + 1]
        if s == 0:
            v = g.evaluate(a)
            cuts.append(b)
            pieces.append((ZERO, f.evaluate(v)))
            continue
        va, vb = s * a + t, s * b + t
        lo_v, hi_v = min(va, vb), max(va, vb)
        targets: list[Fraction] = []
        if circle:
            k0 = _floor(lo_v)
            k = k0
            while k < hi_v + 1:
                for bp in f.cuts[:-1]:
                    targets.append(bp + k)
                k += 1
        else:
            targets.extend(f.cuts[1:-1])
        splits = []
        for y in targets:
            if lo_v < y < hi_v:
                x = (y - t) / s
                if a < x < b:
                    splits.append(x)
        xs = [a] + sorted(set(splits)) + [b]
        for lo, hi in zip(xs, xs[1:]):
            mid = (lo + hi) / 2
            y_mid = s * mid + t
            k = _floor(y_mid) if circle else 0
            sf, tf = f.pieces[f.piece_index_at(y_mid - k)]
            cuts.append(hi)
            pieces.append((sf * s, sf * (t - k) + tf))
    return PiecewiseLinearMap(f.space, cuts, pieces)


def compose_chain(maps: Sequence[PiecewiseLinearMap], *, mode: str = "auto",
                  materialize_limit: int = 12):
    """Compose maps[n-1] o ... o maps[0].

    mode "materialize" builds the exact composite map eagerly;
    "iterate" returns a ComposedChain applying the steps one at a time
    (breakpoint counts of eager composites grow multiplicatively, so
    iterate is the default above ``materialize_limit`` steps).
    """
    if not maps:
        raise ValueError("need at least one map")
    if mode == "auto":
        mode = "materialize" if len(maps) <= materialize_limit else "iterate"
    if mode == "materialize":
        out = maps[0]
        for m in maps[1:]:
            out = compose(m, out)
        return out
    if mode == "iterate":
        return ComposedChain(maps)
    raise ValueError(f"unknown composition mode {mode!r}")


class ComposedChain:
    """Lazy composition: applies its maps step by step, never materializing."""

    __slots__ = ("maps", "space")

    def __init__(self, maps: Sequence[PiecewiseLinearMap]):
        self.maps = tuple(maps)
        self.space = maps[0].space
        for m in maps:
            same_space(self.space, m.space)

    def evaluate(self, x) -> Fraction:
        for m in self.maps:
            x = m.evaluate(x)
        return x

    def preimage_union(self, target: IntervalUnion) -> IntervalUnion:
        for m in reversed(self.maps):
            target = m.preimage_union(target)
        return target

    def image_union(self, u: IntervalUnion) -> IntervalUnion:
        for m in self.maps:
            u = m.image_union(u)
        return u


# -- measures through maps ---------------------------------------------------


def _flatten_density(contribs: Iterable[tuple[Fraction, Fraction, Fraction]]):
    """Sum possibly-overlapping (a, b, density) contributions exactly."""
    events: dict[Fraction, Fraction] = {}
    for a, b, v in contribs:
        if a < b and v != 0:
            events[a] = events.get(a, ZERO) + v
            events[b] = events.get(b, ZERO) - v
    cuts = sorted(events)
    out = []
    level = ZERO
    for i, c in enumerate(cuts):
        level += events[c]
        if i + 1 < len(cuts) and level != 0:
            out.append((c, cuts[i + 1], level))
    return out


def pushforward_measure(f: PiecewiseLinearMap, mu: RationalMeasure) -> RationalMeasure:
    """Exact pushforward f* mu; flat pieces and atoms become atoms."""
    same_space(f.space, mu.space)
    dens: list[tuple[Fraction, Fraction, Fraction]] = []
    atoms: dict[Fraction, Fraction] = {}

    def add_atom(x: Fraction, m: Fraction):
        atoms[x] = atoms.get(x, ZERO) + m

    for i, (s, t) in enumerate(f.pieces):
        a, b = f.cuts[i], f.cuts[i + 1]
        for pa, pb, v in mu.pieces:
            lo, hi = max(a, pa), min(b, pb)
            if lo >= hi:
                continue
            if s == 0:
                add_atom(f.evaluate(lo), v * (hi - lo))
                continue
            va, vb = s * lo + t, s * hi + t
            vlo, vhi = (va, vb) if s > 0 else (vb, va)
            w = v / abs(s)
            if f.space == CIRCLE:
                k = _floor(vlo)
                while k < vhi:
                    seg_lo = max(vlo, Fraction(k))
                    seg_hi = min(vhi, Fraction(k + 1))
                    if seg_lo < seg_hi:
                        dens.append((seg_lo - k, seg_hi - k, w))
                    k += 1
            else:
                dens.append((vlo, min(vhi, ONE), w))
    for x, m in mu.atoms:
        add_atom(f.evaluate(x), m)
    return RationalMeasure(f.space, _flatten_density(dens), sorted(atoms.items()))


class StepDensity:
    """A piecewise-constant rational density with full coverage of [0,1)."""

    __slots__ = ("space", "pieces")

    def __init__(self, space: str, pieces: Iterable[tuple]):
        self.space = check_space(space)
        norm = sorted((_as_fraction(a), _as_fraction(b), _as_fraction(v))
                      for a, b, v in pieces if _as_fraction(a) < _as_fraction(b))
        merged: list[tuple[Fraction, Fraction, Fraction]] = []
        cursor = ZERO
        for a, b, v in norm:
            if v < 0:
                raise ValueError("densities are nonnegative")
            if a != cursor:
                raise ValueError(f"density pieces leave a gap or overlap at {cursor}")
            if merged and merged[-1][2] == v:
                pa, _, pv = merged[-1]
                merged[-1] = (pa, b, pv)
            else:
                merged.append((a, b, v))
            cursor = b
        if cursor != ONE:
            raise ValueError("density pieces must cover [0, 1)")
        self.pieces = tuple(merged)

    @staticmethod
    def uniform(space: str = INTERVAL) -> "StepDensity":
        return StepDensity(space, [(ZERO, ONE, ONE)])

    def integral(self) -> Fraction:
        return sum((v * (b - a) for a, b, v in self.pieces), ZERO)

    def min_value(self) -> Fraction:
        return min(v for _, _, v in self.pieces)

    def max_value(self) -> Fraction:
        return max(v for _, _, v in self.pieces)

    def strictly_positive(self) -> bool:
        return self.min_value() > 0

    def as_measure(self) -> RationalMeasure:
        return RationalMeasure(self.space, self.pieces, [])

    def value_at(self, x) -> Fraction:
        x = _as_fraction(x) % ONE if self.space == CIRCLE else _as_fraction(x)
        if x == ONE:
            return self.pieces[-1][2]
        for a, b, v in self.pieces:
            if a <= x < b:
                return v
        raise ValueError(f"point {x} outside [0, 1]")

    def l1_distance(self, other: "StepDensity") -> Fraction:
        """Exact integral of |self - other|."""
        cuts = sorted({c for a, b, _ in self.pieces for c in (a, b)}
                      | {c for a, b, _ in other.pieces for c in (a, b)})
        total = ZERO
        for lo, hi in zip(cuts, cuts[1:]):
            total += abs(self.value_at(lo) - other.value_at(lo)) * (hi - lo)
        return total

    def __eq__(self, other) -> bool:
        return (isinstance(other, StepDensity) and self.space == other.space
                and self.pieces == other.pieces)

    def __hash__(self) -> int:
        return hash((self.space, self.pieces))

    def __repr__(self) -> str:
        return f"StepDensity({self.space}, {list(self.pieces)})"


def transfer_density(f: PiecewiseLinearMap, phi: StepDensity) -> StepDensity:
    """Perron-Frobenius action: the exact density of the pushforward of
    phi dm, i.e. sum over branches y of phi(y)/|f'(y)| at each preimage."""
    same_space(f.space, phi.space)
    if f.has_flat_piece():
        raise UnsupportedMapError("transfer operator needs locally invertible pieces")
    if phi.integral() != 1:
        raise ValueError("transfer operator acts on probability densities")
    pushed = pushforward_measure(f, phi.as_measure())
    pieces = list(pushed.pieces)
    # fill uncovered stretches with density zero (f need not be surjective)
    full = []
    cursor = ZERO
    for a, b, v in pieces:
        if cursor < a:
            full.append((cursor, a, ZERO))
        full.append((a, b, v))
        cursor = b
    if cursor < ONE:
        full.append((cursor, ONE, ZERO))
    return StepDensity(f.space, full)


@dataclass(frozen=True)
class DensityDiagnostic:
    """Ratio-oscillation diagnostic for membership in a D_L class.

    ``ratio_lipschitz`` bounds |phi(x)/phi(y) - 1| / d(x,y) over all
    pairs at distance exactly ``scale``; step densities are not
    Lipschitz, so the scale-free supremum is infinite whenever the
    density has a genuine jump (``unbounded_below_scale`` then flags
    that shrinking the scale blows the bound up).
    """
    min_value: Fraction
    max_value: Fraction
    positive: bool
    scale: Fraction
    ratio_lipschitz: Optional[Fraction]
    unbounded_below_scale: bool
    failure: Optional[str] = None


def density_ratio_diagnostic(phi: StepDensity, epsilon_check) -> DensityDiagnostic:
    eps = _as_fraction(epsilon_check)
    if eps <= 0:
        raise ValueError("epsilon_check must be positive")
    lo, hi = phi.min_value(), phi.max_value()
    if lo <= 0:
        return DensityDiagnostic(lo, hi, False, eps, None, False,
                                 failure="density is not strictly positive")
    worst = ZERO
    pieces = phi.pieces
    for i, (ai, bi, vi) in enumerate(pieces):
        for j, (aj, bj, vj) in enumerate(pieces):
            if _pieces_admit_pair_at_distance(phi.space, (ai, bi), (aj, bj), eps):
                worst = max(worst, abs(vi / vj - 1))
    has_jump = len({v for _, _, v in pieces}) > 1
    min_width = min(b - a for a, b, _ in pieces)
    return DensityDiagnostic(
        lo, hi, True, eps, worst / eps,
        unbounded_below_scale=has_jump and eps < min_width)


def _pieces_admit_pair_at_distance(space: str, p, q, eps: Fraction) -> bool:
    """Is there x in p, y in q with d(x, y) == eps (half-open pieces)?"""
    (a, b), (c, d) = p, q
    shifts = (eps, -eps)
    if space == CIRCLE:
        shifts = (eps, -eps, eps - ONE, ONE - eps)
    for sft in shifts:
        lo, hi = max(a + sft, c), min(b + sft, d)
        if lo < hi:
            return True
    return False
