"""Topological entropy of nonautonomous systems via separated/spanning
sets on exact rational grids, and via sequences of interval covers with
Lebesgue-number control.

Orbits are computed exactly; the counting kernels scale every orbit to a
common integer denominator so separation tests are integer comparisons
(vectorized, with a first-coordinate window to prune candidates).  Grid
counts bound the true quantities one-sidedly; the estimators therefore
target the exponential growth *rate* of the counts, reported as the
trailing maximum of per-step log-count increments, with the raw
(1/n) log count column emitted alongside in every table.
"""
from __future__ import annotations

import math
import threading
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .maps import PiecewiseLinearMap
from .sets import (CIRCLE, INTERVAL, ONE, ZERO, _as_fraction, check_space,
                   point_distance, same_space, space_diameter)
from .systems import CertificateError, SystemSequence

NEG = Fraction(-1)   # sentinel: relatively open at 0 (no left constraint)
TWO = Fraction(2)    # sentinel: relatively open at 1 (no right constraint)


# -- orbit grids ---------------------------------------------------------------


class OrbitGrid:
    """An exact rational grid together with orbit prefixes of its points.

    Interval grids include both endpoints 0 and 1; circle grids exclude 1.
    Orbit columns are grown lazily and shared between estimator calls.
    """

    def __init__(self, sys: SystemSequence, step):
        self.sys = sys
        self.step = _as_fraction(step)
        if self.step <= 0 or (ONE / self.step).denominator != 1:
            raise ValueError("grid step must be a positive rational dividing 1")
        n = int(ONE / self.step)
        last = n + 1 if sys.space == INTERVAL else n
        self.points = [self.step * i for i in range(last)]
        self._columns: list[list[Fraction]] = [list(self.points)]
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.points)

    def orbit_columns(self, depth: int) -> list[list[Fraction]]:
        """Columns j = 0..depth-1 with entries f_1^j(x) per grid point."""
        with self._lock:
            while len(self._columns) < depth:
                j = len(self._columns)
                f = self.sys.map_at(j)
                self._columns.append([f.evaluate(x) for x in self._columns[-1]])
            return self._columns[:depth]

    def scaled_orbits(self, depth: int, *extra_denoms: int):
        """(int matrix points x depth, common denominator L), exact."""
        cols = self.orbit_columns(depth)
        L = 1
        for c in cols:
            for v in c:
                L = math.lcm(L, v.denominator)
        for d in extra_denoms:
            L = math.lcm(L, d)
        big = L * 2 ** 20 > 2 ** 62  # keep int64 arithmetic safe
        dtype = object if big else np.int64
        mat = np.empty((len(self.points), depth), dtype=dtype)
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                mat[i, j] = int(v * L)
        return mat, L


def bowen_distance(sys: SystemSequence, x, y, n: int, start: int = 1) -> Fraction:
    """Exact Bowen distance: max over the first n orbit steps."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ox = sys.orbit(_as_fraction(x), n, start)
    oy = sys.orbit(_as_fraction(y), n, start)
    return max(point_distance(sys.space, a, b) for a, b in zip(ox, oy))


# -- greedy nets ------------------------------------------------------------------


def _greedy_bowen_net(sys: SystemSequence, n: int, epsilon: Fraction,
                      grid: OrbitGrid) -> list[int]:
    """Greedy point selection in the depth-n Bowen metric, fixed order.

    A point is accepted iff its Bowen distance to every previously
    accepted point exceeds epsilon.  The accepted set is simultaneously
    an inclusion-maximal (n,eps)-separated subset of the grid and the
    center set of the greedy spanning construction (the acceptance rules
    coincide), so both counting operations share this kernel.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not (grid.step < epsilon / 4):
        raise ValueError(
            f"grid step {grid.step} too coarse for epsilon {epsilon}; "
            "need step < epsilon/4")
    mat, L = grid.scaled_orbits(n, epsilon.denominator)
    eps_i = int(epsilon * L)
    circle = sys.space == CIRCLE
    total = len(grid.points)
    accepted = np.empty((total, n), dtype=mat.dtype)
    accepted_x: list = []
    idxs: list[int] = []
    count = 0
    L_int = L
    for i in range(total):
        row = mat[i]
        x0 = int(row[0])
        if count:
            lo = bisect_left(accepted_x, x0 - eps_i)
            win = accepted[lo:count]
            rejected = False
            if len(win):
                d = np.abs(win - row)
                if circle:
                    d = np.minimum(d, L_int - d)
                rejected = bool((d.max(axis=1) <= eps_i).any())
            if not rejected and circle:
                # wrap window: accepted points near 0 can still be close
                hi = bisect_left(accepted_x, x0 + eps_i - L_int + 1)
                win = accepted[:hi]
                if len(win):
                    d = np.abs(win - row)
                    d = np.minimum(d, L_int - d)
                    rejected = bool((d.max(axis=1) <= eps_i).any())
            if rejected:
                continue
        accepted[count] = row
        accepted_x.append(x0)
        idxs.append(i)
        count += 1
    return idxs


@dataclass(frozen=True)
class NetResult:
    count: int
    witness: tuple[Fraction, ...]
    n: int
    epsilon: Fraction
    grid_step: Fraction
    bound_side: str  # how the grid count bounds the true quantity


def separated_count(sys: SystemSequence, n: int, epsilon, grid: OrbitGrid) -> NetResult:
    """Greedy maximal (n,eps)-separated subset of the grid.

    The cardinality is a lower bound for the separated number of the
    whole space (grid points are a subset of it).
    """
    epsilon = _as_fraction(epsilon)
    idxs = _greedy_bowen_net(sys, n, epsilon, grid)
    return NetResult(len(idxs), tuple(grid.points[i] for i in idxs),
                     n, epsilon, grid.step, bound_side="lower")


def spanning_count(sys: SystemSequence, n: int, epsilon, grid: OrbitGrid) -> NetResult:
    """Greedy (n,eps)-spanning centers for the grid (uncovered points
    become centers); an upper bound for the grid's minimal spanning
    cardinality.  With the shared fixed-order kernel the center set
    equals the greedy separated set, which gives the classical sandwich
    span(eps) <= sep(eps) <= span(eps/2) for free."""
    epsilon = _as_fraction(epsilon)
    idxs = _greedy_bowen_net(sys, n, epsilon, grid)
    return NetResult(len(idxs), tuple(grid.points[i] for i in idxs),
                     n, epsilon, grid.step, bound_side="upper-for-grid")


@dataclass
class TopEntropyTable:
    """Rows (epsilon, n, count, log(count)/n) plus per-epsilon rate estimates."""
    rows: list[tuple[Fraction, int, int, float]]
    per_epsilon_rate: dict[Fraction, float]
    estimate: float
    window: int

    def csv_rows(self):
        return [(str(e), n, c, r) for e, n, c, r in self.rows]


def growth_rate(counts: Sequence[tuple[int, int]], window: Optional[int] = None) -> float:
    """Trailing-max of per-step log-count increments between consecutive
    (n, count) entries; the exponential growth rate the limsup targets.

    Raw (1/n) log count carries an O(1/n) offset from the epsilon-scale
    prefactor of the counts, so the increment form is what a finite
    horizon can actually certify."""
    if len(counts) < 2:
        n, c = counts[0]
        return math.log(c) / n
    slopes = []
    for (n1, c1), (n2, c2) in zip(counts, counts[1:]):
        slopes.append((math.log(c2) - math.log(c1)) / (n2 - n1))
    if window is None:
        window = (len(slopes) + 1) // 2
    window = max(1, min(window, len(slopes)))
    return max(slopes[-window:])


def topological_entropy_estimate(sys: SystemSequence, horizons: Sequence[int],
                                 eps_schedule: Sequence, grid: OrbitGrid,
                                 window: Optional[int] = None) -> TopEntropyTable:
    """Separated-count growth rates per epsilon; the final estimate is the
    max over the schedule (counts are monotone non-increasing in epsilon,
    so their rates are too)."""
    horizons = sorted(set(horizons))
    eps_schedule = [_as_fraction(e) for e in eps_schedule]
    if not horizons or not eps_schedule:
        raise ValueError("need nonempty horizon and epsilon schedules")
    if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValueError("epsilon schedule must be strictly decreasing")
    rows = []
    per_eps: dict[Fraction, float] = {}
    for eps in eps_schedule:
        counts = []
        for n in horizons:
            c = separated_count(sys, n, eps, grid).count
            counts.append((n, c))
            rows.append((eps, n, c, math.log(c) / n))
        per_eps[eps] = growth_rate(counts, window)
    est = max(per_eps.values())
    eff_window = window if window is not None else (max(len(horizons) - 1, 1) + 1) // 2
    return TopEntropyTable(rows, per_eps, est, eff_window)


# -- interval covers ---------------------------------------------------------------


class CoverMember:
    """A relatively open subset of the space: a finite union of open
    components.  Interval components use the sentinels lo = -1 / hi = 2
    for relative openness at 0 and 1; circle components are arcs
    (a, b) with b <= a + 1, taken mod 1."""

    __slots__ = ("space", "comps")

    def __init__(self, space: str, comps: Iterable[tuple]):
        self.space = check_space(space)
        cleaned = []
        for lo, hi in comps:
            lo, hi = _as_fraction(lo), _as_fraction(hi)
            if self.space == INTERVAL:
                if lo >= hi or hi <= 0 or lo >= 1:
                    continue
                lo = NEG if lo < 0 else lo
                hi = TWO if hi > 1 else hi
            else:
                if lo >= hi:
                    continue
                length = min(hi - lo, ONE)
                lo %= ONE
                hi = lo + length
            cleaned.append((lo, hi))
        cleaned.sort()
        if self.space == CIRCLE:
            cleaned = _merge_arcs(cleaned)
        else:
            cleaned = _merge_open(cleaned)
        self.comps = tuple(cleaned)

    @staticmethod
    def whole(space: str) -> "CoverMember":
        if space == INTERVAL:
            return CoverMember(space, [(NEG, TWO)])
        m = CoverMember.__new__(CoverMember)
        m.space = space
        m.comps = ((ZERO, ONE),)  # canonical whole-circle marker
        return m

    def is_whole_circle(self) -> bool:
        return self.space == CIRCLE and self.comps == ((ZERO, ONE),)

    def __bool__(self) -> bool:
        return bool(self.comps)

    def __eq__(self, other) -> bool:
        return (isinstance(other, CoverMember) and self.space == other.space
                and self.comps == other.comps)

    def __hash__(self) -> int:
        return hash((self.space, self.comps))

    def __repr__(self) -> str:
        return f"CoverMember({self.space}, {list(self.comps)})"

    def contains_point(self, x) -> bool:
        x = _as_fraction(x)
        if self.space == INTERVAL:
            return any(lo < x < hi for lo, hi in self.comps)
        if self.is_whole_circle():
            return True
        x %= ONE
        for a, b in self.comps:
            if a < x < b or a < x + 1 < b:
                return True
        return False

    def radius_at(self, x) -> Fraction:
        """Largest r with the open ball B(x, r) inside this member; 0 if
        x is not interior.  Unconstrained sides default to the diameter."""
        x = _as_fraction(x)
        diam = space_diameter(self.space)
        best = ZERO
        if self.space == INTERVAL:
            for lo, hi in self.comps:
                if not (lo < x < hi):
                    continue
                r = diam
                if lo >= 0:
                    r = min(r, x - lo)
                if hi <= 1:
                    r = min(r, hi - x)
                best = max(best, r)
            return best
        if self.is_whole_circle():
            return diam
        xm = x % ONE
        for a, b in self.comps:
            for lift in (xm, xm + 1):
                if a < lift < b:
                    best = max(best, min(min(lift - a, b - lift), diam))
        return best

    def intersect(self, other: "CoverMember") -> "CoverMember":
        same_space(self.space, other.space)
        if self.space == CIRCLE:
            if self.is_whole_circle():
                return other
            if other.is_whole_circle():
                return self
            out = []
            for a1, b1 in self.comps:
                for a2, b2 in other.comps:
                    for k in (-1, 0, 1):
                        lo, hi = max(a1, a2 + k), min(b1, b2 + k)
                        if lo < hi:
                            out.append((lo % ONE, (lo % ONE) + (hi - lo)))
            return CoverMember(CIRCLE, out)
        out = []
        for lo1, hi1 in self.comps:
            for lo2, hi2 in other.comps:
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if lo < hi:
                    out.append((lo, hi))
        return CoverMember(INTERVAL, out)


def _merge_open(comps):
    merged = []
    for lo, hi in comps:
        if merged and lo < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _merge_arcs(arcs):
    """Merge overlapping circle arcs; full coverage collapses to the marker."""
    if not arcs:
        return []
    doubled = sorted(arcs + [(a + 1, b + 1) for a, b in arcs])
    merged = []
    for lo, hi in doubled:
        if merged and lo < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    for lo, hi in merged:
        if hi - lo >= 1:
            return [(ZERO, ONE)]
    out = {( lo % ONE, lo % ONE + (hi - lo)) for lo, hi in merged if lo < 1}
    return sorted(out)


def preimage_member(f: PiecewiseLinearMap, member: CoverMember) -> CoverMember:
    """Open preimage f^{-1}(member) for a continuous map.

    Per affine piece the preimage of an open component is an open
    interval clipped to the closed piece; pieces are then glued at
    breakpoints whose image lies inside the member, which restores
    openness of the union."""
    same_space(f.space, member.space)
    if (f.space == INTERVAL and member.comps == ((NEG, TWO),)) or \
            member.is_whole_circle():
        return CoverMember.whole(f.space)
    raw: list[tuple[Fraction, Fraction]] = []
    glue: set[Fraction] = set()
    for bp in f.cuts:
        x = bp if bp < ONE or f.space == INTERVAL else ZERO
        if member.contains_point(f.evaluate(x)):
            glue.add(bp)
    for i, (s, t) in enumerate(f.pieces):
        a, b = f.cuts[i], f.cuts[i + 1]
        for lo, hi in member.comps:
            if f.space == CIRCLE:
                va, vb = s * a + t, s * b + t
                vlo, vhi = min(va, vb), max(va, vb)
                ks = range(_floor(vlo - hi), _floor(vhi - lo) + 2)
            else:
                ks = (0,)
            for k in ks:
                c, d = lo + k, hi + k
                if s == 0:
                    if c < t < d:
                        raw.append((a, b))
                        glue.add(a)
                        glue.add(b)
                    continue
                if s > 0:
                    plo, phi = (c - t) / s, (d - t) / s
                else:
                    plo, phi = (d - t) / s, (c - t) / s
                plo, phi = max(plo, a), min(phi, b)
                if plo < phi:
                    raw.append((plo, phi))
    raw.sort()
    merged: list[list[Fraction]] = []
    for lo, hi in raw:
        if merged and (lo < merged[-1][1]
                       or (lo == merged[-1][1] and lo in glue)):
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    comps = []
    for lo, hi in merged:
        if f.space == INTERVAL:
            if lo == ZERO and ZERO in glue:
                lo = NEG
            if hi == ONE and ONE in glue:
                hi = TWO
        comps.append((lo, hi))
    if f.space == CIRCLE and len(comps) >= 2:
        first, last = comps[0], comps[-1]
        if last[1] == ONE and first[0] == ZERO and ZERO in glue:
            comps = comps[1:-1] + [(last[0], ONE + first[1])]
    return CoverMember(f.space, comps)


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


class IntervalCover:
    """A finite open cover of the space by relatively open interval unions."""

    def __init__(self, space: str, members: Sequence[CoverMember]):
        self.space = check_space(space)
        self.members = tuple(m for m in members if m)
        if not self.members:
            raise ValueError("a cover needs at least one nonempty member")
        for m in self.members:
            same_space(self.space, m.space)
        if lebesgue_number(self) <= 0:
            raise ValueError("members do not cover the space")

    @staticmethod
    def from_pairs(space: str, pairs: Sequence[tuple]) -> "IntervalCover":
        return IntervalCover(space, [CoverMember(space, [p]) for p in pairs])

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        return f"IntervalCover({self.space}, {len(self.members)} members)"


def lebesgue_number(cover: Union[IntervalCover, Sequence[CoverMember]],
                    space: Optional[str] = None) -> Fraction:
    """The exact Lebesgue number: min over x of the largest ball radius
    admissible at x inside a single member.

    The pointwise best radius is a piecewise-linear function of x with
    slopes in {-1, 0, +1}, so its minimum is attained at a component
    endpoint, a pairwise crossing (e_i + e_j) / 2, or a diameter-capped
    plateau edge; all are enumerated and evaluated exactly.  A cover by
    one whole-space member yields the space diameter by convention.
    Returns 0 exactly when the input fails to cover the space.
    """
    if isinstance(cover, IntervalCover):
        members = cover.members
        space = cover.space
    else:
        members = tuple(cover)
        if space is None:
            space = members[0].space
    diam = space_diameter(space)
    ends: set[Fraction] = set()
    for m in members:
        if space == CIRCLE and m.is_whole_circle():
            continue
        for lo, hi in m.comps:
            for e in (lo, hi):
                if space == CIRCLE:
                    ends.add(e % ONE)
                elif ZERO <= e <= ONE:
                    ends.add(e)
    cands: set[Fraction] = {ZERO, ONE} if space == INTERVAL else set(ends) or {ZERO}
    cands |= ends
    for e1 in ends:
        for e2 in ends:
            mid = (e1 + e2) / 2
            if space == CIRCLE:
                cands.add(mid % ONE)
                cands.add((mid + Fraction(1, 2)) % ONE)
            elif ZERO <= mid <= ONE:
                cands.add(mid)
        for cap in (e1 + diam, e1 - diam):
            if space == CIRCLE:
                cands.add(cap % ONE)
            elif ZERO <= cap <= ONE:
                cands.add(cap)
    if space == CIRCLE:
        cands.add(ZERO)
    best: Optional[Fraction] = None
    for x in sorted(cands):
        phi = max((m.radius_at(x) for m in members), default=ZERO)
        if best is None or phi < best:
            best = phi
    return best if best is not None else ZERO


class CoverSequence:
    """A finitely presented rule n -> cover with a declared Lebesgue-number
    lower bound, enforced exactly on every materialized index."""

    def __init__(self, rule: Callable[[int], IntervalCover], *, space: str,
                 lebesgue_bound, prefix_len: int = 0,
                 period: Optional[int] = None, description: str = ""):
        self._rule = rule
        self.space = check_space(space)
        self.lebesgue_bound = _as_fraction(lebesgue_bound)
        if self.lebesgue_bound <= 0:
            raise ValueError("the declared Lebesgue bound must be positive")
        self.prefix_len = prefix_len
        self.period = period
        self.description = description
        self._cache: dict[int, IntervalCover] = {}
        self._lock = threading.Lock()

    @staticmethod
    def constant(cover: IntervalCover, lebesgue_bound=None,
                 description: str = "") -> "CoverSequence":
        bound = lebesgue_bound if lebesgue_bound is not None else lebesgue_number(cover)
        return CoverSequence(lambda n: cover, space=cover.space,
                             lebesgue_bound=bound, prefix_len=0, period=1,
                             description=description or "constant")

    def at(self, n: int) -> IntervalCover:
        if n < 1:
            raise ValueError("indices are 1-based")
        with self._lock:
            hit = self._cache.get(n)
        if hit is not None:
            return hit
        cov = self._rule(n)
        same_space(self.space, cov.space)
        actual = lebesgue_number(cov)
        if actual < self.lebesgue_bound:
            raise CertificateError(
                f"cover at n={n} has Lebesgue number {actual} below the "
                f"declared bound {self.lebesgue_bound}", index=n)
        with self._lock:
            self._cache[n] = cov
        return cov


def refine_cover_sequence(sys: SystemSequence, cov_seq: CoverSequence,
                          m: int) -> CoverSequence:
    """The m-step pullback-join covers, with the quantitative Lebesgue
    certificate bound/L^{m-1} coming from the system's uniform Lipschitz
    bound (the equicontinuity witness)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return cov_seq
    if sys.lipschitz_bound is None:
        raise ValueError("refining covers needs the system's Lipschitz bound")
    L = max(sys.lipschitz_bound, Fraction(1))
    certified = cov_seq.lebesgue_bound / L ** (m - 1)

    def rule(n: int) -> IntervalCover:
        members = list(cov_seq.at(n).members)
        for i in range(1, m):
            nxt = cov_seq.at(n + i).members
            pulled_next = []
            for mem in nxt:
                cur = mem
                for j in range(n + i - 1, n - 1, -1):
                    cur = preimage_member(sys.map_at(j), cur)
                pulled_next.append(cur)
            members = [a.intersect(b) for a in members for b in pulled_next]
            members = [x for x in members if x]
        return IntervalCover(sys.space, members)

    period = None
    prefix = 0
    if cov_seq.period is not None and sys.period is not None:
        period = math.lcm(cov_seq.period, sys.period)
        prefix = max(cov_seq.prefix_len, sys.prefix_len)
    return CoverSequence(rule, space=sys.space, lebesgue_bound=certified,
                         prefix_len=prefix, period=period,
                         description=f"refine[{m}] of {cov_seq.description}")


# -- minimal subcovers ----------------------------------------------------------


@dataclass(frozen=True)
class SubcoverCount:
    lower: int
    upper: int
    exact: bool
    method: str

    @property
    def count(self) -> int:
        return self.upper


EXACT_SUBCOVER_CAP = 24


def minimal_subcover_count(members: Sequence[CoverMember], grid: OrbitGrid,
                           exact_cap: int = EXACT_SUBCOVER_CAP) -> SubcoverCount:
    """Minimal number of members covering the grid point set.

    Exact branch-and-bound set cover up to ``exact_cap`` members (set
    cover is NP-hard, so exactness is capped); beyond it, a greedy upper
    bound paired with a pairwise-independent-point lower bound.
    """
    pts = grid.points
    masks = []
    for mem in members:
        bits = 0
        for i, x in enumerate(pts):
            if mem.contains_point(x):
                bits |= 1 << i
        masks.append(bits)
    universe = (1 << len(pts)) - 1
    covered = 0
    for b in masks:
        covered |= b
    if covered != universe:
        raise ValueError("members do not cover every grid point")
    if len(members) <= exact_cap:
        n = _exact_set_cover(masks, universe)
        return SubcoverCount(n, n, True, "branch-and-bound")
    upper = _greedy_set_cover(masks, universe)
    lower = _independent_points_bound(masks, len(pts))
    return SubcoverCount(lower, upper, False, "greedy+independent")


def _greedy_set_cover(masks: list[int], universe: int) -> int:
    uncovered = universe
    count = 0
    while uncovered:
        best = max(range(len(masks)),
                   key=lambda i: ((masks[i] & uncovered).bit_count(), -i))
        gain = masks[best] & uncovered
        if not gain:
            raise ValueError("greedy cover stalled; input does not cover")
        uncovered &= ~masks[best]
        count += 1
    return count


def _independent_points_bound(masks: list[int], n_pts: int) -> int:
    """Points no two of which share a member: each needs its own set."""
    remaining = (1 << n_pts) - 1
    count = 0
    while remaining:
        # the lowest remaining point, then knock out everything sharing a member
        p = remaining & -remaining
        count += 1
        for b in masks:
            if b & p:
                remaining &= ~b
        remaining &= ~p
    return count


def _exact_set_cover(masks: list[int], universe: int) -> int:
    best = [_greedy_set_cover(masks, universe)]
    order = sorted(range(len(masks)), key=lambda i: -masks[i].bit_count())

    def max_gain(uncovered: int) -> int:
        return max((masks[i] & uncovered).bit_count() for i in order)

    def recurse(uncovered: int, used: int):
        if not uncovered:
            best[0] = min(best[0], used)
            return
        g = max_gain(uncovered)
        if used + -(-uncovered.bit_count() // g) >= best[0]:
            return
        # branch on the hardest point: fewest covering members
        p = None
        fewest = None
        rem = uncovered
        while rem:
            q = rem & -rem
            cnt = sum(1 for b in masks if b & q)
            if fewest is None or cnt < fewest:
                fewest, p = cnt, q
            rem &= rem - 1
        for i in order:
            if masks[i] & p:
                recurse(uncovered & ~masks[i], used + 1)

    recurse(universe, 0)
    return best[0]


@dataclass
class CoverEntropyTable:
    rows: list[tuple[int, int, int, int, float]]  # n, members, lower, upper, log(upper)/n
    estimate: float
    window: int


def cover_entropy_estimate(sys: SystemSequence, cov_seq: CoverSequence,
                           horizon: int, grid: OrbitGrid, *,
                           window: Optional[int] = None,
                           member_cap: int = 200000) -> CoverEntropyTable:
    """Growth rate of minimal subcover counts of the pullback-joined
    covers; cross-validates the separated/spanning estimates."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    members = list(cov_seq.at(1).members)
    rows = []
    counts = []
    for n in range(1, horizon + 1):
        if n > 1:
            nxt = cov_seq.at(n).members
            pulled = []
            for mem in nxt:
                cur = mem
                for j in range(n - 1, 0, -1):
                    cur = preimage_member(sys.map_at(j), cur)
                pulled.append(cur)
            members = [a.intersect(b) for a in members for b in pulled]
            members = [m for m in members if m]
            if len(members) > member_cap:
                raise RuntimeError(
                    f"joined cover has {len(members)} members, over the cap")
        sc = minimal_subcover_count(members, grid)
        rows.append((n, len(members), sc.lower, sc.upper,
                     math.log(sc.upper) / n))
        counts.append((n, sc.upper))
    est = growth_rate(counts, window)
    eff_window = window if window is not None else (max(horizon - 1, 1) + 1) // 2
    return CoverEntropyTable(rows, est, eff_window)
