"""Metric entropy of nonautonomous systems with respect to partition
sequences: Bowen-style pullback joins, entropy traces, limsup
estimation, admissibility (cardinality-bound / coarsening) checks,
separated-core certificates, and the independence construction showing
the unrestricted supremum degenerates.

The central quantity is the trace n -> H_n, where H_n is the entropy
under mu_1 of the join of the first n pulled-back partitions.  Joins
refine as n grows, so traces are nondecreasing; every estimator works on
finite traces and records the horizon and window it used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .measures import RationalMeasure
from .partitions import (IntervalSetPartition, PartitionSequence, _log,
                         conditional_entropy, is_finer, join,
                         partition_entropy)
from .sets import ONE, ZERO, IntervalUnion, _as_fraction
from .systems import SystemSequence, shift_measures, shift_system

DEFAULT_CELL_CAP = 10 ** 6


class ResourceLimitError(RuntimeError):
    """A join exceeded the configured cell cap; results would be untrustworthy."""


def _check_cap(p: IntervalSetPartition, cap: int) -> IntervalSetPartition:
    if p.cell_count > cap:
        raise ResourceLimitError(
            f"joined partition has {p.cell_count} cells, exceeding the cap {cap}")
    return p


def shift_partitions(p_seq: PartitionSequence, k: int) -> PartitionSequence:
    """The sequence P_{k,oo}: index 1 sees P_k."""
    if k == 1:
        return p_seq
    prefix = max(0, p_seq.prefix_len - (k - 1)) if p_seq.period is not None else 0
    return PartitionSequence(lambda n: p_seq.at(n + k - 1), space=p_seq.space,
                             bound=p_seq.bound, prefix_len=prefix,
                             period=p_seq.period,
                             description=f"shift[{k}] of {p_seq.description}")


def bowen_join(sys: SystemSequence, p_seq: PartitionSequence, start: int,
               depth: int, cap: int = DEFAULT_CELL_CAP) -> IntervalSetPartition:
    """The join of depth pulled-back partitions anchored at time ``start``:
    P_start v f_start^{-1} P_{start+1} v ... (depth terms).

    Computed by iterated pullback-and-join from the far end, so no long
    composition is ever materialized.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    out = p_seq.at(start + depth - 1)
    for i in range(depth - 2, -1, -1):
        pulled = sys.map_at(start + i).pullback_partition(out)
        out = _check_cap(join(p_seq.at(start + i), pulled), cap)
    return out


@dataclass
class EntropyTrace:
    """The finite trace (n, H_n, H_n/n) of a system/partition-sequence pair."""
    horizon: int
    base: Union[str, float]
    entries: list[tuple[int, float, float]]
    masses: Optional[list[list[Fraction]]] = None

    def h(self, n: int) -> float:
        return self.entries[n - 1][1]

    def rates(self) -> list[float]:
        return [r for _, _, r in self.entries]

    def is_monotone(self, slack: float = 1e-12) -> bool:
        hs = [h for _, h, _ in self.entries]
        return all(b >= a - slack for a, b in zip(hs, hs[1:]))

    def csv_rows(self) -> list[tuple[int, float, float]]:
        return list(self.entries)


def entropy_trace(sys: SystemSequence, mu_seq, p_seq: PartitionSequence,
                  horizon: int, *, base="e", cap: int = DEFAULT_CELL_CAP,
                  keep_masses: bool = False) -> EntropyTrace:
    """H_n = H_{mu_1}(join of the first n pulled-back partitions), n <= horizon.

    The join is grown incrementally: J_n = J_{n-1} v f_1^{-(n-1)} P_n.
    For a constant system with a constant partition sequence the pulled
    term is itself grown by one pullback per step; otherwise it is pulled
    back step by step through f_{n-1}, ..., f_1.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    mu1 = mu_seq.at(1)
    constant = (sys.period == 1 and sys.prefix_len == 0
                and p_seq.period == 1 and p_seq.prefix_len == 0)
    entries: list[tuple[int, float, float]] = []
    masses_out: list[list[Fraction]] = []
    joined = p_seq.at(1)
    pulled = joined  # f_1^{-(n-1)} P_n for the constant fast path
    for n in range(1, horizon + 1):
        if n > 1:
            if constant:
                pulled = sys.map_at(1).pullback_partition(pulled)
            else:
                pulled = p_seq.at(n)
                for j in range(n - 1, 0, -1):
                    pulled = sys.map_at(j).pullback_partition(pulled)
            joined = _check_cap(join(joined, pulled), cap)
        cell_masses = joined.masses(mu1)
        h = -math.fsum(float(m) * _log(float(m), base) for m in cell_masses if m > 0)
        entries.append((n, h, h / n))
        if keep_masses:
            masses_out.append(cell_masses)
    return EntropyTrace(horizon, base, entries, masses_out if keep_masses else None)


@dataclass(frozen=True)
class LimsupEstimate:
    """Trailing-window limsup estimate of a trace."""
    value: float            # max of H_n/n over the trailing window (primary)
    slope: float            # least-squares slope of H_n over the window
    window: int
    n_range: tuple[int, int]


def estimate_limsup(trace: EntropyTrace, window: Optional[int] = None) -> LimsupEstimate:
    """Primary estimator: max of H_n/n over the trailing window; the
    least-squares slope of H_n over the same window is reported as a
    diagnostic.  Defaults to the trailing half of the trace."""
    n_total = len(trace.entries)
    if window is None:
        window = (n_total + 1) // 2
    if not (1 <= window <= n_total):
        raise ValueError(f"window must be in 1..{n_total}")
    tail = trace.entries[-window:]
    value = max(r for _, _, r in tail)
    ns = [float(n) for n, _, _ in tail]
    hs = [h for _, h, _ in tail]
    if window == 1:
        slope = hs[0] / ns[0]
    else:
        mean_n = math.fsum(ns) / window
        mean_h = math.fsum(hs) / window
        num = math.fsum((n - mean_n) * (h - mean_h) for n, h in zip(ns, hs))
        den = math.fsum((n - mean_n) ** 2 for n in ns)
        slope = num / den
    return LimsupEstimate(value, slope, window, (tail[0][0], tail[-1][0]))


def metric_entropy_estimate(sys: SystemSequence, mu_seq,
                            family: Sequence[PartitionSequence], horizon: int,
                            window: Optional[int] = None, *, base="e",
                            cap: int = DEFAULT_CELL_CAP) -> float:
    """Supremum of the trailing estimates over a finite generating family.

    The value equals the entropy of the admissible class the family
    generates, so a finite family is all that is ever materialized.
    Every member must carry a declared cardinality bound.
    """
    if not family:
        raise ValueError("the generating family must be nonempty")
    best = 0.0
    for p_seq in family:
        if p_seq.bound is None:
            raise ValueError(
                f"family member {p_seq.description!r} carries no cardinality bound")
        tr = entropy_trace(sys, mu_seq, p_seq, horizon, base=base, cap=cap)
        best = max(best, estimate_limsup(tr, window).value)
    return best


def refine_sequence(p_seq: PartitionSequence, sys: SystemSequence, m: int,
                    cap: int = DEFAULT_CELL_CAP) -> PartitionSequence:
    """The m-step dynamical refinement: n-th partition is the depth-m
    pullback join anchored at n.  Entropy is invariant under it."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return p_seq
    bound = None if p_seq.bound is None else p_seq.bound ** m
    period = None
    prefix = 0
    if p_seq.period is not None and sys.period is not None:
        period = math.lcm(p_seq.period, sys.period)
        prefix = max(p_seq.prefix_len, sys.prefix_len)
    return PartitionSequence(
        lambda n: bowen_join(sys, p_seq, n, m, cap), space=p_seq.space,
        bound=bound, prefix_len=prefix, period=period,
        description=f"refine[{m}] of {p_seq.description}")


# -- admissibility checks -----------------------------------------------------


@dataclass(frozen=True)
class AxiomCheck:
    holds: bool
    horizon: int
    exact: bool              # True when a periodic presentation was fully covered
    bound: Optional[int] = None
    first_violation: Optional[int] = None
    note: str = ""


def _covers_presentation(seq, horizon: int) -> bool:
    return seq.period is not None and horizon >= seq.prefix_len + seq.period


def check_axiom_A(p_seq: PartitionSequence, horizon: int,
                  bound: Optional[int] = None) -> AxiomCheck:
    """Finite-horizon check of the uniform cardinality bound.

    Exact for eventually-periodic presentations once the horizon covers
    prefix plus one period; otherwise the verdict is advisory.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    n_bound = bound if bound is not None else p_seq.bound
    exact = _covers_presentation(p_seq, horizon)
    if n_bound is None:
        return AxiomCheck(False, horizon, exact,
                          note="no cardinality bound declared or supplied")
    for n in range(1, horizon + 1):
        if p_seq.at(n).cell_count > n_bound:
            return AxiomCheck(False, horizon, exact, bound=n_bound,
                              first_violation=n,
                              note=f"axiom A violated at n={n}: "
                                   f"{p_seq.at(n).cell_count} cells > {n_bound}")
    return AxiomCheck(True, horizon, exact, bound=n_bound)


def check_coarser(p_seq: PartitionSequence, q_seq: PartitionSequence,
                  horizon: int) -> AxiomCheck:
    """Finite-horizon check that p refines q index by index (P >= Q)."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    exact = (_covers_presentation(p_seq, horizon)
             and _covers_presentation(q_seq, horizon))
    for n in range(1, horizon + 1):
        if not is_finer(p_seq.at(n), q_seq.at(n)):
            return AxiomCheck(False, horizon, exact, first_violation=n,
                              note=f"P_{n} is not finer than Q_{n}")
    return AxiomCheck(True, horizon, exact)


# -- Misiurewicz certificates --------------------------------------------------


ClosedUnion = tuple[tuple[Fraction, Fraction], ...]


@dataclass
class MisiurewiczCertificate:
    """Witness of separated-core membership at a given epsilon.

    Cores are closed interval unions obtained by shrinking every
    constituent interval of every cell inward by the uniform margin; the
    separation delta is twice the margin, since adjacent cells shrink
    from both sides of a shared endpoint.
    """
    epsilon: Fraction
    delta: Fraction
    margin: Fraction
    horizon: int
    exact: bool
    cores: dict[int, list[ClosedUnion]]  # n -> one closed union per cell

    def verify(self, p_seq: PartitionSequence, mu_seq) -> bool:
        """Independent exact re-check of the defining conditions."""
        for n, cell_cores in self.cores.items():
            p = p_seq.at(n)
            mu = mu_seq.at(n)
            for i, core in enumerate(cell_cores):
                defect = mu.measure_union(p.cell(i)) - _closed_measure(mu, core)
                if defect > self.epsilon:
                    return False
            for i in range(len(cell_cores)):
                for j in range(i + 1, len(cell_cores)):
                    if not cell_cores[i] or not cell_cores[j]:
                        continue
                    g = _closed_gap(p.space, cell_cores[i], cell_cores[j])
                    if g < self.delta:
                        return False
        return True


@dataclass(frozen=True)
class MisiurewiczFailure:
    epsilon: Fraction
    index: int
    cell: int
    reason: str


def _closed_measure(mu: RationalMeasure, core: ClosedUnion) -> Fraction:
    total = ZERO
    for lo, hi in core:
        if lo < hi:
            total += mu.measure_interval(lo, hi)
        # the closed right endpoint (and a singleton's point) carries atoms
        for x, m in mu.atoms:
            if x == hi:
                total += m
    return total


def _closed_gap(space: str, a: ClosedUnion, b: ClosedUnion) -> Fraction:
    """Exact distance between two closed interval unions."""
    best: Optional[Fraction] = None
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            if hi1 <= lo2:
                g = lo2 - hi1
            elif hi2 <= lo1:
                g = lo1 - hi2
            else:
                g = ZERO
            if space == "circle":
                wrap = ONE - (max(hi1, hi2) - min(lo1, lo2))
                g = min(g, max(wrap, ZERO))
            if best is None or g < best:
                best = g
    return best if best is not None else ONE


def _max_margin_for_cell(mu: RationalMeasure, cell: IntervalUnion,
                         epsilon: Fraction) -> Fraction:
    """Largest t >= 0 with mu(cell minus shrunk-core(t)) <= epsilon.

    The defect is nondecreasing and left-continuous in t, piecewise
    linear between structural breakpoints (atom positions, density-piece
    boundaries, interval half-widths), so the maximum is attained and is
    found by an exact walk over those breakpoints.
    """
    widths = [b - a for a, b in cell.ivs]
    t_max = max(w / 2 for w in widths)

    def core_at(t: Fraction) -> ClosedUnion:
        out = []
        for a, b in cell.ivs:
            lo, hi = a + t, b - t
            if lo <= hi:
                out.append((lo, hi))
        return tuple(out)

    cell_mass = mu.measure_union(cell)

    def defect(t: Fraction) -> Fraction:
        return cell_mass - _closed_measure(mu, core_at(t))

    if defect(t_max) <= epsilon:
        return t_max
    # structural breakpoints of the defect as a function of t: interval
    # collapses, plus atom positions and density-piece boundaries as
    # seen from either end of each constituent interval
    cands = {ZERO, t_max}
    for a, b in cell.ivs:
        cands.add((b - a) / 2)
        for x, _ in mu.atoms:
            if a <= x <= b:
                cands.add(x - a)
                cands.add(b - x)
        for pa, pb, _ in mu.pieces:
            for d in (pa, pb):
                if a <= d <= b:
                    cands.add(d - a)
                    cands.add(b - d)
    ts = sorted(t for t in cands if ZERO <= t <= t_max)
    # largest structural point still admissible (defect is monotone)
    best = None
    nxt = None
    for t in ts:
        if defect(t) <= epsilon:
            best = t
        else:
            nxt = t
            break
    if best is None:
        return ZERO
    if nxt is None:
        return best
    # on the open segment (best, nxt) the defect is J + s (t - best);
    # extend to the exact point where it reaches epsilon
    probe = (best + nxt) / 2
    slope = _segment_slope(mu, cell, probe)
    jump_base = defect(probe) - slope * (probe - best)
    if jump_base > epsilon or slope <= 0:
        return best
    return best + (epsilon - jump_base) / slope


def _segment_slope(mu: RationalMeasure, cell: IntervalUnion, t: Fraction) -> Fraction:
    """d(defect)/dt at a generic t: sum of densities at the moving fronts."""
    slope = ZERO
    for a, b in cell.ivs:
        if b - a <= 2 * t:
            continue
        for front in (a + t, b - t):
            for pa, pb, v in mu.pieces:
                if pa <= front < pb:
                    slope += v
                    break
    return slope


def detect_measure_periodicity(mu_seq, sys: SystemSequence,
                               p_seq: PartitionSequence, horizon: int) -> bool:
    """True when the periodic presentations visibly close up: the measure
    repeats exactly after one combined period inside the horizon."""
    if sys.period is None or p_seq.period is None:
        return False
    period = math.lcm(sys.period, p_seq.period)
    prefix = max(sys.prefix_len, p_seq.prefix_len)
    if horizon < prefix + 2 * period:
        return False
    for n in range(prefix + 1, horizon - period + 1):
        if mu_seq.at(n + period) != mu_seq.at(n):
            return False
    return True


def misiurewicz_check(p_seq: PartitionSequence, mu_seq, epsilon, horizon: int,
                      *, sys: Optional[SystemSequence] = None
                      ) -> Union[MisiurewiczCertificate, MisiurewiczFailure]:
    """Search the largest uniform inward margin certifying the
    separated-core conditions at the given epsilon up to the horizon.

    Returns a certificate (margin, delta = 2 margin, materialized cores)
    or the first (n, cell) admitting no positive margin, e.g. an atom of
    mass > epsilon sitting exactly on a shared cell boundary.  Uniform
    margins are sound but not complete; a failure therefore means this
    particular search found no witness, not that none exists.
    """
    epsilon = _as_fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    margin: Optional[Fraction] = None
    witness: Optional[tuple[int, int]] = None
    for n in range(1, horizon + 1):
        p = p_seq.at(n)
        mu = mu_seq.at(n)
        for i in range(p.cell_count):
            t = _max_margin_for_cell(mu, p.cell(i), epsilon)
            if margin is None or t < margin:
                margin = t
                witness = (n, i)
    assert margin is not None and witness is not None
    if margin <= 0:
        return MisiurewiczFailure(
            epsilon, witness[0], witness[1],
            reason="no positive uniform margin keeps the mass defect within "
                   "epsilon (typically an atom on a cell boundary)")
    cores: dict[int, list[ClosedUnion]] = {}
    for n in range(1, horizon + 1):
        p = p_seq.at(n)
        cell_cores = []
        for i in range(p.cell_count):
            out = []
            for a, b in p.cell(i).ivs:
                lo, hi = a + margin, b - margin
                if lo <= hi:
                    out.append((lo, hi))
            cell_cores.append(tuple(out))
        cores[n] = cell_cores
    exact = (sys is not None
             and detect_measure_periodicity(mu_seq, sys, p_seq, horizon))
    return MisiurewiczCertificate(epsilon, 2 * margin, margin, horizon,
                                  exact, cores)


# -- the independence construction ---------------------------------------------


def _equal_mass_split(mu: RationalMeasure, u: IntervalUnion, k: int
                      ) -> list[IntervalUnion]:
    """Split a union into k parts of exactly equal mu-mass (mu atomless).

    Cuts are placed at the leftmost points reaching each mass quantile;
    stretches of density zero are swallowed by the earlier part.
    """
    total = mu.measure_union(u)
    if total == 0:
        raise ValueError("cannot equal-mass split a null set")
    target = total / k
    parts: list[list[tuple[Fraction, Fraction]]] = [[] for _ in range(k)]
    idx = 0
    acc = ZERO
    for a, b in u.ivs:
        cursor = a
        while cursor < b:
            room = target - acc
            # mass of [cursor, b)
            rest = mu.measure_interval(cursor, b)
            if rest <= room or idx == k - 1:
                parts[idx].append((cursor, b))
                acc += rest
                cursor = b
                if acc == target and idx < k - 1:
                    idx += 1
                    acc = ZERO
            else:
                cut = _leftmost_quantile_point(mu, cursor, b, room)
                parts[idx].append((cursor, cut))
                idx += 1
                acc = ZERO
                cursor = cut
    out = [IntervalUnion(p) for p in parts]
    for p in out:
        if mu.measure_union(p) != target:
            raise AssertionError("equal-mass split failed to balance")
    return out


def _leftmost_quantile_point(mu: RationalMeasure, a: Fraction, b: Fraction,
                             mass: Fraction) -> Fraction:
    """Some x in (a, b] with mu([a, x)) == mass exactly, 0 < mass < mu([a,b))."""
    acc = ZERO
    for pa, pb, v in mu.pieces:
        lo, hi = max(pa, a), min(pb, b)
        if lo >= hi:
            continue
        seg = v * (hi - lo)
        if acc + seg >= mass:
            return lo + (mass - acc) / v
        acc += seg
    raise AssertionError("quantile point not found; is the measure atomless?")


def independent_refinement_sequence(sys: SystemSequence, mu_seq, k: int,
                                    horizon: int) -> PartitionSequence:
    """The inductive construction of a k-cell sequence whose pullback
    joins are exactly independent: every join of the first n terms has
    k^n cells of equal mass, so H_n = n log k on the nose.

    Supported maps: the identity and monotone piecewise-linear
    bijections; measures must be atomless along the horizon.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    for n in range(1, horizon + 1):
        if not mu_seq.at(n).is_atomless():
            raise ValueError(f"measure at n={n} is atomic; construction undefined")
        if n < horizon and not sys.map_at(n).is_monotone_bijection():
            raise ValueError(f"map at n={n} is not a monotone bijection")
    mu1 = mu_seq.at(1)
    p1_cells = _equal_mass_split(mu1, IntervalUnion.full(), k)
    partitions = [IntervalSetPartition.from_cells(sys.space, p1_cells)]
    fine_cells = list(p1_cells)  # cells of R_n, all of equal mass k^{-n}
    for n in range(1, horizon):
        f = sys.map_at(n)
        mu_next = mu_seq.at(n + 1)
        image_cells = [f.image_union(c) for c in fine_cells]
        groups = [_equal_mass_split(mu_next, img, k) for img in image_cells]
        p_cells = []
        for j in range(k):
            p_cells.append(IntervalUnion(
                [iv for g in groups for iv in g[j].ivs]))
        partitions.append(IntervalSetPartition.from_cells(sys.space, p_cells))
        new_fine = [g[j] for g in groups for j in range(k)]
        pull = f.preimage_union
        fine_cells = [pull(c) for c in new_fine]
    return PartitionSequence.from_list(partitions,
                                       description=f"independent k={k}")


# -- Prop-style identity report --------------------------------------------------


@dataclass(frozen=True)
class CheckItem:
    passed: bool
    note: str = ""


@dataclass
class TraceLawReport:
    items: dict[str, CheckItem] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(item.passed for item in self.items.values())

    def lines(self) -> list[str]:
        return [f"  ({key}) {'PASS' if item.passed else 'FAIL'}"
                + (f"  {item.note}" if item.note else "")
                for key, item in sorted(self.items.items())]


def verify_prop32(sys: SystemSequence, mu_seq, p_seq: PartitionSequence,
                  q_seq: PartitionSequence, horizon: int, *,
                  base="e", cap: int = DEFAULT_CELL_CAP) -> TraceLawReport:
    """Finite-trace versions of the elementary entropy laws.

    (i) bounds, (ii) join subadditivity, (iii) refinement dominance,
    (iv) agreement along multiples, (v) the refined-sequence shift
    identity (exact mass multisets), (vi) the conditional-entropy
    comparison, (vii) the shifted-system sandwich.  Float assertions use
    1e-9; mass identities are exact rational equalities.
    """
    report = TraceLawReport()
    tol = 1e-9
    tr_p = entropy_trace(sys, mu_seq, p_seq, horizon, base=base, cap=cap,
                         keep_masses=True)
    tr_q = entropy_trace(sys, mu_seq, q_seq, horizon, base=base, cap=cap)
    joined_seq = PartitionSequence(
        lambda n: join(p_seq.at(n), q_seq.at(n)), space=p_seq.space,
        bound=None if p_seq.bound is None or q_seq.bound is None
        else p_seq.bound * q_seq.bound,
        prefix_len=max(p_seq.prefix_len, q_seq.prefix_len),
        period=None if p_seq.period is None or q_seq.period is None
        else math.lcm(p_seq.period, q_seq.period),
        description="join")
    tr_j = entropy_trace(sys, mu_seq, joined_seq, horizon, base=base, cap=cap)

    # (i) 0 <= H_n <= sum_{i<=n} log #P_i
    ok = True
    note = ""
    upper = 0.0
    for n, h, _ in tr_p.entries:
        upper += _log(float(p_seq.at(n).cell_count), base)
        if not (-tol <= h <= upper + tol):
            ok, note = False, f"bound fails at n={n}"
            break
    report.items["i"] = CheckItem(ok, note)

    # (ii) subadditivity of the joined sequence
    ok = all(hj <= hp + hq + tol for (_, hj, _), (_, hp, _), (_, hq, _)
             in zip(tr_j.entries, tr_p.entries, tr_q.entries))
    report.items["ii"] = CheckItem(ok)

    # (iii) the join refines both inputs, so its trace dominates
    ok = all(hj >= max(hp, hq) - tol for (_, hj, _), (_, hp, _), (_, hq, _)
             in zip(tr_j.entries, tr_p.entries, tr_q.entries))
    report.items["iii"] = CheckItem(ok)

    # (iv) trailing estimates along all n and along multiples agree
    est_all = estimate_limsup(tr_p).value
    sub = [tr_p.entries[n - 1] for n in range(2, horizon + 1, 2)]
    if sub:
        est_sub = max(r for _, _, r in sub[-((len(sub) + 1) // 2):])
        ok = abs(est_all - est_sub) <= tol
        note = f"all-n {est_all:.12f} vs multiples {est_sub:.12f}"
    else:
        ok, note = True, "horizon too short for multiples"
    report.items["iv"] = CheckItem(ok, note)

    # (v) refined-sequence shift identity, exact masses
    m = 2
    if horizon >= m:
        refined = refine_sequence(p_seq, sys, m, cap)
        tr_r = entropy_trace(sys, mu_seq, refined, horizon - m + 1, base=base,
                             cap=cap, keep_masses=True)
        ok = all(sorted(tr_r.masses[n - 1]) == sorted(tr_p.masses[n + m - 2])
                 for n in range(1, horizon - m + 2))
        report.items["v"] = CheckItem(ok, "exact mass multisets, m=2")
    else:
        report.items["v"] = CheckItem(True, "horizon too short")

    # (vi) H_n(P) <= H_n(Q) + sum_{i<=n} H_{mu_i}(P_i|Q_i)
    ok = True
    cond_sum = 0.0
    for n in range(1, horizon + 1):
        cond_sum += conditional_entropy(mu_seq.at(n), p_seq.at(n), q_seq.at(n), base)
        if tr_p.h(n) > tr_q.h(n) + cond_sum + tol:
            ok = False
            break
    report.items["vi"] = CheckItem(ok)

    # (vii) sandwich between consecutive shifts:
    # H^{(2)}_{n-1} <= H^{(1)}_n <= H_{mu_1}(P_1) + H^{(2)}_{n-1}
    if horizon >= 2:
        tr_s = entropy_trace(shift_system(sys, 2), shift_measures(mu_seq, 2),
                             shift_partitions(p_seq, 2),
                             horizon - 1, base=base, cap=cap)
        h_p1 = partition_entropy(mu_seq.at(1), p_seq.at(1), base)
        ok = all(tr_s.h(n - 1) - tol <= tr_p.h(n) <= h_p1 + tr_s.h(n - 1) + tol
                 for n in range(2, horizon + 1))
        report.items["vii"] = CheckItem(ok)
    else:
        report.items["vii"] = CheckItem(True, "horizon too short")
    return report
