"""Nonautonomous systems: map sequences with invariant measure sequences,
and the constructions that produce new systems from old ones (powers,
shifts, restrictions, semiconjugacy pullbacks).

Only finitely presented sequences are admitted: a finite prefix followed
by a periodic tail (a constant sequence being the period-1 case), or an
arbitrary deterministic rule for test scaffolding.  Measure sequences
are materialized by exact pushforward, so the invariance
f_n mu_n = mu_{n+1} holds by construction and is re-verified exactly
whenever a claimed sequence is supplied.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .maps import (PiecewiseLinearMap, compose, compose_chain,
                   pushforward_measure)
from .measures import RationalMeasure
from .partitions import IntervalSetPartition, PartitionSequence
from .sets import IntervalUnion, check_space, same_space


class CertificateError(ValueError):
    """A claimed invariance or compatibility fails; carries the first bad index."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class SystemSequence:
    """A finitely presented sequence of maps f_n with a uniform Lipschitz bound.

    The declared bound witnesses equicontinuity: d(x,y) < eps/L implies
    d(f_n x, f_n y) < eps for every n.  Every materialized map is checked
    against it.
    """

    def __init__(self, rule: Callable[[int], PiecewiseLinearMap], *, space: str,
                 lipschitz_bound, prefix_len: int = 0,
                 period: Optional[int] = None, description: str = ""):
        self._rule = rule
        self.space = check_space(space)
        self.lipschitz_bound = Fraction(lipschitz_bound)
        if self.lipschitz_bound <= 0:
            raise ValueError("Lipschitz bound must be positive")
        self.prefix_len = prefix_len
        self.period = period
        self.description = description
        self._cache: dict[int, PiecewiseLinearMap] = {}
        self._lock = threading.Lock()

    @staticmethod
    def constant(f: PiecewiseLinearMap, description: str = "") -> "SystemSequence":
        return SystemSequence(lambda n: f, space=f.space,
                              lipschitz_bound=f.lipschitz_constant(),
                              prefix_len=0, period=1,
                              description=description or "constant")

    @staticmethod
    def periodic(prefix: Sequence[PiecewiseLinearMap],
                 cycle: Sequence[PiecewiseLinearMap],
                 description: str = "") -> "SystemSequence":
        if not cycle:
            raise ValueError("cycle must be nonempty")
        prefix, cycle = list(prefix), list(cycle)
        space = (prefix + cycle)[0].space
        for m in prefix + cycle:
            same_space(space, m.space)

        def rule(n: int) -> PiecewiseLinearMap:
            if n <= len(prefix):
                return prefix[n - 1]
            return cycle[(n - len(prefix) - 1) % len(cycle)]

        bound = max(m.lipschitz_constant() for m in prefix + cycle)
        return SystemSequence(rule, space=space, lipschitz_bound=max(bound, Fraction(1)),
                              prefix_len=len(prefix), period=len(cycle),
                              description=description or "periodic")

    def map_at(self, n: int) -> PiecewiseLinearMap:
        if n < 1:
            raise ValueError("indices are 1-based")
        with self._lock:
            hit = self._cache.get(n)
        if hit is not None:
            return hit
        f = self._rule(n)
        same_space(self.space, f.space)
        if f.lipschitz_constant() > self.lipschitz_bound:
            raise CertificateError(
                f"map at n={n} has Lipschitz constant {f.lipschitz_constant()} "
                f"> declared bound {self.lipschitz_bound}", index=n)
        with self._lock:
            self._cache[n] = f
        return f

    def composed(self, k: int, n: int, mode: str = "auto"):
        """f_k^n = f_{k+n-1} o ... o f_k; n = 0 gives the identity chain."""
        from .maps import identity_map
        if n == 0:
            return identity_map(self.space)
        return compose_chain([self.map_at(k + i) for i in range(n)], mode=mode)

    def orbit(self, x, length: int, start: int = 1) -> list[Fraction]:
        """[x, f_start(x), f_start^2(x), ...] with ``length`` entries."""
        out = [Fraction(x)]
        for i in range(length - 1):
            out.append(self.map_at(start + i).evaluate(out[-1]))
        return out

    def is_eventually_periodic(self) -> bool:
        return self.period is not None


class MeasureSequence:
    """mu_n materialized by exact pushforward from mu_1 (1-based)."""

    def __init__(self, sys: SystemSequence, mu1: RationalMeasure, *, start_index: int = 1):
        same_space(sys.space, mu1.space)
        if mu1.total_mass() != 1:
            raise ValueError("mu_1 must be a probability measure")
        self.sys = sys
        self.start_index = start_index
        self._cache: list[RationalMeasure] = [mu1]
        self._lock = threading.Lock()

    def at(self, n: int) -> RationalMeasure:
        if n < 1:
            raise ValueError("indices are 1-based")
        with self._lock:
            while len(self._cache) < n:
                m = len(self._cache)
                f = self.sys.map_at(m)
                self._cache.append(pushforward_measure(f, self._cache[-1]))
            return self._cache[n - 1]

    def verify_claimed(self, claimed: Callable[[int], RationalMeasure], horizon: int):
        """Exactly check f_n claimed(n) = claimed(n+1) for n < horizon."""
        for n in range(1, horizon):
            lhs = pushforward_measure(self.sys.map_at(n), claimed(n))
            if lhs != claimed(n + 1):
                raise CertificateError(
                    f"claimed measure sequence is not invariant at n={n}", index=n)


class SemiconjugacySpec:
    """A sequence pi_n intertwining two systems: pi_{n+1} o f_n = g_n o pi_n.

    Commutation is verified exactly (composition normal forms compared)
    on every index up to the horizon in use.
    """

    def __init__(self, rule: Callable[[int], PiecewiseLinearMap], *,
                 lipschitz_bound, period: Optional[int] = None,
                 description: str = ""):
        self._rule = rule
        self.lipschitz_bound = Fraction(lipschitz_bound)
        self.period = period
        self.description = description

    @staticmethod
    def constant(pi: PiecewiseLinearMap, description: str = "") -> "SemiconjugacySpec":
        return SemiconjugacySpec(lambda n: pi,
                                 lipschitz_bound=pi.lipschitz_constant(),
                                 period=1, description=description or "constant")

    def at(self, n: int) -> PiecewiseLinearMap:
        return self._rule(n)

    def verify_commutation(self, f_sys: SystemSequence, g_sys: SystemSequence,
                           horizon: int) -> None:
        for n in range(1, horizon + 1):
            lhs = compose(self.at(n + 1), f_sys.map_at(n))
            rhs = compose(g_sys.map_at(n), self.at(n))
            if lhs != rhs:
                raise CertificateError(
                    f"semiconjugacy does not commute at n={n}", index=n)


# -- constructions -----------------------------------------------------------


def build_system(sys: SystemSequence, mu1: RationalMeasure, *,
                 horizon: int = 0,
                 claimed: Optional[Callable[[int], RationalMeasure]] = None
                 ) -> tuple[SystemSequence, MeasureSequence]:
    """Attach an invariant measure sequence to a map sequence.

    Materializes the cache up to ``horizon``; when ``claimed`` is given,
    the claim is checked exactly against pushforward and the claimed
    values are used.
    """
    mu_seq = MeasureSequence(sys, mu1)
    if claimed is not None and horizon >= 1:
        mu_seq.verify_claimed(claimed, horizon)
    if horizon >= 1:
        mu_seq.at(horizon)
    return sys, mu_seq


def power_system(sys: SystemSequence, k: int) -> SystemSequence:
    """The k-th power system: n-th map is the exact composition f_{(n-1)k+1}^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return sys

    def rule(n: int) -> PiecewiseLinearMap:
        return sys.composed((n - 1) * k + 1, k, mode="materialize")

    period = None
    prefix = 0
    if sys.period is not None:
        from math import gcd
        period = sys.period // gcd(sys.period, k)
        prefix = -(-sys.prefix_len // k)  # ceil
    return SystemSequence(rule, space=sys.space,
                          lipschitz_bound=sys.lipschitz_bound ** k,
                          prefix_len=prefix, period=period,
                          description=f"power[{k}] of {sys.description}")


class DerivedMeasureSequence:
    """A measure sequence defined by reindexing another one's cache."""

    def __init__(self, sys: SystemSequence, fn: Callable[[int], RationalMeasure]):
        self.sys = sys
        self._fn = fn

    def at(self, n: int) -> RationalMeasure:
        if n < 1:
            raise ValueError("indices are 1-based")
        return self._fn(n)


def power_measures(mu_seq: MeasureSequence, k: int) -> DerivedMeasureSequence:
    """k-decimated measures mu_{(n-1)k+1}: the invariant sequence of the power.

    Decimation keeps pushforwards stepwise, so atoms travel pointwise and
    the sequence is exactly invariant for the power system.
    """
    psys = power_system(mu_seq.sys, k)
    return DerivedMeasureSequence(psys, lambda n: mu_seq.at((n - 1) * k + 1))


def shift_system(sys: SystemSequence, k: int) -> SystemSequence:
    """Drop the first k-1 maps: the system f_{k,oo}."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return sys
    period = sys.period
    prefix = max(0, sys.prefix_len - (k - 1)) if period is not None else 0
    return SystemSequence(lambda n: sys.map_at(n + k - 1), space=sys.space,
                          lipschitz_bound=sys.lipschitz_bound,
                          prefix_len=prefix, period=period,
                          description=f"shift[{k}] of {sys.description}")


def shift_measures(mu_seq: MeasureSequence, k: int) -> DerivedMeasureSequence:
    """Measures of the shifted system: index 1 sees mu_k of the original."""
    ssys = shift_system(mu_seq.sys, k)
    return DerivedMeasureSequence(ssys, lambda n: mu_seq.at(n + k - 1))


def restrict_system(sys: SystemSequence, mu_seq: MeasureSequence,
                    y_rule: Callable[[int], IntervalUnion], horizon: int
                    ) -> tuple[SystemSequence, MeasureSequence, Fraction]:
    """Restrict to an exactly invariant sequence Y_n of constant mass c.

    Verifies, for every n <= horizon: f_n(Y_n) is contained in Y_{n+1}
    (in the half-open algebra) and mu_n(Y_n) = c; additionally checks
    that the rescaled measures stay consistent under pushforward.  The
    restricted system keeps the same maps; its measures charge only Y_n,
    so every entropy computation automatically happens inside Y.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    c = mu_seq.at(1).measure_union(y_rule(1))
    if not (0 < c <= 1):
        raise CertificateError(f"mu_1(Y_1) = {c} is not in (0, 1]", index=1)
    for n in range(1, horizon + 1):
        y_n, y_next = y_rule(n), y_rule(n + 1)
        mass = mu_seq.at(n).measure_union(y_n)
        if mass != c:
            raise CertificateError(
                f"mu_n(Y_n) = {mass} differs from c = {c} at n={n}", index=n)
        img = sys.map_at(n).image_union(y_n)
        if not img.is_subset(y_next):
            raise CertificateError(
                f"f_n(Y_n) escapes Y_{{n+1}} at n={n}", index=n)
    nu1, got_c = mu_seq.at(1).restrict_and_rescale(y_rule(1))
    nu_seq = MeasureSequence(sys, nu1)
    for n in range(1, horizon + 1):
        expect, _ = mu_seq.at(n).restrict_and_rescale(y_rule(n))
        if nu_seq.at(n) != expect:
            raise CertificateError(
                f"rescaled measures drift from the conditional ones at n={n}",
                index=n)
    return sys, nu_seq, c


def pullback_by_semiconjugacy(pi: SemiconjugacySpec, q_seq: PartitionSequence,
                              *, f_sys: Optional[SystemSequence] = None,
                              g_sys: Optional[SystemSequence] = None,
                              horizon: int = 0) -> PartitionSequence:
    """The sequence {pi_n^{-1}(P_n)}; commutation checked when systems given."""
    if f_sys is not None and g_sys is not None and horizon >= 1:
        pi.verify_commutation(f_sys, g_sys, horizon)

    def rule(n: int) -> IntervalSetPartition:
        return pi.at(n).pullback_partition(q_seq.at(n))

    period = None
    if q_seq.period is not None and pi.period is not None:
        from math import lcm
        period = lcm(q_seq.period, pi.period)
    return PartitionSequence(rule, space=q_seq.space, bound=q_seq.bound,
                             prefix_len=q_seq.prefix_len, period=period,
                             description=f"pullback of {q_seq.description}")
