"""Entropy calculus for static partitions: spec examples plus the
conditional-entropy laws checked against brute-force mass tables."""
import math
import random
from fractions import Fraction as F

import pytest

from ndentropy.measures import RationalMeasure
from ndentropy.partitions import (IntervalSetPartition, PartitionSequence,
                                  conditional_entropy, equal_mod_null,
                                  is_finer, join, partition_entropy,
                                  rokhlin_distance)
from ndentropy.sets import INTERVAL, IntervalUnion

LEB = RationalMeasure.lebesgue()
HALVES = IntervalSetPartition.equal_cells(INTERVAL, 2)
QUARTERS = IntervalSetPartition.equal_cells(INTERVAL, 4)
TRIVIAL = IntervalSetPartition.trivial()
# the 'independent companion' of halves: [0,1/4) u [1/2,3/4) and the rest
INDEP = IntervalSetPartition.from_cells(INTERVAL, [
    IntervalUnion([(F(0), F(1, 4)), (F(1, 2), F(3, 4))]),
    IntervalUnion([(F(1, 4), F(1, 2)), (F(3, 4), F(1))]),
])


def test_entropy_of_equal_cells_is_log_k():
    assert partition_entropy(LEB, QUARTERS) == pytest.approx(math.log(4), abs=1e-12)
    assert partition_entropy(LEB, QUARTERS, base=2) == pytest.approx(2.0, abs=1e-12)


def test_entropy_of_trivial_partition_is_zero():
    assert partition_entropy(LEB, TRIVIAL) == 0.0


def test_entropy_hand_oracle_half_quarter_quarter():
    # direct evaluation of -sum m log m for masses (1/2, 1/4, 1/4)
    p = IntervalSetPartition.from_cut_points(INTERVAL, [F(1, 2), F(3, 4)])
    expected = 0.5 * math.log(2) + 2 * 0.25 * math.log(4)
    assert partition_entropy(LEB, p) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(1.5 * math.log(2), abs=1e-12)


def test_entropy_upper_bound_tight_only_for_equal_masses():
    p = IntervalSetPartition.from_cut_points(INTERVAL, [F(1, 3)])
    assert partition_entropy(LEB, p) < math.log(2)
    assert partition_entropy(LEB, HALVES) == pytest.approx(math.log(2), abs=1e-14)


def test_conditional_entropy_vanishes_iff_finer():
    assert conditional_entropy(LEB, HALVES, QUARTERS) == 0.0
    assert conditional_entropy(LEB, HALVES, HALVES) == 0.0
    assert conditional_entropy(LEB, QUARTERS, HALVES) == pytest.approx(math.log(2), abs=1e-12)


def test_conditional_entropy_independent_pair():
    # brute-force 2x2 table: every joint mass is 1/4, marginals 1/2
    masses = [[LEB.measure_union(HALVES.cell(i).intersect(INDEP.cell(j)))
               for j in range(2)] for i in range(2)]
    assert masses == [[F(1, 4), F(1, 4)], [F(1, 4), F(1, 4)]]
    assert conditional_entropy(LEB, HALVES, INDEP) == pytest.approx(math.log(2), abs=1e-12)


def test_join_examples():
    assert join(HALVES, TRIVIAL).same_cells(HALVES)
    assert join(HALVES, QUARTERS).same_cells(QUARTERS)
    four = join(HALVES, INDEP)
    assert four.cell_count == 4
    assert four.masses(LEB) == [F(1, 4)] * 4


def test_is_finer():
    assert is_finer(QUARTERS, HALVES)
    assert not is_finer(HALVES, QUARTERS)
    j = join(HALVES, INDEP)
    assert is_finer(j, HALVES)
    assert is_finer(j, INDEP)
    assert not is_finer(HALVES, j)


def test_join_masses_agree_with_pairwise_sweep():
    # exactness cross-check: global breakpoint merge vs pairwise intersections
    j = join(QUARTERS, INDEP)
    sweep = sorted(LEB.measure_union(QUARTERS.cell(i).intersect(INDEP.cell(k)))
                   for i in range(4) for k in range(2)
                   if QUARTERS.cell(i).intersect(INDEP.cell(k)))
    assert sorted(j.masses(LEB)) == sweep


def test_equal_mod_null():
    mu = RationalMeasure(INTERVAL, [(0, F(1, 2), 2)])
    p = IntervalSetPartition.from_cut_points(INTERVAL, [F(1, 2)])
    q = IntervalSetPartition.from_cut_points(INTERVAL, [F(1, 2), F(3, 4)])
    assert not p.same_cells(q)
    assert equal_mod_null(p, q, mu)       # they differ only on a null set
    assert not equal_mod_null(p, q, LEB)


def test_rokhlin_distance_examples():
    mu_seq = _ConstSeq(LEB)
    p = PartitionSequence.constant(HALVES)
    q = PartitionSequence.constant(QUARTERS)
    assert rokhlin_distance(mu_seq, p, p, horizon=4) == 0.0
    d_pq = rokhlin_distance(mu_seq, p, q, horizon=4)
    d_qp = rokhlin_distance(mu_seq, q, p, horizon=4)
    assert d_pq == pytest.approx(d_qp, abs=0)
    assert d_pq == pytest.approx(math.log(2), abs=1e-12)
    with pytest.raises(ValueError):
        rokhlin_distance(mu_seq, p, q, horizon=0)


class _ConstSeq:
    def __init__(self, mu):
        self.mu = mu

    def at(self, n):
        return self.mu


def _random_dyadic_partition(rng, level=3, max_cells=4):
    cuts = [F(i, 2 ** level) for i in range(2 ** level + 1)]
    k = rng.randint(1, max_cells)
    labels = [rng.randrange(k) for _ in range(2 ** level)]
    # ensure every label occurs
    for lab in range(k):
        labels[rng.randrange(len(labels))] = lab
    relabel = {}
    canon = []
    for lab in labels:
        relabel.setdefault(lab, len(relabel))
        canon.append(relabel[lab])
    return IntervalSetPartition(INTERVAL, cuts, canon)


def _random_measure(rng):
    vals = [F(rng.randint(1, 5)) for _ in range(4)]
    total = sum(v for v in vals) * F(1, 4)
    return RationalMeasure(INTERVAL, [(F(i, 4), F(i + 1, 4), v / total)
                                      for i, v in enumerate(vals)])


def test_conditional_entropy_laws_random():
    """Prop-style laws on random partition triples under random measures."""
    rng = random.Random(20260810)
    for _ in range(60):
        mu = _random_measure(rng)
        p = _random_dyadic_partition(rng)
        q = _random_dyadic_partition(rng)
        r = _random_dyadic_partition(rng)
        Hp = partition_entropy(mu, p)
        Hpq = conditional_entropy(mu, p, q)
        # bounds
        assert -1e-12 <= Hpq <= Hp + 1e-12
        # chain rule
        lhs = conditional_entropy(mu, join(p, q), r)
        rhs = conditional_entropy(mu, p, r) + conditional_entropy(mu, q, join(p, r))
        assert lhs == pytest.approx(rhs, abs=1e-12)
        # monotonicity in the conditioning partition
        assert conditional_entropy(mu, p, join(q, r)) <= conditional_entropy(mu, p, q) + 1e-12
        # triangle inequality
        assert conditional_entropy(mu, p, r) <= (conditional_entropy(mu, p, q)
                                                 + conditional_entropy(mu, q, r) + 1e-12)
        # subadditivity of plain entropy
        assert partition_entropy(mu, join(p, q)) <= (partition_entropy(mu, p)
                                                     + partition_entropy(mu, q) + 1e-12)


def test_partition_sequence_bound_enforced():
    seq = PartitionSequence.from_function(
        lambda n: IntervalSetPartition.equal_cells(INTERVAL, 2 ** n),
        space=INTERVAL, bound=4)
    seq.at(1)
    seq.at(2)
    with pytest.raises(ValueError):
        seq.at(3)


def test_partition_sequence_periodic():
    seq = PartitionSequence.periodic([TRIVIAL], [HALVES, QUARTERS])
    assert seq.at(1).same_cells(TRIVIAL)
    assert seq.at(2).same_cells(HALVES)
    assert seq.at(3).same_cells(QUARTERS)
    assert seq.at(4).same_cells(HALVES)
    assert seq.is_eventually_periodic()
