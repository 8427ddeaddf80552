"""System assembly: invariant measure caches, powers, shifts,
restrictions, semiconjugacy pullbacks."""
from fractions import Fraction as F

import pytest

from ndentropy.maps import (compose, constant_map, doubling_map,
                            glued_double_tent_map, identity_map, mirror_map,
                            pushforward_measure, tent_map)
from ndentropy.measures import RationalMeasure
from ndentropy.partitions import IntervalSetPartition, PartitionSequence
from ndentropy.sets import CIRCLE, INTERVAL, IntervalUnion
from ndentropy.systems import (CertificateError, MeasureSequence,
                               SemiconjugacySpec, SystemSequence, build_system,
                               power_measures, power_system,
                               pullback_by_semiconjugacy, restrict_system,
                               shift_measures, shift_system)

TENT = tent_map()
LEB = RationalMeasure.lebesgue()
HALVES = IntervalSetPartition.equal_cells(INTERVAL, 2)


def test_constant_tent_preserves_lebesgue_cache():
    sys, mu_seq = build_system(SystemSequence.constant(TENT), LEB, horizon=6)
    for n in range(1, 7):
        assert mu_seq.at(n) == LEB


def test_const_then_tent_atom_orbit():
    sys = SystemSequence.periodic([constant_map(INTERVAL, F(1, 2))], [TENT])
    _, mu_seq = build_system(sys, LEB, horizon=6)
    assert mu_seq.at(2) == RationalMeasure.point_mass(INTERVAL, F(1, 2))
    assert mu_seq.at(3) == RationalMeasure.point_mass(INTERVAL, 1)
    assert mu_seq.at(4) == RationalMeasure.point_mass(INTERVAL, 0)
    assert mu_seq.at(5) == mu_seq.at(4)  # fixed from here on


def test_periodic_tent_doubling_keeps_lebesgue():
    # both maps preserve Lebesgue, mixed in either order
    tent_i = TENT
    doubling_i = __import__("ndentropy").maps.PiecewiseLinearMap(
        INTERVAL, (0, F(1, 2), 1), ((2, 0), (2, -1)))
    sys = SystemSequence.periodic([], [tent_i, doubling_i])
    _, mu_seq = build_system(sys, LEB, horizon=8)
    for n in range(1, 9):
        assert mu_seq.at(n) == LEB


def test_claimed_measure_sequence_verified():
    sys = SystemSequence.constant(TENT)
    sys, mu_seq = build_system(sys, LEB, horizon=4, claimed=lambda n: LEB)
    bad = RationalMeasure(INTERVAL, [(0, F(1, 2), 2)])
    with pytest.raises(CertificateError):
        build_system(SystemSequence.constant(TENT), bad, horizon=4,
                     claimed=lambda n: bad)


def test_lipschitz_bound_enforced():
    sys = SystemSequence(lambda n: TENT, space=INTERVAL, lipschitz_bound=1)
    with pytest.raises(CertificateError):
        sys.map_at(1)


def test_power_system_examples():
    sys = SystemSequence.constant(TENT)
    assert power_system(sys, 1) is sys
    p2 = power_system(sys, 2)
    assert p2.map_at(1) == compose(TENT, TENT)
    assert p2.map_at(1).lipschitz_constant() == 4
    assert p2.lipschitz_bound == 4
    # periodic pair folds to a constant sequence g o f
    g = glued_double_tent_map()
    pair = SystemSequence.periodic([], [TENT, g])
    folded = power_system(pair, 2)
    assert folded.period == 1
    assert folded.map_at(1) == compose(g, TENT)
    assert folded.map_at(2) == folded.map_at(1)


def test_power_measures_are_invariant_for_power_system():
    sys = SystemSequence.periodic([constant_map(INTERVAL, F(1, 2))], [TENT])
    _, mu_seq = build_system(sys, LEB, horizon=8)
    psys = power_system(sys, 2)
    pmu = power_measures(mu_seq, 2)
    for n in range(1, 4):
        assert pushforward_measure(psys.map_at(n), pmu.at(n)) == pmu.at(n + 1)


def test_shift_system_examples():
    sys = SystemSequence.periodic([constant_map(INTERVAL, F(1, 2))], [TENT])
    assert shift_system(sys, 1) is sys
    s2 = shift_system(sys, 2)
    assert s2.map_at(1) == TENT
    assert s2.map_at(5) == TENT
    _, mu_seq = build_system(sys, LEB, horizon=6)
    smu = shift_measures(mu_seq, 3)
    assert smu.at(1) == mu_seq.at(3)


def test_restrict_system_glued_tents():
    sys = SystemSequence.constant(glued_double_tent_map())
    _, mu_seq = build_system(sys, LEB, horizon=6)
    y = IntervalUnion.of(0, F(1, 2))
    _, nu_seq, c = restrict_system(sys, mu_seq, lambda n: y, horizon=5)
    assert c == F(1, 2)
    assert nu_seq.at(1) == RationalMeasure(INTERVAL, [(0, F(1, 2), 2)])
    assert nu_seq.at(3) == nu_seq.at(1)


def test_restrict_whole_space_is_identity():
    sys = SystemSequence.constant(TENT)
    _, mu_seq = build_system(sys, LEB, horizon=4)
    _, nu_seq, c = restrict_system(sys, mu_seq, lambda n: IntervalUnion.full(),
                                   horizon=4)
    assert c == 1
    assert nu_seq.at(2) == LEB


def test_restrict_rejects_noninvariant_target():
    sys = SystemSequence.constant(TENT)
    _, mu_seq = build_system(sys, LEB, horizon=4)
    with pytest.raises(CertificateError) as err:
        restrict_system(sys, mu_seq, lambda n: IntervalUnion.of(0, F(1, 2)),
                        horizon=4)
    assert err.value.index is not None


def test_restrict_rejects_shrinking_mass():
    # Y_n loses mass under the glued map when it straddles the halves
    sys = SystemSequence.constant(glued_double_tent_map())
    _, mu_seq = build_system(sys, LEB, horizon=4)
    shrinking = {1: IntervalUnion.of(0, F(1, 2)), 2: IntervalUnion.of(0, F(1, 4))}

    def y_rule(n):
        return shrinking.get(n, IntervalUnion.of(0, F(1, 4)))

    with pytest.raises(CertificateError):
        restrict_system(sys, mu_seq, y_rule, horizon=3)


def test_semiconjugacy_identity_and_mirror():
    sys = SystemSequence.constant(TENT)
    q_seq = PartitionSequence.constant(HALVES)
    ident = SemiconjugacySpec.constant(identity_map())
    out = pullback_by_semiconjugacy(ident, q_seq, f_sys=sys, g_sys=sys, horizon=4)
    assert out.at(3).same_cells(HALVES)
    # x -> 1 - x conjugates the tent map to its reflection |2x - 1|
    valley_sys = SystemSequence.constant(valley_map())
    mirror = SemiconjugacySpec.constant(mirror_map())
    mirrored = pullback_by_semiconjugacy(mirror, q_seq, f_sys=sys,
                                         g_sys=valley_sys, horizon=4)
    assert mirrored.at(1).same_cells(HALVES)  # halves are mirror-symmetric
    quarters = PartitionSequence.constant(IntervalSetPartition.equal_cells(INTERVAL, 4))
    mq = pullback_by_semiconjugacy(mirror, quarters, f_sys=sys,
                                   g_sys=valley_sys, horizon=4)
    assert mq.at(1).same_cells(IntervalSetPartition.equal_cells(INTERVAL, 4))


def test_semiconjugacy_commutation_failure():
    sys_f = SystemSequence.constant(TENT)
    sys_g = SystemSequence.constant(identity_map())
    mirror = SemiconjugacySpec.constant(mirror_map())
    with pytest.raises(CertificateError):
        pullback_by_semiconjugacy(mirror, PartitionSequence.constant(HALVES),
                                  f_sys=sys_f, g_sys=sys_g, horizon=3)


def test_doubling_selfsemiconjugacy_pullback():
    # pi = doubling satisfies pi o f = f o pi for f = doubling
    d = doubling_map()
    sys = SystemSequence.constant(d)
    pi = SemiconjugacySpec.constant(d)
    halves_c = IntervalSetPartition.equal_cells(CIRCLE, 2)
    out = pullback_by_semiconjugacy(pi, PartitionSequence.constant(halves_c),
                                    f_sys=sys, g_sys=sys, horizon=3)
    assert out.at(1).same_cells(IntervalSetPartition.equal_cells(CIRCLE, 4))