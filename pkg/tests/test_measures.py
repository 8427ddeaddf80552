from fractions import Fraction as F

import pytest

from ndentropy.measures import RationalMeasure
from ndentropy.sets import CIRCLE, INTERVAL, IntervalUnion


def test_total_mass_must_be_one():
    with pytest.raises(ValueError):
        RationalMeasure(INTERVAL, [(0, F(1, 2), 1)])
    RationalMeasure(INTERVAL, [(0, F(1, 2), 2)])  # fine


def test_lebesgue_measures_intervals_exactly():
    leb = RationalMeasure.lebesgue()
    assert leb.measure_union(IntervalUnion.of(F(1, 3), F(2, 3))) == F(1, 3)
    assert leb.measure_union(IntervalUnion.full()) == 1


def test_mixed_measure_and_atom_at_one():
    mu = RationalMeasure(INTERVAL, [(0, F(1, 2), 1)], [(F(1, 2), F(1, 4)), (1, F(1, 4))])
    left = IntervalUnion.of(0, F(1, 2))
    right = IntervalUnion.of(F(1, 2), 1)
    assert mu.measure_union(left) == F(1, 2)
    # the atom at 1 glues onto the set owning the right endpoint
    assert mu.measure_union(right) == F(1, 2)
    assert mu.measure_union(left.union(right)) == 1


def test_atoms_merge_and_sort():
    mu = RationalMeasure(INTERVAL, [], [(F(1, 2), F(1, 2)), (F(1, 2), F(1, 4)), (0, F(1, 4))])
    assert mu.atoms == ((F(0), F(1, 4)), (F(1, 2), F(3, 4)))


def test_circle_atom_wraps():
    mu = RationalMeasure(CIRCLE, [], [(1, 1)])
    assert mu.atoms == ((F(0), F(1)),)


def test_restrict_and_rescale():
    mu = RationalMeasure.lebesgue()
    nu, c = mu.restrict_and_rescale(IntervalUnion.of(0, F(1, 2)))
    assert c == F(1, 2)
    assert nu.measure_union(IntervalUnion.of(0, F(1, 4))) == F(1, 2)
    assert nu.total_mass() == 1


def test_masses_on_cuts_assigns_every_atom_once():
    mu = RationalMeasure(INTERVAL, [], [(0, F(1, 3)), (F(1, 2), F(1, 3)), (1, F(1, 3))])
    cuts = [F(0), F(1, 2), F(1)]
    masses = mu.masses_on_cuts(cuts, [0, 1], 2)
    assert masses == [F(1, 3), F(2, 3)]
    assert sum(masses) == 1
