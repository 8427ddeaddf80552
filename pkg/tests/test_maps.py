"""Piecewise-linear map machinery: evaluation, composition, preimages,
pushforward, and the transfer operator, all against hand oracles."""
import random
from fractions import Fraction as F

import pytest

from ndentropy.maps import (PiecewiseLinearMap, StepDensity, UnsupportedMapError,
                            affine_map, compose, compose_chain, constant_map,
                            density_ratio_diagnostic, doubling_map,
                            glued_double_tent_map, identity_map, mirror_map,
                            polyline_map, pushforward_measure, tent_map,
                            times_k_mod1_map, transfer_density)
from ndentropy.measures import RationalMeasure
from ndentropy.partitions import IntervalSetPartition
from ndentropy.sets import CIRCLE, INTERVAL, IntervalUnion

TENT = tent_map()
DOUBLING = doubling_map()
ID = identity_map()
LEB = RationalMeasure.lebesgue()
HALVES = IntervalSetPartition.equal_cells(INTERVAL, 2)


def U(*pairs):
    return IntervalUnion([(F(a), F(b)) for a, b in pairs])


# -- evaluation -------------------------------------------------------------

def test_tent_evaluation():
    assert TENT(F(1, 3)) == F(2, 3)
    assert TENT(F(3, 4)) == F(1, 2)
    assert TENT(F(1, 2)) == 1
    assert TENT(1) == 0


def test_identity_and_constant():
    assert ID(F(5, 7)) == F(5, 7)
    c = constant_map(INTERVAL, F(1, 2))
    assert c(0) == c(1) == F(1, 2)


def test_circle_evaluation_wraps():
    assert DOUBLING(F(3, 4)) == F(1, 2)
    assert DOUBLING(F(1, 2)) == 0
    tripling = times_k_mod1_map(3)
    assert tripling(F(5, 6)) == F(1, 2)


def test_domain_check():
    with pytest.raises(ValueError):
        TENT(F(3, 2))


def test_lipschitz_and_continuity():
    assert TENT.lipschitz_constant() == 2
    assert TENT.is_continuous()
    assert DOUBLING.is_continuous()  # jumps by exactly 1 are continuous mod 1
    glued = glued_double_tent_map()
    assert not glued.is_continuous()
    assert mirror_map().is_monotone_bijection()
    assert not TENT.is_monotone_bijection()


# -- composition -------------------------------------------------------------

def test_compose_with_identity_is_normal_form_identity():
    assert compose(ID, TENT) == TENT
    assert compose(TENT, ID) == TENT


def test_tent_squared_oracle():
    # symbolic branch composition: four laps with slopes +-4
    tt = compose(TENT, TENT)
    assert tt.cuts == (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))
    assert tt.pieces == ((F(4), F(0)), (F(-4), F(2)), (F(4), F(-2)), (F(-4), F(4)))
    for x in [F(1, 8), F(3, 8), F(5, 8), F(9, 16), F(15, 16)]:
        assert tt(x) == TENT(TENT(x))


def test_doubling_squared_is_times_four():
    dd = compose(DOUBLING, DOUBLING)
    assert dd == times_k_mod1_map(4)
    for x in [F(1, 8), F(1, 3), F(7, 9)]:
        assert dd(x) == DOUBLING(DOUBLING(x))


def test_compose_associativity_normal_forms():
    maps = [TENT, glued_double_tent_map(), mirror_map()]
    f, g, h = maps
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
    c1 = compose(compose(DOUBLING, times_k_mod1_map(3)), DOUBLING)
    c2 = compose(DOUBLING, compose(times_k_mod1_map(3), DOUBLING))
    assert c1 == c2 == times_k_mod1_map(12)


def test_compose_pointwise_agreement_generic_points():
    rng = random.Random(7)
    fg = compose(TENT, glued_double_tent_map())
    for _ in range(50):
        x = F(rng.randint(0, 997), 997)  # prime denominator dodges breakpoints
        assert fg(x) == TENT(glued_double_tent_map()(x))


def test_compose_chain_modes():
    chain = compose_chain([TENT] * 20)  # auto -> iterate above 12 steps
    assert not isinstance(chain, PiecewiseLinearMap)
    eager = compose_chain([TENT] * 3, mode="materialize")
    assert isinstance(eager, PiecewiseLinearMap)
    x = F(3, 997)
    assert eager(x) == TENT(TENT(TENT(x)))
    # both modes agree pointwise (eager at a depth that stays materializable)
    small = compose_chain([TENT] * 9, mode="materialize")
    lazy = compose_chain([TENT] * 9, mode="iterate")
    assert small(x) == lazy.evaluate(x)


# -- preimages ----------------------------------------------------------------

def test_tent_preimage_of_left_half():
    assert TENT.preimage_union(U((0, "1/2"))) == U((0, "1/4"), ("3/4", 1))


def test_identity_and_constant_preimages():
    t = U(("1/3", "2/3"))
    assert ID.preimage_union(t) == t
    c = constant_map(INTERVAL, F(1, 2))
    assert c.preimage_union(t) == IntervalUnion.full()
    assert c.preimage_union(U((0, "1/4"))) == IntervalUnion.empty()


def test_circle_preimage():
    assert DOUBLING.preimage_union(U((0, "1/2"))) == U((0, "1/4"), ("1/2", "3/4"))


def test_preimage_respects_unions_and_intersections():
    rng = random.Random(11)
    for f in (TENT, DOUBLING if False else TENT, glued_double_tent_map()):
        for _ in range(25):
            pts = sorted(F(rng.randint(0, 32), 32) for _ in range(4))
            a = IntervalUnion([(pts[0], pts[1])])
            b = IntervalUnion([(pts[2], pts[3])])
            assert f.preimage_union(a.union(b)) == \
                f.preimage_union(a).union(f.preimage_union(b))
            assert f.preimage_union(a.intersect(b)) == \
                f.preimage_union(a).intersect(f.preimage_union(b))


# -- partition pullback --------------------------------------------------------

def test_pullback_examples():
    assert ID.pullback_partition(HALVES).same_cells(HALVES)
    pulled = TENT.pullback_partition(HALVES)
    expect = IntervalSetPartition.from_cells(INTERVAL, [
        U((0, "1/4"), ("3/4", 1)), U(("1/4", "3/4"))])
    assert pulled.same_cells(expect)
    c = constant_map(INTERVAL, F(1, 2))
    assert c.pullback_partition(HALVES).cell_count == 1


def test_pullback_is_exact_partition():
    rng = random.Random(13)
    for _ in range(20):
        cuts = sorted({F(rng.randint(1, 15), 16) for _ in range(3)})
        p = IntervalSetPartition.from_cut_points(INTERVAL, cuts)
        pulled = TENT.pullback_partition(p)  # from_cells validates exactness
        assert sum(pulled.masses(LEB)) == 1


# -- pushforward ----------------------------------------------------------------

def test_tent_and_doubling_preserve_lebesgue():
    assert pushforward_measure(TENT, LEB) == LEB
    leb_c = RationalMeasure.lebesgue(CIRCLE)
    assert pushforward_measure(DOUBLING, leb_c) == leb_c


def test_constant_map_pushforward_is_atom():
    nu = pushforward_measure(constant_map(INTERVAL, F(1, 2)), LEB)
    assert nu == RationalMeasure.point_mass(INTERVAL, F(1, 2))


def test_pushforward_of_atoms_is_pointwise():
    mu = RationalMeasure(INTERVAL, [], [(F(1, 2), F(1, 2)), (F(1, 3), F(1, 2))])
    nu = pushforward_measure(TENT, mu)
    assert nu.atoms == ((F(2, 3), F(1, 2)), (F(1), F(1, 2)))


def test_pushforward_mass_always_one():
    rng = random.Random(17)
    for _ in range(20):
        vals = [F(rng.randint(0, 4)) for _ in range(4)]
        if sum(vals) == 0:
            vals[0] = F(1)
        total = sum(vals) * F(1, 4)
        mu = RationalMeasure(INTERVAL, [(F(i, 4), F(i + 1, 4), v / total)
                                        for i, v in enumerate(vals) if v > 0])
        for f in (TENT, glued_double_tent_map(), mirror_map()):
            assert pushforward_measure(f, mu).total_mass() == 1


# -- transfer operator -------------------------------------------------------------

def test_transfer_uniform_is_fixed():
    u = StepDensity.uniform(CIRCLE)
    assert transfer_density(DOUBLING, u) == u


def test_transfer_doubling_oracle():
    phi = StepDensity(CIRCLE, [(0, F(1, 2), 2), (F(1, 2), 1, 0)])
    out = transfer_density(DOUBLING, phi)
    # oracle: (phi(x/2) + phi((x+1)/2)) / 2 == 1 everywhere
    assert out == StepDensity.uniform(CIRCLE)


def test_transfer_tent_oracle():
    phi = StepDensity(INTERVAL, [(0, F(1, 2), 2), (F(1, 2), 1, 0)])
    assert transfer_density(tent_map(), phi) == StepDensity.uniform(INTERVAL)


def test_transfer_matches_pushforward_exactly():
    rng = random.Random(19)
    for _ in range(15):
        vals = [F(rng.randint(1, 5)) for _ in range(4)]
        total = sum(vals) * F(1, 4)
        phi = StepDensity(INTERVAL, [(F(i, 4), F(i + 1, 4), v / total)
                                     for i, v in enumerate(vals)])
        for f in (TENT, glued_double_tent_map()):
            assert transfer_density(f, phi).as_measure() == \
                pushforward_measure(f, phi.as_measure())


def test_transfer_rejects_flat_pieces():
    with pytest.raises(UnsupportedMapError):
        transfer_density(constant_map(INTERVAL, F(1, 2)), StepDensity.uniform())


# -- density diagnostics --------------------------------------------------------------

def test_diagnostic_uniform_density():
    d = density_ratio_diagnostic(StepDensity.uniform(), F(1, 100))
    assert d.ratio_lipschitz == 0
    assert d.positive and not d.unbounded_below_scale


def test_diagnostic_jump_blows_up_at_small_scales():
    phi = StepDensity(INTERVAL, [(0, F(1, 2), F(1, 2)), (F(1, 2), 1, F(3, 2))])
    d1 = density_ratio_diagnostic(phi, F(1, 10))
    d2 = density_ratio_diagnostic(phi, F(1, 1000))
    assert d2.ratio_lipschitz == 100 * d1.ratio_lipschitz
    assert d1.unbounded_below_scale and d2.unbounded_below_scale
    # the worst ratio pair is 3/2 against 1/2: |3 - 1| / eps
    assert d1.ratio_lipschitz == F(2) / F(1, 10)


def test_diagnostic_flags_nonpositive():
    phi = StepDensity(INTERVAL, [(0, F(1, 2), 2), (F(1, 2), 1, 0)])
    d = density_ratio_diagnostic(phi, F(1, 10))
    assert not d.positive and d.failure is not None


def test_diagnostic_shrinks_under_iterated_transfer():
    # oscillation averages out under the doubling transfer operator
    phi = StepDensity(CIRCLE, [(0, F(1, 4), F(3, 2)), (F(1, 4), F(1, 2), F(1, 2)),
                               (F(1, 2), F(3, 4), F(3, 2)), (F(3, 4), 1, F(1, 2))])
    eps = F(1, 64)
    ls = []
    for _ in range(4):
        ls.append(density_ratio_diagnostic(phi, eps).ratio_lipschitz)
        phi = transfer_density(doubling_map(), phi)
    ls.append(density_ratio_diagnostic(phi, eps).ratio_lipschitz)
    assert all(b <= a for a, b in zip(ls, ls[1:]))
    assert ls[-1] == 0
