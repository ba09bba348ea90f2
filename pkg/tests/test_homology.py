from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from reebcount.errors import HypothesisError, InputError, InvariantError
from reebcount.homology import (
    BettiTable,
    OrbitEntry,
    OrbitSystem,
    RankFunction,
    brieskorn_beta,
    brieskorn_double_degrees,
    brieskorn_f,
    brieskorn_g,
    brieskorn_period,
    chi_m_displaceable,
    chi_m_from_ranks,
    chi_m_orbits,
    e1_page,
    nth_admissible,
    resonance_check,
    sh_ranks_brieskorn,
    sh_ranks_displaceable,
    sh_ranks_prequantization,
    validate_displaceable_betti,
    windowed_chi_orbits,
    windowed_chi_ranks,
)
from reebcount.iteration import IterationProfile, QuadIrrational

from oracles import alt_mean, ball_ranks, brieskorn_table

ELLIPSOID = OrbitSystem((
    OrbitEntry("short", IterationProfile(2, (QuadIrrational(0, 1, 2, 2),), 2)),
    OrbitEntry("long", IterationProfile(4, (QuadIrrational(-1, 1, 2, 1),), 2)),
), 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_ball_ranks(n):
    rf = sh_ranks_displaceable(BettiTable.ball(n))
    assert rf.window(-30, 60) == {d: r for d, r in ball_ranks(n, -30, 60).items() if r}
    assert chi_m_from_ranks(rf) == Fraction((-1) ** (n + 1), 2)


def test_filling_with_middle_class():
    rf = sh_ranks_displaceable(BettiTable.for_filling(3, {2: 1}))
    assert rf.window(-5, 9) == {0: 1, 2: 1, 4: 2, 6: 2, 8: 2}
    assert chi_m_from_ranks(rf) == 1


def test_odd_class_gives_both_parities():
    rf = sh_ranks_displaceable(BettiTable.for_filling(2, {3: 1}))
    assert rf.parities() == {0, 1}
    assert all(rf.rank(d) == 1 for d in range(2, 30))


def test_betti_table_validation():
    with pytest.raises(InputError):
        BettiTable(3, {})
    with pytest.raises(InputError):
        BettiTable(4, {5: 1})
    with pytest.raises(InputError):
        sh_ranks_displaceable(BettiTable.for_filling(2, {0: 1}))
    t = BettiTable.for_filling(2, {3: 2})
    assert BettiTable.from_json(t.to_json()) == t


def test_displaceable_constraints():
    assert validate_displaceable_betti(BettiTable.ball(2), {0: 1, 3: 1}) == []
    problems = validate_displaceable_betti(BettiTable.for_filling(2, {1: 1}), {0: 1, 3: 1})
    assert any("H_1" in p for p in problems)


def test_rank_function_round_trip_and_normal_form():
    rf = RankFunction({0: 1}, 4, 4, (1, 0, 1, 0))
    norm = rf.normalized()
    assert norm.period == 2
    assert RankFunction.from_json(rf.to_json()) == norm
    assert all(norm.rank(d) == rf.rank(d) for d in range(-5, 40))


def test_odd_period_chi_rejected():
    with pytest.raises(InvariantError):
        chi_m_from_ranks(RankFunction({}, 0, 3, (1, 0, 0)))


def test_brieskorn_a0_7_table():
    rf = sh_ranks_brieskorn(7, 3)
    assert rf.window(0, 15) == {2: 1, 4: 1, 6: 2, 8: 2, 10: 1, 12: 1, 14: 2}
    assert chi_m_from_ranks(rf) == Fraction(5, 6)
    assert brieskorn_period(7, 3) == 18
    assert brieskorn_beta(7, 3) == 121


@pytest.mark.parametrize("a0,n", [(7, 3), (9, 3), (7, 5), (15, 3), (17, 5)])
def test_brieskorn_against_enumeration(a0, n):
    hi = 300
    expected = {d: r for d, r in brieskorn_table(a0, n, hi).items() if r}
    assert sh_ranks_brieskorn(a0, n).window(-20, hi) == expected


@pytest.mark.parametrize("n", [2, 3, 5])
def test_brieskorn_a0_1_is_ball(n):
    a = sh_ranks_brieskorn(1, n)
    b = sh_ranks_displaceable(BettiTable.ball(n))
    assert all(a.rank(d) == b.rank(d) for d in range(-50, 201))


def test_brieskorn_input_checks():
    with pytest.raises(InputError):
        sh_ranks_brieskorn(3, 3)
    with pytest.raises(InputError):
        sh_ranks_brieskorn(8, 3)
    with pytest.raises(InputError):
        sh_ranks_brieskorn(7, 4)
    assert sh_ranks_brieskorn(3, 3, override=True).rank(2) == 1


def test_closed_form_g_versus_enumeration():
    # the closed form skips the admissible value 11 for a0 = 7
    assert [brieskorn_g(N, 7) for N in range(8, 12)] == [9, 10, 12, 13]
    assert [nth_admissible(N, 7) for N in range(8, 12)] == [9, 11, 12, 13]
    assert (2 * 10 + 1) % 7 == 0


def test_double_degrees_progression():
    degs = brieskorn_double_degrees(7, 3, 200)
    assert degs[:4] == [6, 8, 14, 16]
    assert all(b - a == 18 for a, b in zip(degs, degs[6:]))
    assert brieskorn_f(3, 7, 3) == 10


def test_prequantization_sphere():
    up = sh_ranks_prequantization({0: 1, 2: 1}, 2, 2)
    assert up.window(-10, 12) == {3: 1, 5: 1, 7: 1, 9: 1, 11: 1}
    down = sh_ranks_prequantization({0: 1, 2: 1}, -2, 2)
    assert down.descending
    assert down.window(-12, 10) == {-11: 1, -9: 1, -7: 1, -5: 1, -3: 1}
    assert chi_m_from_ranks(up) == chi_m_from_ranks(down) == Fraction(-1, 2)


def test_prequantization_hypotheses():
    with pytest.raises(HypothesisError):
        sh_ranks_prequantization({0: 1, 2: 1}, 1, 2)
    with pytest.raises(InputError):
        sh_ranks_prequantization({0: 1}, 3, 2)


def test_ellipsoid_resonance():
    assert chi_m_orbits(ELLIPSOID) == sympy.Rational(-1, 2)
    rep = resonance_check(ELLIPSOID, sh_ranks_displaceable(BettiTable.ball(2)), 2000)
    assert rep.passed
    assert abs(windowed_chi_orbits(ELLIPSOID, 2000) - Fraction(-1, 2)) < Fraction(1, 500)


def test_system_json_round_trip():
    assert OrbitSystem.from_json(ELLIPSOID.to_json()) == ELLIPSOID


def test_nonpositive_mean_index_rejected():
    sys_ = OrbitSystem((OrbitEntry("neg", IterationProfile(-2, (), 2)),), 2)
    with pytest.raises(HypothesisError):
        chi_m_orbits(sys_)


def test_e1_page_drops_bad_covers():
    assert e1_page([(3, True), (4, False), (3, True)]) == {(3, 0): 2}


_betti = st.integers(2, 5).flatmap(
    lambda n: st.dictionaries(st.integers(2, 2 * n - 1), st.integers(0, 4), max_size=6).map(
        lambda vals: BettiTable.for_filling(n, vals)
    )
)


@settings(max_examples=50, deadline=None)
@given(_betti)
def test_chi_closed_form_agrees(betti):
    rf = sh_ranks_displaceable(betti)
    assert chi_m_from_ranks(rf) == chi_m_displaceable(betti)


@settings(max_examples=40, deadline=None)
@given(_betti)
def test_windowed_chi_converges(betti):
    rf = sh_ranks_displaceable(betti)
    N = 400
    total = sum(betti.values.values())
    assert abs(windowed_chi_ranks(rf, N) - chi_m_from_ranks(rf)) <= Fraction(4 * total + 4, N)
    assert alt_mean(rf, 50, 50 + 2 * rf.period) == chi_m_from_ranks(rf)
