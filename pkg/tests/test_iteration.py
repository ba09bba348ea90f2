from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from reebcount.errors import GuardExceededError, InputError, InvariantError
from reebcount.iteration import (
    GuardedRational,
    IterationProfile,
    LongData,
    QuadIrrational,
    floor_multiple,
    index_sequence,
    is_good,
    iterated_index,
    mean_index,
    mean_index_exact,
    monotonicity_report,
    profile_shapes,
    sum_angles,
    verify_sz_bound,
)

from oracles import floor_multiple_mp, index_mp
from strategies import profiles, quad_angles

INV_SQRT2 = QuadIrrational(0, 1, 2, 2)
SQRT2_M1 = QuadIrrational(-1, 1, 2, 1)


def test_quad_floor_small_values():
    assert [INV_SQRT2.floor_multiple(k) for k in range(1, 8)] == [0, 1, 2, 2, 3, 4, 4]


def test_quad_rejects_out_of_range_and_square_d():
    with pytest.raises(InputError):
        QuadIrrational(1, 1, 2, 1)
    with pytest.raises(InputError):
        QuadIrrational(0, 1, 4, 3)
    with pytest.raises(InputError):
        QuadIrrational(1, 0, 2, 3)


def test_quad_compare_and_shift():
    assert INV_SQRT2.compare(Fraction(7, 10)) == 1
    assert INV_SQRT2.compare(Fraction(71, 100)) == -1
    other = INV_SQRT2.shifted(Fraction(3, 2))
    assert abs(other.value + INV_SQRT2.value - Fraction(3, 2).numerator / 2) < 1e-30


def test_guarded_rational_contract():
    t = GuardedRational(1, 1_000_003)
    assert t.floor_multiple(10) == 0
    with pytest.raises(GuardExceededError):
        t.floor_multiple(10**6 + 1)
    with pytest.raises(InputError):
        GuardedRational(1, 3)
    with pytest.raises(InputError):
        GuardedRational(2, 2_000_000)


def test_floor_multiple_rejects_bad_k():
    with pytest.raises(InputError):
        floor_multiple(INV_SQRT2, 0)


def test_hyperbolic_doubling():
    p = IterationProfile(2, (), 2)
    assert index_sequence(p, 4).values == (2, 4, 6, 8)


def test_odd_r_gives_bad_even_covers():
    p = IterationProfile(3, (), 2)
    assert [is_good(p, k) for k in range(1, 5)] == [True, False, True, False]


def test_ellipsoid_orbits():
    short = IterationProfile(2, (INV_SQRT2,), 2)
    long = IterationProfile(4, (SQRT2_M1,), 2)
    assert [iterated_index(short, k) for k in range(1, 5)] == [3, 7, 11, 13]
    assert [iterated_index(long, k) for k in range(1, 4)] == [5, 9, 15]
    assert str(mean_index_exact(short)) == "sqrt(2) + 2"


def test_too_many_angles_rejected():
    with pytest.raises(InputError):
        IterationProfile(0, (INV_SQRT2, INV_SQRT2), 2)


def test_long_form_cross_check():
    ld = LongData((3,), (0,), (1,), (INV_SQRT2,))
    prof = IterationProfile(3, (INV_SQRT2,), 2, ld)
    assert iterated_index(prof, 5) == 5 * 3 + 2 * 3 + 1
    with pytest.raises(InvariantError):
        IterationProfile(2, (INV_SQRT2,), 2, ld)


def test_profile_json_round_trip():
    p = IterationProfile(-1, (INV_SQRT2, GuardedRational(3, 1_000_001)), 3)
    assert IterationProfile.from_json(p.to_json()) == p


def test_profile_shapes_and_sum():
    assert profile_shapes(3, 2) == [(0, 2), (1, 1), (2, 0)]
    assert sum_angles([GuardedRational(1, 1_000_001), GuardedRational(2, 1_000_001)]) == Fraction(3, 1_000_001)
    assert sum_angles([INV_SQRT2]) is None


def test_strict_gap_for_index_n_plus_one():
    p = IterationProfile(2, (INV_SQRT2,), 2)  # mu1 = 3 = n + 1
    rep = monotonicity_report(p, 50)
    assert rep.gap2 and rep.strict_gap_found_at is not None and rep.consistent


@settings(max_examples=200, deadline=None)
@given(quad_angles(), st.integers(1, 5000))
def test_exact_floor_matches_high_precision(theta, k):
    assert theta.floor_multiple(k) == floor_multiple_mp(theta.p, theta.q, theta.d, theta.s, k)


@settings(max_examples=100, deadline=None)
@given(profiles(), st.integers(1, 300))
def test_index_matches_oracle(profile, k):
    angles = [(t.p, t.q, t.d, t.s) for t in profile.thetas]
    assert iterated_index(profile, k) == index_mp(profile.r, angles, k)


@settings(max_examples=100, deadline=None)
@given(profiles())
def test_parity_law(profile):
    seq = index_sequence(profile, 60)
    for k, (mu, good) in enumerate(zip(seq.values, seq.good_flags), start=1):
        assert good == is_good(profile, k)
        if good:
            assert mu % 2 == profile.mu1 % 2


@settings(max_examples=60, deadline=None)
@given(profiles())
def test_sz_bound(profile):
    res = verify_sz_bound(profile, 200)
    assert res.holds


@settings(max_examples=60, deadline=None)
@given(profiles())
def test_mean_index_is_limit_slope(profile):
    k = 4000
    assert abs(iterated_index(profile, k) / k - mean_index(profile)) < profile.ambient_n / k


@settings(max_examples=100, deadline=None)
@given(profiles())
def test_monotonicity_predicates(profile):
    assert monotonicity_report(profile, 120).consistent
