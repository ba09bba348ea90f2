import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from reebcount.errors import IndexUndefinedError, InputError, ResolutionError
from reebcount.indexcalc import (
    SymplecticPath,
    cz_index,
    extension_winding,
    hyperbolic_path,
    iterate_path,
    mean_index_of_path,
    rotation_path,
    rho_winding,
)
from reebcount.symplin import hyperbolic, identity, rotation, rotation_by_angle


def expected_cz(a):
    return 2 * math.floor(a) + 1


@pytest.mark.parametrize("a", [Fraction(1, 4), Fraction(3, 4), Fraction(-1, 3), Fraction(5, 2), Fraction(-17, 4)])
def test_rotation_path_index(a):
    path = rotation_path(a, samples=max(50, int(abs(a) * 20) + 10))
    assert cz_index(path) == expected_cz(a)
    assert abs(mean_index_of_path(path) - 2 * a) < 1e-9


def test_hyperbolic_path_index_zero():
    assert cz_index(hyperbolic_path(2)) == 0


def test_iterated_path_matches_k_times_mean():
    path = rotation_path(Fraction(2, 7), samples=60)
    path3 = iterate_path(path, 3)
    assert abs(rho_winding(path3) - 12 / 7) < 1e-9
    assert cz_index(path3) == expected_cz(Fraction(6, 7))


def test_degenerate_endpoint_rejected():
    with pytest.raises(IndexUndefinedError):
        extension_winding(identity(2))


def test_too_coarse_path_reports_interval():
    with pytest.raises(ResolutionError) as err:
        cz_index(rotation_path(Fraction(7, 2), samples=6))
    assert err.value.interval is not None


def test_path_needs_interior_sample():
    with pytest.raises(ResolutionError):
        SymplecticPath(((0, identity(2)), (1, rotation(0, 1))), 1)


def test_path_must_start_at_identity():
    with pytest.raises(InputError):
        SymplecticPath(((0, rotation(0, 1)), (Fraction(1, 2), rotation(0, 1)), (1, rotation(0, 1))), 1)


def test_path_json_round_trip():
    path = rotation_path(Fraction(1, 4), samples=8)
    again = SymplecticPath.from_json(path.to_json())
    assert again == path
    assert cz_index(again) == 1


def test_extension_winding_of_rotation():
    m = rotation_by_angle(math.pi / 2, 80)
    assert abs(extension_winding(m) - 0.5) < 1e-12
    assert extension_winding(hyperbolic(3)) == 0.0


_a = st.fractions(min_value=-5, max_value=5, max_denominator=50).filter(lambda a: a.denominator != 1)


@settings(max_examples=20, deadline=None)
@given(_a)
def test_rotation_oracle_property(a):
    samples = int(abs(a) * 12) + 12
    path = rotation_path(a, samples=samples)
    assert cz_index(path) == expected_cz(a)
    assert abs(mean_index_of_path(path) - 2 * float(a)) < 1e-9
    fine = rotation_path(a, samples=2 * samples)
    assert cz_index(fine) == cz_index(path)
