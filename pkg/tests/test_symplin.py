import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from reebcount.errors import DimensionError, InvariantError, PreconditionError
from reebcount.symplin import (
    NondegeneracyClass,
    SymplecticMatrix,
    angle_of,
    det,
    diamond,
    diamond_all,
    hyperbolic,
    identity,
    is_symplectic,
    jordan_n1,
    n2_block,
    nondegeneracy_class,
    normal_form_decomposition,
    nu,
    parse_matrix_json,
    random_symplectic,
    rational_circle_point,
    rho_angle,
    rotation,
    rotation_by_angle,
    spectrum,
    sub_scalar,
    totally_nondegenerate,
)

from oracles import numeric_eigs

F = Fraction


def test_identity_and_standard_examples_are_symplectic():
    assert is_symplectic(identity(4).entries)
    assert is_symplectic(hyperbolic(3).entries)
    assert is_symplectic(rotation(F(3, 5), F(4, 5)).entries)
    assert is_symplectic(n2_block(F(3, 5), F(4, 5)).entries)


def test_non_symplectic_entries_rejected():
    with pytest.raises(InvariantError):
        SymplecticMatrix(((F(1), F(1)), (F(1), F(1))))


def test_odd_dimension_rejected():
    with pytest.raises(DimensionError):
        is_symplectic(((F(1),),))


def test_rotation_must_lie_on_circle():
    with pytest.raises(Exception):
        rotation(F(1, 2), F(1, 2))


def test_nondegeneracy_classes():
    assert nondegeneracy_class(identity(2)) is NondegeneracyClass.DEGENERATE
    assert nondegeneracy_class(hyperbolic(2)) is NondegeneracyClass.MINUS
    assert nondegeneracy_class(hyperbolic(-2)) is NondegeneracyClass.PLUS
    assert nondegeneracy_class(rotation(0, 1)) is NondegeneracyClass.PLUS


def test_spectrum_of_rotation_has_positive_krein_at_theta():
    rep = spectrum(rotation(F(3, 5), F(4, 5)))
    (pair,) = rep.unit_pairs
    assert pair.krein_positive == 1 and pair.krein_negative == 0
    assert abs(pair.angle - angle_of(F(3, 5), F(4, 5))) < 1e-30


def test_spectrum_of_n2_block_is_jordan():
    rep = spectrum(n2_block(0, 1))
    (pair,) = rep.unit_pairs
    assert pair.algebraic == 2 and pair.geometric == 1


def test_jordan_minus_one_multiplicities():
    m = jordan_n1(-1, 1)
    assert nu(m, -1) == 1
    rep = spectrum(m)
    assert rep.eig_at_minus_one == 2


def test_total_multiplicity_matches_dimension():
    rng = random.Random(4)
    for _ in range(10):
        m = random_symplectic(rng, 2)
        assert spectrum(m).total_multiplicity() == 4


def test_spectrum_agrees_with_numeric_eigs():
    rng = random.Random(11)
    m = diamond(random_symplectic(rng, 1), rotation(F(5, 13), F(12, 13)))
    ours = sorted(spectrum(m).eigenvalues(), key=lambda z: (float(z.real), float(z.imag)))
    ref = sorted(numeric_eigs(m.entries), key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))
    for a, b in zip(ours, ref):
        assert abs(a - b) < 1e-12


def test_json_round_trip():
    m = diamond(hyperbolic(F(3, 2)), rotation(F(3, 5), F(-4, 5)))
    assert parse_matrix_json(m.to_json()) == m


def test_json_warns_on_unreduced_fraction():
    with pytest.warns(UserWarning):
        parse_matrix_json({"dim": 2, "entries": [["2/2", "0"], ["0", "1"]]})


def test_inverse_power():
    m = diamond(hyperbolic(2), rotation(F(3, 5), F(4, 5)))
    assert m @ (m ** -1) == identity(4)


def test_rho_on_hyperbolic():
    assert rho_angle(hyperbolic(2)) == 0
    assert abs(abs(rho_angle(hyperbolic(-2))) - mpmath.pi) < 1e-30


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.5, -1.2, -2.9])
def test_rho_of_rotation_is_its_angle(theta):
    c, s = rational_circle_point(theta, 80)
    got = rho_angle(rotation(c, s))
    assert abs(got - theta) < 1e-20


def test_rho_multiplicative_on_diamond():
    a = rotation_by_angle(0.7)
    b = rotation_by_angle(2.0)
    total = rho_angle(a) + rho_angle(b)
    got = rho_angle(diamond(a, b))
    assert abs(mpmath.expj(got) - mpmath.expj(total)) < 1e-12


def test_normal_form_of_rotation_and_hyperbolic():
    m = diamond_all([rotation_by_angle(1.0), hyperbolic(-3), hyperbolic(2)])
    nf = normal_form_decomposition(m)
    assert len(nf.rotations) == 1
    assert nf.hyperbolic_count == 2
    assert abs(nf.rotations[0] - 1.0) < 1e-12


def test_negative_hyperbolic_flag_tracks_parity():
    # one off-circle pair with det(M - I) > 0 needs the -2 block
    nf = normal_form_decomposition(hyperbolic(-2))
    assert nf.has_negative_hyperbolic
    assert not normal_form_decomposition(hyperbolic(2)).has_negative_hyperbolic


def test_assembled_normal_form_has_same_signature():
    m = diamond_all([rotation_by_angle(1.3), hyperbolic(5)])
    nf = normal_form_decomposition(m)
    again = normal_form_decomposition(nf.assemble(80))
    assert again.hyperbolic_count == nf.hyperbolic_count
    assert abs(again.rotations[0] - nf.rotations[0]) < 1e-12


def test_degenerate_iterate_is_precondition_error():
    with pytest.raises(PreconditionError):
        normal_form_decomposition(rotation(0, 1))  # fourth power is the identity
    assert totally_nondegenerate(rotation(0, 1)) == 4


def test_det_minus_identity_exact():
    assert det(sub_scalar(hyperbolic(2).entries, F(1))) == F(-1, 2)


_angles = st.floats(min_value=-3.1, max_value=3.1).filter(lambda x: abs(x) > 1e-3)


@settings(max_examples=30, deadline=None)
@given(st.lists(_angles, min_size=1, max_size=3))
def test_rho_multiplicativity_property(angles):
    blocks = [rotation_by_angle(a, 80) for a in angles]
    got = rho_angle(diamond_all(blocks))
    assert abs(mpmath.expj(got) - mpmath.expj(sum(angles))) < 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), _angles)
def test_rho_conjugation_invariance_property(seed, angle):
    rng = random.Random(seed)
    g = random_symplectic(rng, 1, 2)
    m = rotation_by_angle(angle, 80)
    conj = g @ m @ (g ** -1)
    assert abs(mpmath.expj(rho_angle(conj)) - mpmath.expj(rho_angle(m))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_random_symplectic_is_symplectic(seed, n):
    m = random_symplectic(random.Random(seed), n)
    assert is_symplectic(m.entries)
    assert spectrum(m).total_multiplicity() == 2 * n
