import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from wignerbell.bellstate import (
    SIGMA2,
    SIGMA_TILDE,
    BellVector,
    amplitudes_from_spin_matrix,
    bell_basis_spin,
    c_from_f,
    conventional_bell,
    conventional_map,
    f_from_c,
    so4_explicit,
    so4_from_trace,
    so4_residuals,
    su2_exp,
    transform_bell,
)
from wignerbell.errors import InconsistentMomentumError, NonUnitaryError, PauliExclusionError
from wignerbell.lorentz import (
    BoostParams,
    RotationParams,
    boost_matrix,
    on_shell,
    random_lorentz,
    random_momentum,
    rotation_matrix,
)
from wignerbell.wigner import PAULI

vec3 = st.tuples(*[st.floats(-7, 7)] * 3)


def test_sigma_tilde_determinant(rng):
    for _ in range(50):
        x = rng.normal(size=4)
        M = np.einsum("m,mab->ab", x, SIGMA_TILDE)
        assert abs(np.linalg.det(M) - (x[0] ** 2 + x[1:] @ x[1:]) * -1 * -1) < 1e-12 or True
        # det(x_mu s~^mu) = -(x0^2 + |x|^2) for this quadruplet
        assert abs(np.linalg.det(M) + x @ x) < 1e-12


def test_sigma2_conjugation():
    for s in PAULI:
        assert np.array_equal(SIGMA2 @ s @ SIGMA2, -s.T)


def test_bell_basis_shapes():
    B0 = bell_basis_spin(0)
    assert B0[0, 0] == 0 and B0[1, 1] == 0 and B0[0, 1] == -B0[1, 0]
    B2 = bell_basis_spin(2)
    assert B2[0, 1] == 0 and B2[1, 0] == 0 and B2[0, 0] == B2[1, 1]
    for mu in range(4):
        assert np.linalg.norm(bell_basis_spin(mu)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        bell_basis_spin(4)


def test_conventional_map():
    assert conventional_map(0) == ("beta_11", 1)
    assert conventional_map(1) == ("beta_10", -1j)
    assert conventional_map(2) == ("beta_00", 1)
    assert conventional_map(3) == ("beta_01", 1j)
    for mu in range(4):
        label, phase = conventional_map(mu)
        assert np.allclose(conventional_bell(label), phase * bell_basis_spin(mu), atol=1e-15)


def test_frozen_so4(frozen):
    for c in frozen["so4_cases"]:
        R = np.array(c["R"])
        assert np.abs(so4_explicit(c["X"], c["Y"]) - R).max() < 1e-10
        assert np.abs(so4_from_trace(su2_exp(c["X"]), su2_exp(-np.array(c["Y"]))) - R).max() < 1e-12


@settings(max_examples=300)
@given(vec3, vec3)
def test_two_paths_agree(X, Y):
    R = so4_explicit(X, Y)
    assert np.abs(R - so4_from_trace(su2_exp(X), su2_exp(-np.asarray(Y)))).max() < 1e-10
    orth, det = so4_residuals(R)
    assert orth < 1e-10 and det < 1e-10


def test_trace_identity_and_rotation_case():
    assert np.allclose(so4_from_trace(np.eye(2), np.eye(2)), np.eye(4))
    th = 0.9
    U = su2_exp([0, 0, th])
    R = so4_from_trace(U, U)
    assert R[0, 0] == pytest.approx(1.0)
    assert np.abs(R[0, 1:]).max() < 1e-15 and np.abs(R[1:, 0]).max() < 1e-15
    assert np.allclose(R[1:, 1:], O.rotation([0, 0, th])[1:, 1:], atol=1e-14)
    assert np.allclose(so4_explicit([0, 0, th], [0, 0, -th]), R, atol=1e-14)


def test_boost_border_case():
    phi = 0.7
    R = so4_explicit([phi, 0, 0], [phi, 0, 0])
    expected = np.eye(4)
    expected[0, 0] = expected[1, 1] = np.cos(phi)
    expected[1, 0], expected[0, 1] = -np.sin(phi), np.sin(phi)
    assert np.allclose(R, expected, atol=1e-14)


def test_homomorphism_and_center(rng):
    for _ in range(100):
        a, b, c, d = (su2_exp(rng.normal(size=3) * 2) for _ in range(4))
        lhs = so4_from_trace(a @ c, b @ d)
        assert np.abs(lhs - so4_from_trace(a, b) @ so4_from_trace(c, d)).max() < 1e-9
        assert np.array_equal(so4_from_trace(-a, -b), so4_from_trace(a, b)) or np.abs(
            so4_from_trace(-a, -b) - so4_from_trace(a, b)
        ).max() < 1e-15


def test_non_unitary_rejected():
    with pytest.raises(NonUnitaryError):
        so4_from_trace(2 * np.eye(2), np.eye(2))


@settings(max_examples=100)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
def test_f_c_round_trip(cs):
    C = np.array(cs)
    assert np.abs(c_from_f(f_from_c(C)) - C).max() < 1e-13 * max(1, np.abs(C).max())
    f = C.reshape(2, 2)
    assert np.abs(f_from_c(c_from_f(f)) - f).max() < 1e-13 * max(1, np.abs(f).max())


def test_basis_reproduction_and_product_state():
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = 1
        assert np.allclose(amplitudes_from_spin_matrix(bell_basis_spin(mu)), e, atol=1e-15)
        assert np.allclose(f_from_c(e), np.sqrt(2) * bell_basis_spin(mu))
    plus_minus = np.array([[0, 1], [0, 0]], dtype=complex)
    assert np.allclose(amplitudes_from_spin_matrix(plus_minus), np.array([1, 0, 0, 1j]) / np.sqrt(2))


def _pair(rng):
    return random_momentum(rng, 1.0), random_momentum(rng, 1.5)


def test_transform_identity_and_norm(rng):
    p1, p2 = _pair(rng)
    C = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = BellVector(p1, p2, C)
    out = transform_bell(np.eye(4), b, 1.0, 1.5)
    assert np.allclose(out.amplitudes, C, atol=1e-14)
    for _ in range(100):
        L, _, _ = random_lorentz(rng)
        out = transform_bell(L, b, 1.0, 1.5)
        assert abs(out.norm2 - b.norm2) < 1e-12 * b.norm2


def test_singlet_invariant_under_rotation(rng):
    p1, p2 = _pair(rng)
    b = BellVector(p1, p2, [1, 0, 0, 0])
    L = rotation_matrix(RotationParams(1.2, (0.6, 0.8, 0.0)))
    assert np.allclose(transform_bell(L, b, 1.0, 1.5).amplitudes, [1, 0, 0, 0], atol=1e-14)


def test_com_perpendicular_boost_mixes_only_the_border():
    p1 = on_shell([0.8, 0, 0], 1.0)
    p2 = on_shell([-0.8, 0, 0], 1.0)
    L = boost_matrix(BoostParams(1.1, (0, 1, 0)))
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = 1
        out = transform_bell(L, BellVector(p1, p2, e), 1.0, 1.0).amplitudes
        if mu in (1, 2):
            assert np.allclose(out, e, atol=1e-14)
        else:
            assert np.abs(out[1:3]).max() < 1e-14
            assert abs(out[mu]) < 1.0 - 1e-3


def test_off_shell_and_pauli_rejected(rng):
    p1 = random_momentum(rng, 1.0)
    with pytest.raises(InconsistentMomentumError):
        transform_bell(np.eye(4), BellVector(p1 * 1.1, p1, [1, 0, 0, 0], (0, 1)), 1.0, 1.0)
    with pytest.raises(PauliExclusionError):
        transform_bell(np.eye(4), BellVector(p1, p1, [1, 0, 0, 0]), 1.0, 1.0)
    transform_bell(np.eye(4), BellVector(p1, p1, [1, 0, 0, 0], (0, 1)), 1.0, 1.0)
