import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from wignerbell.errors import InvalidMassError
from wignerbell.lorentz import (
    BoostParams,
    RotationParams,
    boost_matrix,
    from_infinitesimal,
    inverse,
    on_shell,
    random_lorentz,
    random_momentum,
    rotation_matrix,
    standard_boost,
)
from wignerbell.wigner import (
    PAULI,
    WignerRotation,
    composition_sign,
    halpern_boost_angle,
    multiplication_residual,
    oracle_rotation,
    transform_momentum,
    su2_of,
    wigner_finite,
    wigner_finite_batch,
    wigner_infinitesimal,
    wigner_oracle,
)


def test_frozen_wigner_cases(frozen):
    for c in frozen["wigner_cases"]:
        L = np.array(c["lambda"])
        p = on_shell(c["p3"], c["m"])
        assert np.abs(wigner_finite(L, p, c["m"]).so3 - np.array(c["wigner_so3"])).max() < 1e-9
        assert np.abs(wigner_oracle(L, p, c["m"])[1:, 1:] - np.array(c["wigner_so3"])).max() < 1e-9


def test_halpern_example_against_frozen_oracle(frozen):
    p = np.array([np.cosh(2.0), np.sinh(2.0), 0.0, 0.0])
    w = halpern_boost_angle(BoostParams(1.5, (0, 1, 0)), p, 1.0)
    assert np.abs(w.so3 - np.array(frozen["halpern_example_so3"])).max() < 1e-10


def test_oracle_is_a_rotation(rng):
    for _ in range(200):
        L, _, _ = random_lorentz(rng)
        p = random_momentum(rng, 1.3)
        W = wigner_oracle(L, p, 1.3)
        assert abs(W[0, 0] - 1) < 1e-10
        assert np.abs(W[0, 1:]).max() < 1e-10 and np.abs(W[1:, 0]).max() < 1e-10
        R = W[1:, 1:]
        assert np.abs(R.T @ R - np.eye(3)).max() < 1e-10
        assert abs(np.linalg.det(R) - 1) < 1e-10


def test_pure_rotation_is_degenerate(rng):
    for _ in range(50):
        psi = rng.normal(size=3)
        L = rotation_matrix(RotationParams.from_vector(psi))
        w = wigner_finite(L, random_momentum(rng, 1.0), 1.0)
        assert w.distance(WignerRotation.from_angle_vector(psi)) < 1e-12


def test_standard_boost_of_rest_momentum_gives_no_rotation(rng):
    p = random_momentum(rng, 2.0)
    w = wigner_finite(standard_boost(p, 2.0), on_shell(np.zeros(3), 2.0), 2.0)
    assert w.angle < 1e-12


def test_infinitesimal_pure_rotation_and_parallel_boost():
    w = np.zeros((4, 4))
    w[2, 3], w[3, 2] = 1e-3, -1e-3
    p = on_shell([0.3, -0.4, 1.0], 1.0)
    assert np.allclose(wigner_infinitesimal(w, p, 1.0), [1e-3, 0, 0])
    w = np.zeros((4, 4))
    w[1, 0], w[0, 1] = 1e-3, -1e-3
    assert np.allclose(wigner_infinitesimal(w, on_shell([2.0, 0, 0], 1.0), 1.0), 0)


def test_infinitesimal_matches_oracle(rng):
    w = rng.normal(size=(4, 4))
    w = (w - w.T) * 1e-5
    p = random_momentum(rng, 1.0, 2.0)
    ang = oracle_rotation(from_infinitesimal(w), p, 1.0, reshell=True).angle_vector
    assert np.abs(ang - wigner_infinitesimal(w, p, 1.0)).max() < 1e-9


def test_halpern_small_rapidity_limit():
    p = on_shell([0.4, -1.2, 0.7], 1.0)
    n = np.array([0.6, 0.0, 0.8])
    tau = 1e-6
    phi = halpern_boost_angle(BoostParams(tau, tuple(n)), p, 1.0).angle_vector
    expected = -np.cross(p[1:], tau * n) / (p[0] + 1.0)
    assert np.abs(phi - expected).max() < 1e-12 * np.linalg.norm(p)


def test_halpern_trivial_cases():
    rest = on_shell(np.zeros(3), 1.0)
    assert halpern_boost_angle(BoostParams(2.0, (1, 0, 0)), rest, 1.0).angle == 0
    p = on_shell([1.0, 2.0, -0.5], 1.0)
    for r in (0.1, 1.0, 5.0):
        along = tuple(p[1:] / np.linalg.norm(p[1:]))
        assert halpern_boost_angle(BoostParams(r, along), p, 1.0).angle < 1e-12


def test_invalid_mass():
    with pytest.raises(InvalidMassError):
        wigner_finite(np.eye(4), [1, 0, 0, 0], 0.0)


def test_multiplication_rule(rng):
    worst = 0.0
    for _ in range(300):
        L1, _, _ = random_lorentz(rng)
        L2, _, _ = random_lorentz(rng)
        worst = max(worst, multiplication_residual(L1, L2, random_momentum(rng, 1.0), 1.0))
    assert worst <= 1e-8
    L1, _, _ = random_lorentz(rng)
    assert multiplication_residual(L1, inverse(L1), random_momentum(rng, 1.0), 1.0) <= 1e-9
    R1 = rotation_matrix(RotationParams(0.4, (0, 0, 1)))
    R2 = rotation_matrix(RotationParams(1.4, (0, 1, 0)))
    assert multiplication_residual(R1, R2, random_momentum(rng, 1.0), 1.0) <= 1e-12


def test_su2_examples():
    assert np.allclose(su2_of(WignerRotation.identity()), np.eye(2))
    D = su2_of(WignerRotation.from_angle_vector([0, 0, np.pi]))
    assert np.allclose(D, 1j * PAULI[2])


@settings(max_examples=100)
@given(st.tuples(*[st.floats(-6, 6)] * 3))
def test_adjoint_action_reproduces_so3(v):
    w = WignerRotation.from_angle_vector(v)
    D = w.su2
    R = w.so3
    for i in range(3):
        lhs = D @ PAULI[i] @ D.conj().T
        rhs = np.einsum("j,jab->ab", R[:, i], PAULI)
        assert np.abs(lhs - rhs).max() < 1e-12
    assert np.abs(D @ D.conj().T - np.eye(2)).max() < 1e-12
    assert abs(np.linalg.det(D) - 1) < 1e-12


def test_su2_matches_exponential(rng):
    for _ in range(20):
        v = rng.normal(size=3) * 2
        w = WignerRotation.from_angle_vector(v)
        assert np.allclose(w.su2, O.su2(v), atol=1e-13)
        assert np.allclose(w.lorentz, O.rotation(v), atol=1e-13)


def test_angle_extraction_near_pi():
    for eps in (0.0, 1e-9, 1e-6):
        v = (np.pi - eps) * np.array([0.0, 0.6, 0.8])
        w = WignerRotation.from_so3(WignerRotation.from_angle_vector(v).so3)
        assert abs(w.angle - (np.pi - eps)) < 1e-7


def test_batch_matches_scalar(rng):
    Ls = np.array([random_lorentz(rng)[0] for _ in range(50)])
    ps = np.array([random_momentum(rng, 1.0) for _ in range(50)])
    q = wigner_finite_batch(Ls, ps, 1.0)
    for k in range(50):
        ref = wigner_finite(Ls[k], ps[k], 1.0)
        assert ref.distance(WignerRotation(q[k])) < 1e-12


def test_composition_sign(rng):
    half = rotation_matrix(RotationParams(np.pi, (0.0, 0.6, 0.8)))
    assert composition_sign(half, half) == -1
    assert composition_sign(np.eye(4), half) == 1
    for _ in range(20):
        L1, _, _ = random_lorentz(rng)
        L2, _, _ = random_lorentz(rng)
        s = composition_sign(L2, L1)
        p = random_momentum(rng, 1.3)
        lhs = wigner_finite(L2, transform_momentum(L1, p, 1.3), 1.3).su2 @ wigner_finite(L1, p, 1.3).su2
        assert np.abs(lhs - s * wigner_finite(L2 @ L1, p, 1.3).su2).max() < 1e-10
