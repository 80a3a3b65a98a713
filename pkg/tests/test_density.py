import json
from math import comb

import numpy as np
import pytest

import oracles as O
from wignerbell.density import (
    DensityMatrix,
    Spectrum,
    block_diagonalize,
    block_residual,
    entropy_bounds,
    entropy_from_blocks,
    expected_trace,
    invariance_report,
    one_particle_from_C,
    reduce,
    reduce_from_higher,
    reduce_state,
    von_neumann_entropy,
)
from wignerbell.errors import NormalizationError, NotADensityMatrixError
from wignerbell.fockspace import FockState, Mode, two_particle_from_C
from wignerbell.lorentz import random_lorentz, random_momentum


def sorted_modes(n):
    return sorted(Mode([0.25 * (i // 2), 0.1, 0.0], i % 2) for i in range(n))


def frozen_C(case):
    return np.array(case["C_re"]) + 1j * np.array(case["C_im"])


def frozen_three(frozen):
    t = frozen["three_fermion"]
    modes = sorted_modes(6)
    s = FockState()
    for idx, (re, im) in zip(t["terms"], t["amps"]):
        s = s + FockState.basis([modes[i] for i in idx], complex(re, im))
    return s, modes, t


def test_two_fermion_rho1_matches_dense_oracle(frozen):
    for case in frozen["two_fermion_cases"]:
        C = frozen_C(case)
        M = C.shape[0]
        modes = sorted_modes(M)
        expected = np.array(case["rho1_re"]) + 1j * np.array(case["rho1_im"])
        state = two_particle_from_C(C, modes)
        assert state.norm2() == pytest.approx(1.0, abs=1e-12)
        r = reduce_state(state, 1, modes)
        assert np.abs(r.matrix - expected).max() < 1e-12
        r_full = reduce(DensityMatrix.from_state(state), 1, modes)
        assert np.abs(r_full.matrix - expected).max() < 1e-12
        assert np.abs(one_particle_from_C(C, modes).matrix - expected).max() < 1e-12
        assert r.trace == pytest.approx(2.0, abs=1e-12)
        assert von_neumann_entropy(r) == pytest.approx(case["S1"], abs=1e-10)


def test_three_fermion_reductions_match_dense_oracle(frozen):
    s, modes, t = frozen_three(frozen)
    rho1 = np.array(t["rho1_re"]) + 1j * np.array(t["rho1_im"])
    rho2 = np.array(t["rho2_re"]) + 1j * np.array(t["rho2_im"])
    r1 = reduce_state(s, 1, modes)
    r2 = reduce_state(s, 2, modes)
    assert np.abs(r1.matrix - rho1).max() < 1e-12
    assert np.abs(r2.matrix - rho2).max() < 1e-12
    full = DensityMatrix.from_state(s)
    assert np.abs(reduce(full, 2, modes).matrix - rho2).max() < 1e-12
    assert r1.trace == pytest.approx(expected_trace(3, 1))
    assert r2.trace == pytest.approx(expected_trace(3, 2))


def test_ratio_path_matches_direct(frozen):
    s, modes, _ = frozen_three(frozen)
    r2 = reduce_state(s, 2, modes)
    for k_rho, m in ((r2, 1), (reduce_state(s, 3, modes), 1), (reduce_state(s, 3, modes), 2)):
        direct = reduce_state(s, m, modes).normalized()
        via = reduce_from_higher(k_rho, m)
        lookup = {b: i for i, b in enumerate(via.basis)}
        idx = [lookup[b] for b in direct.basis]
        assert np.abs(via.matrix[np.ix_(idx, idx)] - direct.matrix).max() < 1e-12


def test_reduce_rejects_bad_order(frozen):
    s, _, _ = frozen_three(frozen)
    full = DensityMatrix.from_state(s)
    for m in (0, 3):
        with pytest.raises(ValueError):
            reduce(full, m)
    with pytest.raises(ValueError):
        reduce_state(s, 4)


def test_trace_is_binomial(rng):
    modes = sorted_modes(8)
    for n in (2, 3, 4):
        s = FockState()
        for _ in range(4):
            idx = rng.choice(8, n, replace=False)
            s = s + FockState.basis([modes[i] for i in idx], rng.normal() + 1j * rng.normal())
        s = s.normalized()
        for m in range(1, n):
            assert reduce_state(s, m).trace == pytest.approx(comb(n, m), abs=1e-12)


def test_spectrum_and_hermiticity_checks():
    b = ((Mode([0, 0, 0], 0),), (Mode([0, 0, 0], 1),))
    with pytest.raises(NotADensityMatrixError):
        DensityMatrix(b, [[1, 1], [0, 1]])
    with pytest.raises(NotADensityMatrixError):
        Spectrum.of(DensityMatrix(b, [[1, 0], [0, -0.5]]))
    sp = Spectrum.of(DensityMatrix(b, [[3, 0], [0, 1]]))
    assert sp.eigenvalues == (0.75, 0.25)
    assert sp.to_csv().splitlines()[0] == "index,eigenvalue"
    assert sp.displacement(Spectrum((0.75,))) == 0.25


def test_entropy_examples():
    b = tuple((Mode([0.1 * i, 0, 0], 0),) for i in range(4))
    assert von_neumann_entropy(DensityMatrix(b[:2], np.eye(2))) == pytest.approx(np.log(2), abs=1e-15)
    assert von_neumann_entropy(DensityMatrix(b, np.eye(4))) == pytest.approx(2 * np.log(2), abs=1e-15)
    assert von_neumann_entropy(DensityMatrix(b[:1], [[1.0]])) == 0.0


def test_unentangled_and_singlet_examples(frozen):
    C = np.array([[0, 0.5], [-0.5, 0]])
    r = one_particle_from_C(C)
    assert np.allclose(r.matrix, np.eye(2))
    assert von_neumann_entropy(r) == pytest.approx(frozen["entropies"]["ln2"], abs=1e-15)
    c = 1 / (2 * np.sqrt(2))
    C = np.zeros((4, 4))
    C[0, 3], C[3, 0], C[1, 2], C[2, 1] = c, -c, -c, c
    r = one_particle_from_C(C)
    assert np.allclose(r.matrix, 0.5 * np.eye(4))
    assert von_neumann_entropy(r) == pytest.approx(frozen["entropies"]["two_ln2"], abs=1e-15)
    bf = block_diagonalize(C)
    assert bf.n_f == 2
    assert entropy_from_blocks(bf) == pytest.approx(2 * np.log(2), abs=1e-12)


@pytest.mark.parametrize("M", [2, 4, 5, 6, 8])
def test_block_form(rng, M):
    for _ in range(10):
        A = rng.normal(size=(M, M)) + 1j * rng.normal(size=(M, M))
        C = A - A.T
        C /= np.sqrt(2 * np.sum(np.abs(C) ** 2))  # unit-norm state
        bf = block_diagonalize(C)
        assert np.abs(bf.u @ bf.u.conj().T - np.eye(M)).max() < 1e-12
        assert block_residual(C, bf) < 1e-12
        assert np.abs(bf.reconstruct() - C).max() < 1e-12
        assert bf.n_f == M // 2
        S_blocks = entropy_from_blocks(bf)
        S_direct = von_neumann_entropy(one_particle_from_C(C))
        assert abs(S_blocks - S_direct) < 1e-10
        lo, hi = entropy_bounds(bf.n_f)
        assert lo - 1e-12 <= S_blocks <= hi + 1e-12


def test_block_form_rank_deficient(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    w = rng.normal(size=4) + 1j * rng.normal(size=4)
    C = np.outer(v, w) - np.outer(w, v)
    C /= np.sqrt(2 * np.sum(np.abs(C) ** 2))
    bf = block_diagonalize(C)
    assert bf.n_f == 1
    assert entropy_from_blocks(bf) == pytest.approx(np.log(2), abs=1e-12)


def test_block_entropy_requires_normalization():
    bf = block_diagonalize(np.array([[0, 1.0], [-1.0, 0]]))
    with pytest.raises(NormalizationError):
        entropy_from_blocks(bf)


def test_rho1_eigenvalues_are_doubled_block_weights(rng):
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    C = A - A.T
    bf = block_diagonalize(C)
    w = np.sort(np.linalg.eigvalsh(C @ C.conj().T))[::-1]
    assert np.allclose(w, np.repeat(bf.c**2, 2), atol=1e-12)


def test_invariance_report(rng):
    modes = [Mode(random_momentum(rng, 1.0, 2.0)[1:], s) for s in (0, 1) for _ in range(3)]
    s = FockState()
    for _ in range(5):
        idx = rng.choice(6, 3, replace=False)
        s = s + FockState.basis([modes[i] for i in idx], rng.normal() + 1j * rng.normal())
    s = s.normalized()
    for _ in range(10):
        L, _, _ = random_lorentz(rng)
        rows = invariance_report(s, L, [1, 2, 3], 1.0)
        for row in rows:
            assert row.difference < 1e-10
            assert row.spectrum_shift < 1e-10
        assert rows[-1].before == pytest.approx(0.0, abs=1e-12)


def test_json_export():
    b = ((Mode([0.1, 0, 0], 0),), (Mode([0.1, 0, 0], 1),))
    doc = json.loads(DensityMatrix(b, [[0.5, 0.5j], [-0.5j, 0.5]]).to_json())
    assert doc["im"][0][1] == 0.5 and doc["basis"][1][0]["spin"] == "-"


def test_dense_oracle_agrees_with_itself():
    # the oracle's own identity rho1 = 4 C C^dagger pins its conventions
    C = np.array([[0, 1, 0], [-1, 0, 2j], [0, -2j, 0]], dtype=complex)
    psi = O.dense_two_particle(C)
    assert np.allclose(O.dense_rho1(psi, 3), 4 * C @ C.conj().T)
