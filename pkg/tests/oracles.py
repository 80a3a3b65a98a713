"""Independent brute-force references used to freeze expected values.

Nothing here imports the package's numerical routines: boosts and rotations
come from matrix exponentials of explicit generators, Fock space is a dense
Jordan-Wigner construction, and SO(4) entries are explicit trace loops.
"""

import numpy as np
from scipy.linalg import expm

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
SIGMA_TILDE = np.array([1j * np.eye(2), *PAULI])


def eps3():
    e = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        e[i, j, k] = 1.0
        e[j, i, k] = -1.0
    return e


def boost(alpha_vec):
    G = np.zeros((4, 4))
    G[0, 1:] = G[1:, 0] = alpha_vec
    return expm(G)


def rotation(psi_vec):
    """``exp(i psi.J)`` with ``(i J^k)_ab = eps_kab``."""
    A = np.einsum("k,kab->ab", np.asarray(psi_vec, float), eps3())
    R = np.eye(4)
    R[1:, 1:] = expm(A)
    return R


def on_shell(p3, m):
    p3 = np.asarray(p3, float)
    return np.concatenate(([np.sqrt(p3 @ p3 + m * m)], p3))


def std_boost(p, m):
    p3 = np.asarray(p, float)[1:]
    n = np.linalg.norm(p3)
    if n == 0:
        return np.eye(4)
    return boost(np.arcsinh(n / m) * p3 / n)


def wigner_matrix(L, p, m):
    Lp = L @ p
    Lp[0] = np.sqrt(Lp[1:] @ Lp[1:] + m * m)
    return np.linalg.inv(std_boost(Lp, m)) @ L @ std_boost(p, m)


def su2(v):
    return expm(0.5j * np.einsum("i,iab->ab", np.asarray(v, float), PAULI))


def so4_trace(U1, U2):
    U2i = np.linalg.inv(U2)
    R = np.zeros((4, 4), dtype=complex)
    for nu in range(4):
        for mu in range(4):
            for a in range(4):
                R[nu, mu] += 0.5 * ETA[nu, a] * np.trace(U1 @ SIGMA_TILDE[mu] @ U2i @ SIGMA_TILDE[a])
    return R.real


# ------------------------------------------------------------------ dense Fock space


def jw_annihilators(M):
    """Dense annihilation operators on ``M`` modes, mode 0 leftmost."""
    Z = np.diag([1.0, -1.0])
    low = np.array([[0.0, 1.0], [0.0, 0.0]])  # |1> -> |0>
    ops = []
    for k in range(M):
        mats = [Z] * k + [low] + [np.eye(2)] * (M - k - 1)
        op = np.array([[1.0]])
        for x in mats:
            op = np.kron(op, x)
        ops.append(op.astype(complex))
    return ops


def dense_vacuum(M):
    v = np.zeros(2**M, dtype=complex)
    v[0] = 1.0
    return v


def dense_two_particle(C):
    M = C.shape[0]
    a = jw_annihilators(M)
    psi = np.zeros(2**M, dtype=complex)
    vac = dense_vacuum(M)
    for i in range(M):
        for j in range(M):
            psi += C[i, j] * (a[i].conj().T @ (a[j].conj().T @ vac))
    return psi


def dense_rho1(psi, M):
    a = jw_annihilators(M)
    return np.array([[np.vdot(a[j] @ psi, a[i] @ psi) for j in range(M)] for i in range(M)])


def dense_rho2(psi, M):
    a = jw_annihilators(M)
    pairs = [(i, j) for i in range(M) for j in range(i + 1, M)]
    out = np.zeros((len(pairs), len(pairs)), dtype=complex)
    for x, (i1, i2) in enumerate(pairs):
        vi = a[i1] @ (a[i2] @ psi)
        for y, (j1, j2) in enumerate(pairs):
            vj = a[j1] @ (a[j2] @ psi)
            out[x, y] = np.vdot(vj, vi)
    return pairs, out


def entropy(rho):
    w = np.linalg.eigvalsh(rho / np.trace(rho).real)
    w = w[w > 1e-12]
    return float(-np.sum(w * np.log(w)))
