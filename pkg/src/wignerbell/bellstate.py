"""Bell quadruplet, the SU(2) x SU(2) -> SO(4) map and the Bell transformation law.

The quadruplet uses ``sigma~^0 = i I`` and ``sigma~^k = sigma^k``; the spin
coefficient matrix of ``|B^mu>`` is ``(sigma~^mu sigma^2) / sqrt(2)`` with row
index = spin of particle 1 and column index = spin of particle 2 (index 0 is
spin up).

SO(4) matrices are stored as ``R[nu, mu] = R_nu^mu`` so that
``U1 sigma~^mu U2^{-1} = sum_nu R[nu, mu] sigma~^nu`` and Bell amplitudes
transform as ``C' = R @ C``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wignerbell.errors import NonUnitaryError, PauliExclusionError
from wignerbell.lorentz import ETA, LEVI_CIVITA, check_on_shell
from wignerbell.wigner import PAULI, transform_momentum, wigner_finite

SIGMA_TILDE = np.array([1j * np.eye(2), PAULI[0], PAULI[1], PAULI[2]], dtype=complex)
SIGMA2 = PAULI[1]

_CONVENTIONAL = (("beta_11", 1.0 + 0j), ("beta_10", -1j), ("beta_00", 1.0 + 0j), ("beta_01", 1j))


def _check_index(mu: int) -> int:
    if mu not in (0, 1, 2, 3):
        raise ValueError(f"Bell index must be in 0..3, got {mu!r}")
    return mu


def bell_basis_spin(mu: int) -> np.ndarray:
    return SIGMA_TILDE[_check_index(mu)] @ SIGMA2 / np.sqrt(2.0)


def conventional_map(mu: int) -> tuple[str, complex]:
    """``(label, phase)`` with ``|label> = phase * |B^mu>``."""
    return _CONVENTIONAL[_check_index(mu)]


def conventional_bell(label: str) -> np.ndarray:
    """Textbook ``beta_xy`` spin matrices, ``(|0 y> + (-1)^x |1 ybar>) / sqrt(2)``."""
    x, y = int(label[-2]), int(label[-1])
    f = np.zeros((2, 2), dtype=complex)
    f[0, y] = 1.0
    f[1, 1 - y] = (-1.0) ** x
    return f / np.sqrt(2.0)


def _check_su2(U, tol=1e-10) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise NonUnitaryError(f"expected a 2x2 matrix, got shape {U.shape}")
    if np.abs(U @ U.conj().T - np.eye(2)).max() > tol or abs(np.linalg.det(U) - 1.0) > tol:
        raise NonUnitaryError("input is not in SU(2)")
    return U


def so4_from_trace(U1, U2) -> np.ndarray:
    """``R_nu^mu = 1/2 eta_{nu a} Tr[U1 sigma~^mu U2^{-1} sigma~^a]``."""
    U1 = _check_su2(U1)
    U2 = _check_su2(U2)
    U2inv = U2.conj().T
    # T[mu, a] = Tr[U1 s~^mu U2^{-1} s~^a]
    T = np.einsum("ij,mjk,kl,ali->ma", U1, SIGMA_TILDE, U2inv, SIGMA_TILDE)
    R = 0.5 * (T @ ETA).T
    if np.abs(R.imag).max() > 1e-12:
        raise NonUnitaryError(f"trace formula produced complex entries ({np.abs(R.imag).max():.3g})")
    return R.real.copy()


def _half_angles(v):
    v = np.asarray(v, dtype=float)
    a = np.linalg.norm(v)
    if a == 0:
        return 1.0, 0.0, np.zeros(3)
    return np.cos(a / 2), np.sin(a / 2), v / a


def so4_explicit(X, Y) -> np.ndarray:
    """Closed-form SO(4) matrix for ``U1 = exp(i X.sigma/2)``, ``U2^{-1} = exp(i Y.sigma/2)``."""
    cx, sx, xh = _half_angles(X)
    cy, sy, yh = _half_angles(Y)
    xy = float(xh @ yh)
    xcy = np.cross(xh, yh)
    R = np.empty((4, 4))
    R[0, 0] = cx * cy - xy * sx * sy
    R[1:, 0] = -cx * sy * yh - sx * cy * xh + sx * sy * xcy
    R[0, 1:] = cx * sy * yh + sx * cy * xh + sx * sy * xcy
    eps_y = np.einsum("ijm,m->ij", LEVI_CIVITA, yh)
    eps_x = np.einsum("ijm,m->ij", LEVI_CIVITA, xh)
    R[1:, 1:] = (
        cx * cy * np.eye(3)
        - cx * sy * eps_y
        + sx * cy * eps_x
        + sx * sy * (xy * np.eye(3) - np.outer(xh, yh) - np.outer(yh, xh))
    )
    return R


def su2_exp(v) -> np.ndarray:
    """``exp(i v . sigma / 2)``."""
    c, s, n = _half_angles(v)
    return c * np.eye(2, dtype=complex) + 1j * s * np.einsum("i,iab->ab", n, PAULI)


def so4_residuals(R) -> tuple[float, float]:
    """``(max|R^T R - I|, |det R - 1|)``."""
    R = np.asarray(R)
    return float(np.abs(R.T @ R - np.eye(4)).max()), float(abs(np.linalg.det(R) - 1.0))


def c_from_f(f) -> np.ndarray:
    """``C_mu = 1/2 eta_{mu nu} sum f(s1, s2) (sigma^2 sigma~^nu)_{s2 s1}``."""
    f = np.asarray(f, dtype=complex)
    traces = np.einsum("ab,nba->n", f, SIGMA2[None] @ SIGMA_TILDE)
    return 0.5 * ETA.diagonal() * traces


def f_from_c(C) -> np.ndarray:
    """``f(s1, s2) = C_mu (sigma~^mu sigma^2)_{s1 s2}``."""
    return np.einsum("m,mab->ab", np.asarray(C, dtype=complex), SIGMA_TILDE @ SIGMA2)


def amplitudes_from_spin_matrix(f) -> np.ndarray:
    """Coefficients over the normalized ``|B^mu>`` of the state ``sum f(s1,s2) a+(1,s1) a+(2,s2)|0>``."""
    return np.sqrt(2.0) * c_from_f(f)


def spin_matrix_from_amplitudes(C) -> np.ndarray:
    return f_from_c(C) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class BellVector:
    """Amplitudes ``C_mu`` over ``|B^mu(p1, p2)>`` at sharp on-shell momenta."""

    p1: np.ndarray
    p2: np.ndarray
    amplitudes: np.ndarray
    species: tuple[int, int] = (0, 0)

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = np.array(getattr(self, name), dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        a = np.array(self.amplitudes, dtype=complex).reshape(4)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "species", tuple(int(s) for s in self.species))

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def spin_matrix(self) -> np.ndarray:
        return spin_matrix_from_amplitudes(self.amplitudes)


def bell_rotation(L, p1, p2, m1: float, m2: float):
    """SO(4) matrix plus the two Wigner rotations for a pair at ``p1, p2``."""
    w1 = wigner_finite(L, p1, m1)
    w2 = wigner_finite(L, p2, m2)
    X = w1.spin_angle_vector
    Y = -w2.spin_angle_vector
    return so4_explicit(X, Y), w1, w2


def transform_bell(L, b: BellVector, m1: float, m2: float, same_mode_tol: float = 1e-9) -> BellVector:
    """Apply ``U(Lambda)`` to a Bell superposition; the continuum Jacobian is omitted."""
    p1 = check_on_shell(b.p1, m1)
    p2 = check_on_shell(b.p2, m2)
    if b.species[0] == b.species[1] and np.abs(p1[1:] - p2[1:]).max() <= same_mode_tol:
        raise PauliExclusionError("both particles occupy the same momentum and species")
    R, _, _ = bell_rotation(L, p1, p2, m1, m2)
    return BellVector(
        transform_momentum(L, p1, m1),
        transform_momentum(L, p2, m2),
        R @ b.amplitudes,
        b.species,
    )
