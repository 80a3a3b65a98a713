"""Wigner rotations of massive one-particle states.

Three independent routes are provided:

* :func:`wigner_oracle` -- the literal product ``L^{-1}(Lambda p) Lambda L(p)``;
* :func:`wigner_infinitesimal` -- the first-order angle for ``Lambda = 1 + omega``;
* :func:`wigner_finite` -- polar split ``Lambda = R(psi) L(alpha)``, Halpern's
  closed-form angle for the boost factor, composed with ``psi`` in SU(2).

A :class:`WignerRotation` carries an SU(2)-coordinate quaternion
``q = (w, x, y, z)`` meaning ``D = w I + i (x, y, z) . sigma``.  The
associated 4x4 matrix is ``exp(i theta_W . J)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from wignerbell import _kernels
from wignerbell.errors import InvalidMassError
from wignerbell.lorentz import (
    LEVI_CIVITA,
    BoostParams,
    check_on_shell,
    inverse,
    omega_parameters,
    polar_decompose,
    quat_to_vector,
    standard_boost,
)

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True, eq=False)
class WignerRotation:
    quat: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.quat, dtype=float).reshape(4)
        nrm = np.linalg.norm(q)
        if not np.isfinite(nrm) or abs(nrm - 1.0) > 1e-8:
            raise ValueError(f"quaternion must have unit norm, got |q| = {nrm!r}")
        q = q / nrm
        q.setflags(write=False)
        object.__setattr__(self, "quat", q)

    @classmethod
    def identity(cls) -> WignerRotation:
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_angle_vector(cls, theta) -> WignerRotation:
        theta = np.asarray(theta, dtype=float)
        a = float(np.linalg.norm(theta))
        if a == 0:
            return cls.identity()
        return cls(np.concatenate(([np.cos(a / 2)], np.sin(a / 2) * theta / a)))

    @classmethod
    def from_so3(cls, R3) -> WignerRotation:
        return cls(_kernels.quat_from_so3(np.asarray(R3, dtype=float)))

    @property
    def angle(self) -> float:
        """Rotation angle in [0, pi]."""
        return float(np.linalg.norm(self.angle_vector))

    @property
    def axis(self) -> np.ndarray:
        v = self.angle_vector
        a = np.linalg.norm(v)
        return v / a if a > 0 else np.array([0.0, 0.0, 1.0])

    @property
    def angle_vector(self) -> np.ndarray:
        return quat_to_vector(self.quat)

    @property
    def spin_angle_vector(self) -> np.ndarray:
        """Angle vector with angle in [0, 2 pi) so that ``exp(i v . sigma/2)`` equals :attr:`su2` exactly."""
        q = self.quat
        vn = np.linalg.norm(q[1:])
        if vn == 0:
            return np.zeros(3)
        return 2.0 * np.arctan2(vn, q[0]) * q[1:] / vn

    @property
    def su2(self) -> np.ndarray:
        return su2_of(self)

    @property
    def so3(self) -> np.ndarray:
        w, v = self.quat[0], self.quat[1:]
        return (w * w - v @ v) * np.eye(3) + 2.0 * np.outer(v, v) + 2.0 * w * np.einsum("abk,k->ab", LEVI_CIVITA, v)

    @property
    def lorentz(self) -> np.ndarray:
        L = np.eye(4)
        L[1:, 1:] = self.so3
        return L

    def __matmul__(self, other: WignerRotation) -> WignerRotation:
        return WignerRotation(_kernels.quat_mul(self.quat, other.quat))

    def inverse(self) -> WignerRotation:
        return WignerRotation(self.quat * np.array([1.0, -1.0, -1.0, -1.0]))

    def distance(self, other: WignerRotation) -> float:
        """Quaternion distance modulo the double-cover sign."""
        return float(min(np.linalg.norm(self.quat - other.quat), np.linalg.norm(self.quat + other.quat)))


def su2_of(w: WignerRotation) -> np.ndarray:
    """Spin-1/2 matrix ``cos(theta/2) I + i sin(theta/2) n . sigma``."""
    q = w.quat
    return q[0] * np.eye(2, dtype=complex) + 1j * np.einsum("i,iab->ab", q[1:], PAULI)


def wigner_oracle(L, p, m: float, reshell: bool = False) -> np.ndarray:
    """``W = L^{-1}(Lambda p) Lambda L(p)`` by direct matrix products.

    ``reshell=True`` recomputes the energy of ``Lambda p`` from the mass shell,
    for ``Lambda`` that are Lorentz only to first order.
    """
    p = check_on_shell(p, m)
    L = np.asarray(L, dtype=float)
    Lp = L @ p
    if reshell:
        Lp[0] = np.sqrt(Lp[1:] @ Lp[1:] + m * m)
    return inverse(standard_boost(Lp, m)) @ L @ standard_boost(p, m)


def oracle_rotation(L, p, m: float, reshell: bool = False) -> WignerRotation:
    return WignerRotation.from_so3(wigner_oracle(L, p, m, reshell)[1:, 1:])


def wigner_infinitesimal(omega, p, m: float) -> np.ndarray:
    """First-order Wigner angle ``theta - (p x tau) / (p0 + m)``."""
    p = check_on_shell(p, m)
    theta, tau = omega_parameters(omega)
    return theta - np.cross(p[1:], tau) / (p[0] + m)


def halpern_boost_angle(tau: BoostParams, p, m: float) -> WignerRotation:
    """Wigner rotation of the pure boost ``tau`` acting on momentum ``p``."""
    p = check_on_shell(p, m)
    pn = float(np.linalg.norm(p[1:]))
    n = np.asarray(tau.axis)
    if tau.rapidity == 0 or pn == 0:
        return WignerRotation.identity()
    phat = p[1:] / pn
    cross = np.cross(n, phat)
    cn = float(np.linalg.norm(cross))
    if cn == 0:
        return WignerRotation.identity()
    ch, sh = np.cosh(tau.rapidity), np.sinh(tau.rapidity)
    c = float(n @ phat)
    p0 = p[0]
    den = m + p0 * ch + sh * pn * c
    cos_phi = (m * ch + p0 + sh * pn * c + (ch - 1.0) * (p0 - m) * c * c) / den
    sin_vec = (pn * sh + (p0 - m) * (ch - 1.0) * c) / den * cross
    sn = float(np.linalg.norm(sin_vec))
    if sn == 0:
        return WignerRotation.identity()
    phi = np.arctan2(sn, cos_phi)
    return WignerRotation(np.concatenate(([np.cos(phi / 2)], np.sin(phi / 2) * sin_vec / sn)))


def wigner_finite(L, p, m: float) -> WignerRotation:
    """Closed-form Wigner rotation: ``q(psi) q(phi)`` from the polar split of ``L``."""
    p = check_on_shell(p, m)
    rot, boost = polar_decompose(L)
    q_rot = WignerRotation.from_angle_vector(rot.vector)
    return q_rot @ halpern_boost_angle(boost, p, m)


def wigner_finite_batch(Ls, ps, m) -> np.ndarray:
    """Quaternions of :func:`wigner_finite` for stacks ``Ls[N,4,4]``, ``ps[N,4]`` (compiled kernel).

    Inputs are not validated; use the scalar routine for checked evaluation.
    """
    m = np.asarray(m, dtype=float)
    if np.any(m <= 0):
        raise InvalidMassError("masses must be positive")
    ps = np.asarray(ps, dtype=float)
    return _kernels.wigner_quats(np.asarray(Ls, dtype=float), ps[..., 1:], m)


def multiplication_residual(L1, L2, p, m: float) -> float:
    """Max-norm of ``W(L2 L1, p) - W(L2, L1 p) W(L1, p)`` on the 4x4 matrices."""
    p = check_on_shell(p, m)
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    p1 = L1 @ p
    p1[0] = np.sqrt(p1[1:] @ p1[1:] + m * m)
    lhs = wigner_finite(L2 @ L1, p, m).lorentz
    rhs = wigner_finite(L2, p1, m).lorentz @ wigner_finite(L1, p, m).lorentz
    return float(np.abs(lhs - rhs).max())


def composition_sign(L2, L1, m: float = 1.0) -> int:
    """Sign ``s`` in ``D(W(L2, L1 p)) D(W(L1, p)) = s D(W(L2 L1, p))``.

    Lorentz matrices fix their SU(2) lift only up to sign, so spinor
    transformations compose projectively.  ``s`` does not depend on ``p``;
    it is evaluated at rest.
    """
    rest = np.array([m, 0.0, 0.0, 0.0])
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    D = wigner_finite(L2, transform_momentum(L1, rest, m), m).su2 @ wigner_finite(L1, rest, m).su2
    E = wigner_finite(L2 @ L1, rest, m).su2
    return 1 if np.trace(D @ E.conj().T).real > 0 else -1


def transform_momentum(L, p, m: float) -> np.ndarray:
    """``Lambda p`` with the energy recomputed from the mass shell."""
    Lp = np.asarray(L, dtype=float) @ np.asarray(p, dtype=float)
    Lp[0] = np.sqrt(Lp[1:] @ Lp[1:] + m * m)
    return Lp
