"""Proper orthochronous Lorentz group arithmetic.

Conventions: natural units, metric ``eta = diag(-1, +1, +1, +1)``, and 4x4
matrices stored with the upper index as the row (``L[mu, nu] = L^mu_nu``).
Four-vectors are plain length-4 float arrays ``(t, x, y, z)``.

Rotation angle vectors follow the generator convention
``R(psi) = exp(i psi . J)`` with ``(J^i)_{ab} = -i eps_{iab}``; the spatial
block is ``cos(psi) delta_ij + (1 - cos psi) n_i n_j + sin(psi) eps_ijk n_k``.
With this choice a pure rotation induces a Wigner angle equal to its own
angle vector (see :mod:`wignerbell.wigner`).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from wignerbell import _kernels
from wignerbell.errors import (
    DecompositionError,
    InconsistentMomentumError,
    InvalidAxisError,
    InvalidMassError,
    InvalidOmegaError,
)

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
RAPIDITY_WARN = 20.0

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_j, _i, _k] = -1.0


def _generators():
    K = np.zeros((3, 4, 4), dtype=complex)
    J = np.zeros((3, 4, 4), dtype=complex)
    for i in range(3):
        K[i, i + 1, 0] = K[i, 0, i + 1] = 1j
        J[i, 1:, 1:] = -1j * LEVI_CIVITA[i]
    return K, J


@dataclass(frozen=True)
class GeneratorSet:
    """Boost and rotation generators stored as complex 4x4 matrices.

    ``K[i]`` and ``J[i]`` are the literal matrices with
    ``(K^i)_{ab} = i(delta^i_a delta_0b + delta_0a delta^i_b)`` and
    ``(J^i)_{ab} = -i eps_{iab}``.
    """

    K: np.ndarray = field(default_factory=lambda: _generators()[0])
    J: np.ndarray = field(default_factory=lambda: _generators()[1])

    def M(self, a: int, b: int) -> np.ndarray:
        """Antisymmetric generator ``M^{ab}`` with ``M^{0i} = K^i`` and ``M^{jk} = eps_jki J^i``."""
        if a == b:
            return np.zeros((4, 4), dtype=complex)
        if a == 0:
            return self.K[b - 1]
        if b == 0:
            return -self.K[a - 1]
        return np.einsum("i,iab->ab", LEVI_CIVITA[a - 1, b - 1], self.J)

    def commutator_residuals(self) -> dict[str, float]:
        """Max-norm residuals of the three Lorentz algebra relations."""
        J, K = self.J, self.K
        out = {"JJ": 0.0, "JK": 0.0, "KK": 0.0}
        for i in range(3):
            for j in range(3):
                jj = J[i] @ J[j] - J[j] @ J[i] - 1j * np.einsum("k,kab->ab", LEVI_CIVITA[i, j], J)
                jk = J[i] @ K[j] - K[j] @ J[i] - 1j * np.einsum("k,kab->ab", LEVI_CIVITA[i, j], K)
                kk = K[i] @ K[j] - K[j] @ K[i] + 1j * np.einsum("k,kab->ab", LEVI_CIVITA[i, j], J)
                out["JJ"] = max(out["JJ"], np.abs(jj).max())
                out["JK"] = max(out["JK"], np.abs(jk).max())
                out["KK"] = max(out["KK"], np.abs(kk).max())
        return out


GENERATORS = GeneratorSet()


def _unit_axis(axis, tol=1e-12) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or not np.all(np.isfinite(axis)):
        raise InvalidAxisError(f"axis must be a finite 3-vector, got {axis!r}")
    if abs(np.linalg.norm(axis) - 1.0) > tol:
        raise InvalidAxisError(f"axis must have unit length, |axis| = {np.linalg.norm(axis)!r}")
    return axis


@dataclass(frozen=True)
class BoostParams:
    rapidity: float
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not np.isfinite(self.rapidity) or self.rapidity < 0:
            raise ValueError(f"rapidity must be a nonnegative finite number, got {self.rapidity!r}")
        axis = tuple(float(a) for a in _unit_axis(self.axis))
        if self.rapidity == 0:
            axis = (0.0, 0.0, 1.0)
        object.__setattr__(self, "rapidity", float(self.rapidity))
        object.__setattr__(self, "axis", axis)

    @classmethod
    def from_vector(cls, alpha) -> BoostParams:
        """Build from a rapidity vector ``alpha * n``."""
        alpha = np.asarray(alpha, dtype=float)
        a = float(np.linalg.norm(alpha))
        if a == 0:
            return cls(0.0)
        return cls(a, tuple(alpha / a))

    @property
    def vector(self) -> np.ndarray:
        return self.rapidity * np.asarray(self.axis)


@dataclass(frozen=True)
class RotationParams:
    """Rotation by ``angle`` about ``axis``; the angle is normalized into [0, pi]."""

    angle: float
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        axis = _unit_axis(self.axis)
        angle = float(np.remainder(self.angle + np.pi, 2 * np.pi) - np.pi)
        if angle == -np.pi:
            angle = np.pi
        elif angle < 0:
            angle, axis = -angle, -axis
        if angle == 0:
            axis = np.array([0.0, 0.0, 1.0])
        object.__setattr__(self, "angle", angle)
        object.__setattr__(self, "axis", tuple(float(a) for a in axis))

    @classmethod
    def from_vector(cls, psi) -> RotationParams:
        psi = np.asarray(psi, dtype=float)
        a = float(np.linalg.norm(psi))
        if a == 0:
            return cls(0.0)
        return cls(a, tuple(psi / a))

    @property
    def vector(self) -> np.ndarray:
        return self.angle * np.asarray(self.axis)


def minkowski_dot(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(-u[0] * v[0] + u[1:] @ v[1:])


def on_shell(p3, m: float) -> np.ndarray:
    """Four-momentum ``(sqrt(|p|^2 + m^2), p)``."""
    if not m > 0:
        raise InvalidMassError(f"mass must be positive, got {m!r}")
    p3 = np.asarray(p3, dtype=float)
    return np.concatenate(([np.sqrt(p3 @ p3 + m * m)], p3))


def check_on_shell(p, m: float, rtol: float = 1e-10) -> np.ndarray:
    if not m > 0:
        raise InvalidMassError(f"mass must be positive, got {m!r}")
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise InconsistentMomentumError(f"four-momentum must have 4 components, got shape {p.shape}")
    if p[0] <= 0 or abs(minkowski_dot(p, p) + m * m) > rtol * max(m * m, p[0] * p[0]):
        raise InconsistentMomentumError(f"p = {p!r} is not on shell for mass {m!r}")
    return p


def _warn_rapidity(alpha: float) -> None:
    if alpha > RAPIDITY_WARN:
        warnings.warn(
            f"rapidity {alpha:.3g} exceeds {RAPIDITY_WARN}; Wigner angles lose relative precision",
            RuntimeWarning,
            stacklevel=3,
        )


def _boost(cosh: float, sinh_n: np.ndarray) -> np.ndarray:
    L = np.eye(4)
    L[0, 0] = cosh
    L[0, 1:] = L[1:, 0] = sinh_n
    s2 = sinh_n @ sinh_n
    if s2 > 0:
        L[1:, 1:] += (cosh - 1.0) / s2 * np.outer(sinh_n, sinh_n)
    return L


def standard_boost(p, m: float) -> np.ndarray:
    """Pure boost taking the rest momentum ``(m, 0, 0, 0)`` to ``p``."""
    p = check_on_shell(p, m)
    _warn_rapidity(float(np.arcsinh(np.linalg.norm(p[1:]) / m)))
    # cosh(chi) = p0/m and sinh(chi) p_hat = p/m; (cosh-1)/sinh^2 = 1/(cosh+1) keeps small |p| accurate
    L = np.eye(4)
    L[0, 0] = p[0] / m
    L[0, 1:] = L[1:, 0] = p[1:] / m
    L[1:, 1:] += np.outer(p[1:], p[1:]) / (m * (p[0] + m))
    return L


def boost_matrix(b: BoostParams) -> np.ndarray:
    _warn_rapidity(b.rapidity)
    return _boost(np.cosh(b.rapidity), np.sinh(b.rapidity) * np.asarray(b.axis))


def rotation_matrix(r: RotationParams) -> np.ndarray:
    n = np.asarray(r.axis)
    c, s = np.cos(r.angle), np.sin(r.angle)
    L = np.eye(4)
    L[1:, 1:] = c * np.eye(3) + (1.0 - c) * np.outer(n, n) + s * np.einsum("ijk,k->ij", LEVI_CIVITA, n)
    return L


def generator_exp(omega) -> np.ndarray:
    """``exp((i/2) omega_{ab} M^{ab})`` by scipy's scaling-and-squaring expm."""
    omega = _check_omega(omega)
    return expm(ETA @ omega)


def _check_omega(omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (4, 4):
        raise InvalidOmegaError(f"omega must be 4x4, got shape {omega.shape}")
    if np.abs(omega + omega.T).max() > 1e-14:
        raise InvalidOmegaError("omega_{mu nu} must be antisymmetric")
    return omega


def from_infinitesimal(omega) -> np.ndarray:
    """``delta^mu_nu + omega^mu_nu`` from lower-index ``omega_{mu nu}``."""
    return np.eye(4) + ETA @ _check_omega(omega)


def omega_parameters(omega) -> tuple[np.ndarray, np.ndarray]:
    """Rotation vector ``theta_i = 1/2 eps_ijk omega^{jk}`` and boost vector ``tau^i = omega^i_0``."""
    omega = _check_omega(omega)
    theta = 0.5 * np.einsum("ijk,jk->i", LEVI_CIVITA, omega[1:, 1:])
    tau = omega[1:, 0].copy()
    return theta, tau


def omega_from_parameters(theta, tau) -> np.ndarray:
    """Inverse of :func:`omega_parameters`."""
    omega = np.zeros((4, 4))
    omega[1:, 1:] = np.einsum("ijk,k->ij", LEVI_CIVITA, np.asarray(theta, dtype=float))
    omega[1:, 0] = tau
    omega[0, 1:] = -np.asarray(tau, dtype=float)
    return omega


@dataclass(frozen=True)
class LorentzCheck:
    ok: bool
    metric_residual: float
    det_residual: float
    l00: float

    def __bool__(self):
        return self.ok


def is_lorentz(L, tol: float = 1e-10) -> LorentzCheck:
    L = np.asarray(L, dtype=float)
    if L.shape != (4, 4) or not np.all(np.isfinite(L)):
        return LorentzCheck(False, np.inf, np.inf, np.nan)
    metric = float(np.abs(L.T @ ETA @ L - ETA).max())
    det = float(abs(np.linalg.det(L) - 1.0))
    ok = metric <= tol and det <= tol and L[0, 0] >= 1.0 - tol
    return LorentzCheck(bool(ok), metric, det, float(L[0, 0]))


def inverse(L) -> np.ndarray:
    """``L^{-1} = eta L^T eta`` for Lorentz matrices."""
    return ETA @ np.asarray(L).T @ ETA


def rotation_from_so3(R3) -> RotationParams:
    q = _kernels.quat_from_so3(np.asarray(R3, dtype=float))
    return RotationParams.from_vector(quat_to_vector(q))


def quat_to_vector(q) -> np.ndarray:
    """Angle vector (angle in [0, pi]) of an SU(2)-coordinate quaternion."""
    q = np.asarray(q, dtype=float)
    if q[0] < 0:
        q = -q
    vn = np.linalg.norm(q[1:])
    if vn == 0:
        return np.zeros(3)
    return 2.0 * np.arctan2(vn, q[0]) * q[1:] / vn


def polar_decompose(L, tol: float = 1e-8) -> tuple[RotationParams, BoostParams]:
    """Split ``L = rotation_matrix(R) @ boost_matrix(B)``."""
    L = np.asarray(L, dtype=float)
    check = is_lorentz(L, tol)
    if not check:
        raise DecompositionError(f"input is not a proper orthochronous Lorentz matrix: {check}")
    s = float(np.linalg.norm(L[0, 1:]))
    boost = BoostParams.from_vector(np.arcsinh(s) * L[0, 1:] / s) if s > 0 else BoostParams(0.0)
    R = L @ inverse(boost_matrix(boost))
    residual = max(np.abs(R[0, 1:]).max(), np.abs(R[1:, 0]).max(), abs(R[0, 0] - 1.0))
    R3 = R[1:, 1:]
    residual = max(residual, np.abs(R3.T @ R3 - np.eye(3)).max())
    if residual > max(tol, 1e-8) * max(1.0, np.abs(L).max()):
        raise DecompositionError(f"rotation factor failed orthogonality check (residual {residual:.3g})")
    return rotation_from_so3(R3), boost


def random_lorentz(rng: np.random.Generator, max_rapidity: float = 3.0, max_angle: float = 3.0):
    """Random ``R(psi) L(alpha)`` with uniform directions; returns (matrix, rotation, boost)."""
    rot = RotationParams(rng.uniform(0, max_angle), tuple(_random_unit(rng)))
    boost = BoostParams(rng.uniform(0, max_rapidity), tuple(_random_unit(rng)))
    return rotation_matrix(rot) @ boost_matrix(boost), rot, boost


def _random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    return _random_unit(rng)


def random_momentum(rng: np.random.Generator, m: float, max_rapidity: float = 3.0) -> np.ndarray:
    chi = rng.uniform(0, max_rapidity)
    return on_shell(m * np.sinh(chi) * _random_unit(rng), m)
