"""One-particle momentum-space generators of the Lorentz group on a 3D grid.

Acting on two-component wavefunctions ``psi_s(p)``:

    J^i = sigma^i/2 - i (p x d/dp)^i
    K^i = (sigma/2 x p)^i / (p0 + m) - i p0 d/dp^i - i p^i / (2 p0)

The last term of ``K`` (the measure term) makes it Hermitian under the plain
``d^3p`` inner product. Without it, ``K`` is Hermitian under ``d^3p / p0``.

Derivatives come either from second-order central differences on the grid
(``method="fd"``) or from exact derivatives of an analytic test function
(``method="analytic"``).
"""

from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from wignerbell import _kernels
from wignerbell.errors import BoundaryLeakError, InvalidMassError
from wignerbell.lorentz import LEVI_CIVITA, generator_exp, inverse, omega_parameters, on_shell
from wignerbell.wigner import wigner_finite

BOUNDARY_TOL = 1e-8
BOUNDARY_SHELLS = 2

Generator = tuple[str, int]

# (a, b, expected, factor): [a, b] = factor * expected
ALGEBRA: tuple[tuple[Generator, Generator, Generator, complex], ...] = (
    (("J", 0), ("J", 1), ("J", 2), 1j),
    (("K", 0), ("K", 1), ("J", 2), -1j),
    (("J", 0), ("K", 1), ("K", 2), 1j),
)
FAMILY_NAMES = ("[J,J]=iJ", "[K,K]=-iJ", "[J,K]=iK")


@dataclass(frozen=True)
class GridSpec:
    n: int = 33
    mass: float = 1.0
    extent: float | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise InvalidMassError(f"mass must be positive, got {self.mass}")
        if self.n < 5:
            raise ValueError("need at least 5 points per axis")
        if self.extent is None:
            object.__setattr__(self, "extent", 4.0 * self.mass)
        if not self.extent > 0:
            raise ValueError("grid extent must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.extent / (self.n - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.n)

    def momenta(self) -> np.ndarray:
        """Shape ``(3, n, n, n)``."""
        a = self.axis
        return np.stack(np.meshgrid(a, a, a, indexing="ij"))

    def refined(self, factor: int = 2) -> GridSpec:
        return GridSpec((self.n - 1) * factor + 1, self.mass, self.extent)


@dataclass(frozen=True)
class GaussianPacket:
    """``spinor * scale * (a0 + a.p) * exp(-|p-c|^2 / (2 w^2) + i k.p)`` with exact derivatives."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    width: float = 0.5
    wavevector: tuple[float, float, float] = (0.0, 0.0, 0.0)
    a0: complex = 1.0
    a: tuple[complex, complex, complex] = (0.0, 0.0, 0.0)
    spinor: tuple[complex, complex] = (1.0, 0.0)
    scale: float = 1.0

    def _arrays(self, p):
        c = np.asarray(self.center, dtype=float).reshape(3, *([1] * (p.ndim - 1)))
        k = np.asarray(self.wavevector, dtype=float).reshape(c.shape)
        a = np.asarray(self.a, dtype=complex).reshape(c.shape)
        return c, k, a

    def jet(self, p: np.ndarray, order: int = 2):
        """Values ``(2, ...)``, gradient ``(3, 2, ...)`` and Hessian ``(3, 3, 2, ...)`` at points ``p (3, ...)``."""
        p = np.asarray(p, dtype=float)
        c, k, a = self._arrays(p)
        w2 = self.width**2
        d = p - c
        e = self.scale * np.exp(-np.sum(d * d, axis=0) / (2 * w2) + 1j * np.sum(k * p, axis=0))
        P = self.a0 + np.sum(a * p, axis=0)
        dQ = -d / w2 + 1j * k
        g = P * e
        chi = np.asarray(self.spinor, dtype=complex).reshape(2, *([1] * (p.ndim - 1)))
        out = [chi * g]
        if order >= 1:
            grad = (a + P * dQ) * e
            out.append(grad[:, None] * chi[None])
        if order >= 2:
            hess = (a[:, None] * dQ[None] + a[None] * dQ[:, None] + P * (dQ[:, None] * dQ[None])) * e
            hess = hess - (P * e / w2) * np.eye(3).reshape(3, 3, *([1] * (p.ndim - 1)))
            out.append(hess[:, :, None] * chi[None, None])
        return tuple(out)

    def value(self, p) -> np.ndarray:
        return self.jet(p, 0)[0]


def default_packets() -> tuple[GaussianPacket, GaussianPacket]:
    """Two asymmetric, boundary-safe test functions for the default grid."""
    phi = GaussianPacket(
        center=(0.3, -0.2, 0.1),
        width=0.55,
        wavevector=(0.4, 0.2, -0.3),
        a0=1.0,
        a=(0.3, -0.2j, 0.1),
        spinor=(0.6, 0.8j),
    )
    psi = GaussianPacket(
        center=(-0.2, 0.25, -0.15),
        width=0.5,
        wavevector=(-0.3, 0.5, 0.1),
        a0=0.8 + 0.2j,
        a=(-0.2j, 0.25, 0.3),
        spinor=(0.8, -0.6),
    )
    return phi, psi


@dataclass(frozen=True, eq=False)
class WavefunctionGrid:
    spec: GridSpec
    values: np.ndarray
    closure: GaussianPacket | None = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        n = self.spec.n
        if v.shape != (2, n, n, n):
            raise ValueError(f"values must have shape (2, {n}, {n}, {n}), got {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_packet(cls, spec: GridSpec, packet: GaussianPacket, normalize: bool = True) -> WavefunctionGrid:
        values = packet.value(spec.momenta())
        if normalize:
            nrm = np.sqrt(np.sum(np.abs(values) ** 2) * spec.h**3)
            packet = replace(packet, scale=packet.scale / nrm)
            values = values / nrm
        return cls(spec, values, packet)

    def norm2(self, measure: str = "d3p") -> float:
        return float(inner(self, self, measure).real)

    def boundary_max(self, shells: int = BOUNDARY_SHELLS) -> float:
        a = np.abs(self.values)
        n = self.spec.n
        inner_box = a[:, shells : n - shells, shells : n - shells, shells : n - shells]
        total = a.max(initial=0.0)
        if inner_box.size == 0:
            return float(total)
        mask = np.ones(a.shape[1:], dtype=bool)
        mask[shells : n - shells, shells : n - shells, shells : n - shells] = False
        return float(a[:, mask].max(initial=0.0))

    def check_boundary(self, tol: float = BOUNDARY_TOL) -> None:
        b = self.boundary_max()
        if b > tol:
            raise BoundaryLeakError(f"|psi| reaches {b:.3g} on the outer {BOUNDARY_SHELLS} shells (limit {tol:g})")

    def __add__(self, other: WavefunctionGrid) -> WavefunctionGrid:
        return WavefunctionGrid(self.spec, self.values + other.values)

    def __sub__(self, other: WavefunctionGrid) -> WavefunctionGrid:
        return WavefunctionGrid(self.spec, self.values - other.values)

    def __mul__(self, c: complex) -> WavefunctionGrid:
        return WavefunctionGrid(self.spec, self.values * c)

    __rmul__ = __mul__

    def dump_csv(self, path: str | Path) -> None:
        """Rows ``(index, spin, re, im)`` in C order over the spatial grid."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "spin", "re", "im"])
            for s in range(2):
                flat = self.values[s].ravel()
                for i, z in enumerate(flat):
                    w.writerow([i, s, repr(float(z.real)), repr(float(z.imag))])

    def dump_binary(self, path: str | Path) -> None:
        """Raw little-endian complex128, shape ``(2, n, n, n)`` in C order."""
        self.values.astype("<c16").tofile(path)


def inner(a: WavefunctionGrid, b: WavefunctionGrid, measure: str = "d3p") -> complex:
    """Riemann sum of ``sum_s a_s* b_s`` with ``d^3p`` or ``d^3p / p0``."""
    w = _measure_weight(a.spec, measure)
    integrand = np.sum(a.values.conj() * b.values, axis=0) * w
    return complex(np.sum(integrand) * a.spec.h**3)


def _measure_weight(spec: GridSpec, measure: str):
    if measure == "d3p":
        return 1.0
    if measure == "d3p/p0":
        p = spec.momenta()
        return 1.0 / np.sqrt(np.sum(p * p, axis=0) + spec.mass**2)
    raise ValueError(f"measure must be 'd3p' or 'd3p/p0', got {measure!r}")


def _spin(j: int, f: np.ndarray) -> np.ndarray:
    """``(sigma^j / 2) f`` on the leading spinor axis."""
    if j == 0:
        return 0.5 * np.stack([f[1], f[0]])
    if j == 1:
        return 0.5 * np.stack([-1j * f[1], 1j * f[0]])
    return 0.5 * np.stack([f[0], -f[1]])


def _cyc(i: int) -> tuple[int, int]:
    return (i + 1) % 3, (i + 2) % 3


def _apply(kind: str, i: int, f: np.ndarray, grad, p: np.ndarray, m: float, measure_term: bool) -> np.ndarray:
    """Generator action given values ``f`` and a gradient provider ``grad(axis)``."""
    l, n = _cyc(i)
    if kind == "J":
        # (p x (-i d))^i = -i (p_l d_n - p_n d_l)
        return _spin(i, f) - 1j * (p[l] * grad(n) - p[n] * grad(l))
    if kind == "K":
        p0 = np.sqrt(np.sum(p * p, axis=0) + m * m)
        out = (_spin(l, f) * p[n] - _spin(n, f) * p[l]) / (p0 + m)
        out = out - 1j * p0 * grad(i)
        if measure_term:
            out = out - 0.5j * (p[i] / p0) * f
        return out
    raise ValueError(f"generator kind must be 'J' or 'K', got {kind!r}")


def _apply_jet(kind: str, i: int, val, grad, hess, p, m: float, measure_term: bool):
    """Value and gradient of ``G f`` from the 2-jet of ``f``."""
    out = _apply(kind, i, val, lambda a: grad[a], p, m, measure_term)
    l, n = _cyc(i)
    dout = []
    for d in range(3):
        g = _apply(kind, i, grad[d], lambda a: hess[d, a], p, m, measure_term)
        # product-rule terms from derivatives of the p-dependent coefficients
        if kind == "J":
            g = g - 1j * ((d == l) * grad[n] - (d == n) * grad[l])
        else:
            p0 = np.sqrt(np.sum(p * p, axis=0) + m * m)
            dpn = (d == n) / (p0 + m) - p[n] * p[d] / (p0 * (p0 + m) ** 2)
            dpl = (d == l) / (p0 + m) - p[l] * p[d] / (p0 * (p0 + m) ** 2)
            g = g + _spin(l, val) * dpn - _spin(n, val) * dpl
            g = g - 1j * (p[d] / p0) * grad[i]
            if measure_term:
                g = g - 0.5j * ((d == i) / p0 - p[i] * p[d] / p0**3) * val
        dout.append(g)
    return out, np.stack(dout)


def _fd_grad(f: np.ndarray, h: float):
    cache = {}

    def grad(a: int) -> np.ndarray:
        if a not in cache:
            cache[a] = _kernels.central_difference(f, h, a + 1)
        return cache[a]

    return grad


def apply_generator(
    psi: WavefunctionGrid,
    gen: Generator,
    measure_term: bool = True,
    method: str = "fd",
    check: bool = True,
) -> WavefunctionGrid:
    kind, i = gen
    if i not in (0, 1, 2):
        raise ValueError(f"axis must be 0, 1 or 2, got {i!r}")
    if check:
        psi.check_boundary()
    spec = psi.spec
    p = spec.momenta()
    if method == "fd":
        vals = _apply(kind, i, psi.values, _fd_grad(psi.values, spec.h), p, spec.mass, measure_term)
    elif method == "analytic":
        if psi.closure is None:
            raise ValueError("analytic method needs a test-function closure")
        val, grad = psi.closure.jet(p, 1)
        vals = _apply(kind, i, val, lambda a: grad[a], p, spec.mass, measure_term)
    else:
        raise ValueError(f"method must be 'fd' or 'analytic', got {method!r}")
    return WavefunctionGrid(spec, vals)


def apply_total_J(psi: WavefunctionGrid, i: int, method: str = "fd", check: bool = True) -> WavefunctionGrid:
    return apply_generator(psi, ("J", i), method=method, check=check)


def apply_total_K(
    psi: WavefunctionGrid, i: int, measure_term: bool = True, method: str = "fd", check: bool = True
) -> WavefunctionGrid:
    return apply_generator(psi, ("K", i), measure_term=measure_term, method=method, check=check)


def commutator(psi: WavefunctionGrid, a: Generator, b: Generator, method: str = "fd") -> np.ndarray:
    """Values of ``[A, B] psi``."""
    spec = psi.spec
    if method == "fd":
        ab = apply_generator(apply_generator(psi, b, check=False), a, check=False)
        ba = apply_generator(apply_generator(psi, a, check=False), b, check=False)
        return ab.values - ba.values
    if method != "analytic":
        raise ValueError(f"method must be 'fd' or 'analytic', got {method!r}")
    if psi.closure is None:
        raise ValueError("analytic method needs a test-function closure")
    p = spec.momenta()
    val, grad, hess = psi.closure.jet(p, 2)
    m = spec.mass
    bv, bg = _apply_jet(b[0], b[1], val, grad, hess, p, m, True)
    av, ag = _apply_jet(a[0], a[1], val, grad, hess, p, m, True)
    ab = _apply(a[0], a[1], bv, lambda k: bg[k], p, m, True)
    ba = _apply(b[0], b[1], av, lambda k: ag[k], p, m, True)
    return ab - ba


def commutator_residual(
    psi: WavefunctionGrid,
    pair: tuple[Generator, Generator],
    expected: Generator,
    factor: complex = 1j,
    method: str = "fd",
) -> float:
    """Grid norm of ``([A, B] - factor * E) psi``."""
    psi.check_boundary()
    c = commutator(psi, pair[0], pair[1], method)
    e = apply_generator(psi, expected, method=method, check=False).values
    r = WavefunctionGrid(psi.spec, c - factor * e)
    return float(np.sqrt(r.norm2()))


def family_residuals(psi: WavefunctionGrid, method: str = "fd") -> dict[str, float]:
    return {
        name: commutator_residual(psi, (a, b), e, f, method)
        for name, (a, b, e, f) in zip(FAMILY_NAMES, ALGEBRA, strict=True)
    }


@dataclass(frozen=True)
class ConvergenceStudy:
    h: tuple[float, ...]
    residuals: dict[str, tuple[float, ...]]

    def ratios(self) -> dict[str, tuple[float, ...]]:
        return {k: tuple(r[j] / r[j + 1] for j in range(len(r) - 1)) for k, r in self.residuals.items()}

    def orders(self) -> dict[str, tuple[float, ...]]:
        return {k: tuple(float(np.log2(x)) for x in v) for k, v in self.ratios().items()}

    def within(self, low: float = 3.5, high: float = 4.5) -> bool:
        return all(low <= x <= high for v in self.ratios().values() for x in v)


def convergence_study(
    packet: GaussianPacket | None = None,
    spec: GridSpec | None = None,
    levels: int = 3,
) -> ConvergenceStudy:
    """FD commutator residuals on grids ``h, h/2, ...`` over a fixed extent."""
    packet = packet or default_packets()[1]
    spec = spec or GridSpec()
    hs = []
    res: dict[str, list[float]] = {k: [] for k in FAMILY_NAMES}
    for level in range(levels):
        s = spec.refined(2**level) if level else spec
        psi = WavefunctionGrid.from_packet(s, packet)
        hs.append(s.h)
        for k, v in family_residuals(psi, "fd").items():
            res[k].append(v)
        del psi
    return ConvergenceStudy(tuple(hs), {k: tuple(v) for k, v in res.items()})


def hermiticity_residual(
    phi: WavefunctionGrid,
    psi: WavefunctionGrid,
    i: int,
    measure_term: bool,
    measure: str,
    method: str = "fd",
) -> float:
    """``|<phi|K psi> - <K phi|psi>|`` for ``K^i`` with or without the measure term."""
    kpsi = apply_total_K(psi, i, measure_term, method)
    kphi = apply_total_K(phi, i, measure_term, method)
    return abs(inner(phi, kpsi, measure) - inner(kphi, psi, measure))


def hermiticity_table(
    phi: WavefunctionGrid, psi: WavefunctionGrid, method: str = "fd"
) -> dict[tuple[bool, str], float]:
    """Max over axes of the residual for each (measure term present, measure) pairing."""
    return {
        (term, measure): max(hermiticity_residual(phi, psi, i, term, measure, method) for i in range(3))
        for term in (True, False)
        for measure in ("d3p", "d3p/p0")
    }


MATCHED = ((True, "d3p"), (False, "d3p/p0"))
CROSSED = ((True, "d3p/p0"), (False, "d3p"))


def hermiticity_margin(table: dict[tuple[bool, str], float]) -> float:
    """``min(crossed) / max(matched)``."""
    return min(table[k] for k in CROSSED) / max(max(table[k] for k in MATCHED), 1e-300)


def spin_algebra_residual() -> float:
    """``[S^i, S^j] - i eps_ijk S^k`` for ``S = sigma/2`` at a single point."""
    basis = np.eye(2, dtype=complex)
    S = np.array([_spin(j, basis) for j in range(3)])
    worst = 0.0
    for i in range(3):
        for j in range(3):
            lhs = S[i] @ S[j] - S[j] @ S[i]
            rhs = 1j * np.einsum("k,kab->ab", LEVI_CIVITA[i, j], S)
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def first_order_residual(packet: GaussianPacket, omega, m: float, points: Sequence) -> float:
    """Max difference between ``U(Lambda) psi`` and ``(1 + i theta.J - i tau.K) psi`` at sample points.

    ``Lambda = exp(eta omega)``; the exact transform is
    ``sqrt(q0/p0) D(W(Lambda^-1, p))^-1 psi(q)`` with ``q = Lambda^-1 p``.
    """
    omega = np.asarray(omega, dtype=float)
    theta, tau = omega_parameters(omega)
    Li = inverse(generator_exp(omega))
    worst = 0.0
    for p3 in points:
        p3 = np.asarray(p3, dtype=float)
        p = on_shell(p3, m)
        q = Li @ p
        q[0] = np.sqrt(q[1:] @ q[1:] + m * m)
        D = wigner_finite(Li, p, m).su2
        exact = np.sqrt(q[0] / p[0]) * (D.conj().T @ packet.value(q[1:]))
        pt = p3.reshape(3, 1, 1, 1)
        val, grad = packet.jet(pt, 1)
        lin = val.copy()
        for i in range(3):
            lin = lin + 1j * theta[i] * _apply("J", i, val, lambda a: grad[a], pt, m, True)
            lin = lin - 1j * tau[i] * _apply("K", i, val, lambda a: grad[a], pt, m, True)
        worst = max(worst, float(np.abs(exact - lin[:, 0, 0, 0]).max()))
    return worst
