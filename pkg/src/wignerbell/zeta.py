"""Zeta functions of finite density-matrix spectra and the entropy identities they carry.

For eigenvalues ``lambda_n`` in (0, 1]:

* ``zeta_rho(s) = sum lambda^-s``; its derivative at ``s = -1`` is ``-sum lambda ln lambda``;
* ``zeta_inv(s) = sum lambda^s``; minus its derivative at ``s = 1`` is the same entropy;
* ``(1/alpha) d/ds sum lambda^(-alpha s)`` at ``s = -1/alpha`` reproduces it for any ``alpha != 0``.

Derivatives are analytic sums. :func:`numerical_derivative` is a
finite-difference cross-check only.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from wignerbell.density import ZERO_THRESHOLD, DensityMatrix, Spectrum


def _real(s) -> float:
    if isinstance(s, complex) or np.iscomplexobj(s):
        raise TypeError("only real s is supported")
    return float(s)


@dataclass(frozen=True)
class ZetaSpectrum:
    """Strictly positive eigenvalues; zeros are dropped on construction."""

    eigenvalues: tuple[float, ...]

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float).ravel()
        if np.any(~np.isfinite(lam)) or np.any(lam < 0) or np.any(lam > 1.0 + 1e-12):
            raise ValueError("eigenvalues must lie in [0, 1]")
        lam = np.minimum(lam[lam > ZERO_THRESHOLD], 1.0)
        if lam.sum() > 1.0 + 1e-10:
            raise ValueError(f"eigenvalues sum to {lam.sum():.12g} > 1")
        object.__setattr__(self, "eigenvalues", tuple(float(x) for x in np.sort(lam)[::-1]))

    @classmethod
    def of(cls, source: DensityMatrix | Spectrum | Iterable[float]) -> ZetaSpectrum:
        if isinstance(source, DensityMatrix):
            source = Spectrum.of(source)
        if isinstance(source, Spectrum):
            return cls(source.eigenvalues)
        return cls(tuple(source))

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.eigenvalues)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def zeta_rho(spec: ZetaSpectrum, s: float) -> float:
    return float(np.sum(spec.values ** (-_real(s))))


def zeta_rho_derivative(spec: ZetaSpectrum, s: float) -> float:
    lam = spec.values
    return float(-np.sum(lam ** (-_real(s)) * np.log(lam)))


def zeta_inverse(spec: ZetaSpectrum, s: float) -> float:
    """``zeta`` of ``rho'^{-1}``: ``sum lambda^s``, bounded by ``N`` for ``s > 0``."""
    return float(np.sum(spec.values ** _real(s)))


def zeta_inverse_derivative(spec: ZetaSpectrum, s: float) -> float:
    lam = spec.values
    return float(np.sum(lam ** _real(s) * np.log(lam)))


def entropy_via_zeta_at_minus_one(spec: ZetaSpectrum) -> float:
    return zeta_rho_derivative(spec, -1.0)


def entropy_via_inverse_zeta_at_one(spec: ZetaSpectrum) -> float:
    return -zeta_inverse_derivative(spec, 1.0)


def inverse_zeta_bound_holds(spec: ZetaSpectrum, s: float) -> bool:
    if _real(s) <= 0:
        raise ValueError("the dimension bound applies for s > 0")
    return zeta_inverse(spec, s) <= spec.n * (1.0 + 1e-15)


def zeta_alpha(spec: ZetaSpectrum, alpha: float, s: float) -> float:
    """``sum lambda^(-alpha s)``: the zeta function of ``rho^alpha``."""
    return float(np.sum(spec.values ** (-_real(alpha) * _real(s))))


def entropy_via_alpha(spec: ZetaSpectrum, alpha: float) -> float:
    alpha = _real(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    lam = spec.values
    s = -1.0 / alpha
    # d/ds lambda^(-alpha s) = -alpha ln(lambda) lambda^(-alpha s)
    return float(np.sum(-alpha * np.log(lam) * lam ** (-alpha * s)) / alpha)


def direct_entropy(spec: ZetaSpectrum) -> float:
    lam = spec.values
    return float(-np.sum(lam * np.log(lam)))


def numerical_derivative(f: Callable[[float], float], s: float, step: float = 1e-6) -> float:
    """Central difference, used only to cross-check the analytic derivatives."""
    return (f(s + step) - f(s - step)) / (2.0 * step)


def numerical_entropies(spec: ZetaSpectrum, step: float = 1e-6) -> dict[str, float]:
    return {
        "zeta_at_minus_one": numerical_derivative(lambda s: zeta_rho(spec, s), -1.0, step),
        "inverse_zeta_at_one": -numerical_derivative(lambda s: zeta_inverse(spec, s), 1.0, step),
    }


def zeta_table(spec: ZetaSpectrum, s_values: Iterable[float]) -> list[tuple[float, float, float]]:
    """Rows ``(s, zeta_rho(s), zeta_inverse(s))``."""
    return [(float(s), zeta_rho(spec, s), zeta_inverse(spec, s)) for s in s_values]


def zeta_table_csv(spec: ZetaSpectrum, s_values: Iterable[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "zeta_rho", "zeta_rho_inverse"])
    for row in zeta_table(spec, s_values):
        w.writerow([repr(x) for x in row])
    return buf.getvalue()
