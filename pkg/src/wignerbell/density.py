"""Reduced density matrices of fermionic states, block forms and entropies.

Reduction follows Yang's prescription: with sorted mode subsets ``I`` and
``J`` of size ``m``,

    <I| rho_m |J> = Tr{ a_{i1} ... a_{im} rho a+_{jm} ... a+_{j1} },

evaluated by applying annihilation strings to the basis states of ``rho``.
For a normalized ``n``-particle state ``Tr rho_m = C(n, m)``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from collections.abc import Sequence
from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from wignerbell.errors import NormalizationError, NotADensityMatrixError, WignerBellError
from wignerbell.fockspace import (
    FockState,
    MassSpec,
    Mode,
    annihilate,
    lorentz_transform_state,
    permutation_sign,
)

ZERO_THRESHOLD = 1e-12
NEGATIVE_TOL = 1e-8

Label = tuple[Mode, ...]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian matrix over an ordered basis of sorted ``m``-mode labels."""

    basis: tuple[Label, ...]
    matrix: np.ndarray

    def __post_init__(self):
        basis = tuple(tuple(b) for b in self.basis)
        M = np.array(self.matrix, dtype=complex)
        if M.shape != (len(basis), len(basis)):
            raise ValueError(f"matrix shape {M.shape} does not match a basis of size {len(basis)}")
        sizes = {len(b) for b in basis}
        if len(sizes) > 1:
            raise ValueError("basis labels must share one particle number")
        if M.size and np.abs(M - M.conj().T).max() > 1e-12 * max(1.0, np.abs(M).max()):
            raise NotADensityMatrixError("matrix is not Hermitian")
        M.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", M)

    @property
    def particle_number(self) -> int:
        return len(self.basis[0]) if self.basis else 0

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> DensityMatrix:
        t = self.trace
        if not t > 0:
            raise NotADensityMatrixError("density matrix has non-positive trace")
        return DensityMatrix(self.basis, self.matrix / t)

    def spectrum(self) -> Spectrum:
        return Spectrum.of(self)

    @classmethod
    def from_state(cls, state: FockState) -> DensityMatrix:
        """``|state><state|`` over the state's own basis labels (sorted)."""
        n = state.particle_number
        labels = sorted(state.terms, key=lambda k: [m.key for m in k])
        if any(len(k) != n for k in labels):
            raise WignerBellError("state has no fixed particle number")
        v = np.array([state.terms[k] for k in labels], dtype=complex)
        return cls(tuple(labels), np.outer(v, v.conj()))

    def element(self, i: Label, j: Label) -> complex:
        index = {b: k for k, b in enumerate(self.basis)}
        a, b = index.get(tuple(i)), index.get(tuple(j))
        return 0j if a is None or b is None else complex(self.matrix[a, b])

    def to_document(self) -> dict:
        return {
            "basis": [[{"p": list(m.momentum), "spin": m.spin_symbol, "species": m.species} for m in b] for b in self.basis],
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document())


@dataclass(frozen=True)
class Spectrum:
    """Descending eigenvalues of a normalized density matrix."""

    eigenvalues: tuple[float, ...]

    @classmethod
    def of(cls, rho: DensityMatrix) -> Spectrum:
        rho = rho.normalized()
        w = np.linalg.eigvalsh(rho.matrix)
        if w.size and w.min() < -NEGATIVE_TOL:
            raise NotADensityMatrixError(f"eigenvalue {w.min():.3g} is negative")
        w = np.clip(w, 0.0, 1.0)
        w[w < ZERO_THRESHOLD] = 0.0
        return cls(tuple(float(x) for x in np.sort(w)[::-1]))

    @property
    def nonzero(self) -> np.ndarray:
        a = np.asarray(self.eigenvalues)
        return a[a > 0]

    def entropy(self) -> float:
        lam = self.nonzero
        return float(-np.sum(lam * np.log(lam)))

    def displacement(self, other: Spectrum) -> float:
        """Max-norm distance between zero-padded descending spectra."""
        a, b = np.asarray(self.eigenvalues), np.asarray(other.eigenvalues)
        n = max(a.size, b.size)
        a = np.pad(a, (0, n - a.size))
        b = np.pad(b, (0, n - b.size))
        return float(np.abs(a - b).max(initial=0.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "eigenvalue"])
        for i, lam in enumerate(self.eigenvalues):
            w.writerow([i, repr(lam)])
        return buf.getvalue()


def _annihilation_string(state: FockState, label: Label) -> FockState:
    """``a_{i1} ... a_{im} |state>`` (rightmost operator acts first)."""
    for mode in reversed(label):
        state = annihilate(state, mode)
        if state.is_zero:
            break
    return state


def _modes_of(basis: Sequence[Label]) -> list[Mode]:
    return sorted({m for b in basis for m in b})


def reduce(rho: DensityMatrix, m: int, modes: Sequence[Mode] | None = None) -> DensityMatrix:
    """Reduced ``m``-particle density matrix over all sorted ``m``-subsets of ``modes``."""
    n = rho.particle_number
    if not 1 <= m < n:
        raise ValueError(f"reduction order must satisfy 1 <= m < n = {n}, got {m}")
    modes = _modes_of(rho.basis) if modes is None else sorted(modes)
    labels = list(itertools.combinations(modes, m))
    # column A of M_I holds a_I |A>, indexed by the remaining (n-m)-mode label
    rest_index: dict[Label, int] = {}
    cols: list[list[tuple[int, int, complex]]] = []
    for I in labels:
        entries = []
        for a, A in enumerate(rho.basis):
            for K, amp in _annihilation_string(FockState({A: 1.0}), I).items():
                k = rest_index.setdefault(K, len(rest_index))
                entries.append((k, a, amp))
        cols.append(entries)
    mats = []
    for entries in cols:
        M = np.zeros((len(rest_index), len(rho.basis)), dtype=complex)
        for k, a, amp in entries:
            M[k, a] += amp
        mats.append(M)
    if mats:
        stack = np.stack(mats)  # (I, K, A)
        out = np.einsum("ika,ab,jkb->ij", stack, rho.matrix, stack.conj())
    else:
        out = np.zeros((0, 0), dtype=complex)
    return DensityMatrix(tuple(labels), 0.5 * (out + out.conj().T))


def reduce_state(state: FockState, m: int, modes: Sequence[Mode] | None = None) -> DensityMatrix:
    """Reduction of the pure state ``|state><state|`` via ``<a_J psi | a_I psi>``.

    Unlike :func:`reduce`, ``m = n`` is accepted and gives the state itself.
    """
    n = state.particle_number
    if not 1 <= m <= n:
        raise ValueError(f"reduction order must satisfy 1 <= m <= n = {n}, got {m}")
    modes = state.modes if modes is None else sorted(modes)
    labels = list(itertools.combinations(modes, m))
    rest_index: dict[Label, int] = {}
    vecs = []
    for I in labels:
        v = _annihilation_string(state, I)
        vecs.append({rest_index.setdefault(K, len(rest_index)): amp for K, amp in v.items()})
    V = np.zeros((len(labels), len(rest_index)), dtype=complex)
    for i, d in enumerate(vecs):
        for k, amp in d.items():
            V[i, k] = amp
    out = V @ V.conj().T
    return DensityMatrix(tuple(labels), 0.5 * (out + out.conj().T))


def reduce_from_higher(rho_k: DensityMatrix, m: int) -> DensityMatrix:
    """Normalized ``rho_m`` from a normalized higher reduction ``rho_k`` by the partial-trace ratio.

    ``rho_m[I,J]/Tr rho_m = m!(k-m)!/k! sum_K sgn(K,I) sgn(K,J) rho_k[KI,KJ]/Tr rho_k``.
    """
    k = rho_k.particle_number
    if not 1 <= m < k:
        raise ValueError(f"need 1 <= m < k = {k}, got {m}")
    rho_k = rho_k.normalized()
    modes = _modes_of(rho_k.basis)
    index = {b: i for i, b in enumerate(rho_k.basis)}
    labels = list(itertools.combinations(modes, m))
    pos = {I: i for i, I in enumerate(labels)}
    out = np.zeros((len(labels), len(labels)), dtype=complex)
    for K in itertools.combinations(modes, k - m):
        Kset = set(K)
        members = []
        for I in labels:
            if Kset.intersection(I):
                continue
            seq = K + I
            order = sorted(range(k), key=seq.__getitem__)
            merged = tuple(seq[o] for o in order)
            if merged in index:
                members.append((pos[I], index[merged], permutation_sign(order)))
        for i, a, sa in members:
            for j, b, sb in members:
                out[i, j] += sa * sb * rho_k.matrix[a, b]
    out *= factorial(m) * factorial(k - m) / factorial(k)
    return DensityMatrix(tuple(labels), 0.5 * (out + out.conj().T))


def _check_antisymmetric(C, tol: float = 1e-12) -> np.ndarray:
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"coefficient matrix must be square, got shape {C.shape}")
    if np.abs(C + C.T).max(initial=0.0) > tol:
        raise ValueError("coefficient matrix is not antisymmetric")
    return C


def one_particle_from_C(C, modes: Sequence[Mode] | None = None) -> DensityMatrix:
    """``rho_1 = 4 C C^dagger`` (trace 2 for a unit-norm state)."""
    C = _check_antisymmetric(C)
    if modes is None:
        modes = [Mode((float(i), 0.0, 0.0)) for i in range(C.shape[0])]
    return DensityMatrix(tuple((m,) for m in modes), 4.0 * C @ C.conj().T)


@dataclass(frozen=True, eq=False)
class BlockForm:
    """``u C u^T = (+) [[0, c_i], [-c_i, 0]]`` with ``c_i > 0`` descending."""

    c: np.ndarray
    u: np.ndarray

    @property
    def n_f(self) -> int:
        return int(np.count_nonzero(self.c))

    def block_matrix(self) -> np.ndarray:
        n = self.u.shape[0]
        B = np.zeros((n, n), dtype=complex)
        for i, ci in enumerate(self.c):
            B[2 * i, 2 * i + 1] = ci
            B[2 * i + 1, 2 * i] = -ci
        return B

    def reconstruct(self) -> np.ndarray:
        return self.u.conj().T @ self.block_matrix() @ self.u.conj()


def _orthonormal_complement(V: np.ndarray, n: int) -> np.ndarray:
    if V.shape[1] == 0:
        return np.eye(n, dtype=complex)
    Q, _ = np.linalg.qr(np.hstack([V, np.eye(n, dtype=complex)]))
    return Q[:, V.shape[1] : n]


def block_diagonalize(C, tol: float = ZERO_THRESHOLD) -> BlockForm:
    """Youla form of an antisymmetric complex matrix.

    Eigenvectors of ``C C^dagger`` with eigenvalue ``s^2 > 0`` come in pairs
    ``(v, -C v*/s)``; peeling them off one pair at a time gives ``u``.  The
    kernel is completed with an arbitrary orthonormal basis.  Blocks with
    ``2 c^2 <= tol * Tr(C C^dagger)`` count as zero.
    """
    C = _check_antisymmetric(C)
    n = C.shape[0]
    H = C @ C.conj().T
    H = 0.5 * (H + H.conj().T)
    cutoff = max(float(np.trace(H).real), 1e-300)
    pairs: list[np.ndarray] = []
    cs: list[float] = []
    used = np.zeros((n, 0), dtype=complex)
    while 2 * len(cs) + 2 <= n:
        P = np.eye(n) - used @ used.conj().T
        w, E = np.linalg.eigh(P @ H @ P)
        if w[-1] <= 0.5 * tol * cutoff:
            break
        v = P @ E[:, -1]
        v = v / np.linalg.norm(v)
        s = float(np.sqrt(np.real(v.conj() @ H @ v)))
        v2 = -C @ v.conj() / s
        v2 = v2 - used @ (used.conj().T @ v2) - v * (v.conj() @ v2)
        v2 = v2 / np.linalg.norm(v2)
        pairs.extend([v, v2])
        used = np.column_stack(pairs)
        cs.append(s)
    V = np.hstack([used, _orthonormal_complement(used, n)]) if used.shape[1] < n else used
    u = V.conj().T
    c = np.array(cs)
    # phases: make the block entries real positive
    B = u @ C @ u.T
    for i in range(len(cs)):
        z = B[2 * i, 2 * i + 1]
        if abs(z) > 0:
            u[2 * i] *= np.conj(z) / abs(z)
    B = u @ C @ u.T
    c = np.array([B[2 * i, 2 * i + 1].real for i in range(len(cs))])
    return BlockForm(c, u)


def block_residual(C, bf: BlockForm) -> float:
    return float(np.abs(bf.u @ np.asarray(C) @ bf.u.T - bf.block_matrix()).max(initial=0.0))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-Tr rho ln rho`` of ``rho / Tr rho`` (natural log)."""
    return Spectrum.of(rho).entropy()


def entropy_bounds(n_f: int) -> tuple[float, float]:
    return float(np.log(2.0)), float(np.log(2.0 * n_f))


def entropy_from_blocks(blocks: BlockForm, tol: float = 1e-10) -> float:
    """``S_1 = -4 sum |c_i|^2 ln(2 |c_i|^2)`` for a unit-norm state."""
    c2 = np.abs(np.asarray(blocks.c)) ** 2
    if abs(4.0 * c2.sum() - 1.0) > tol:
        raise NormalizationError(f"4 sum |c_i|^2 = {4.0 * c2.sum():.12g}, expected 1")
    c2 = c2[c2 > ZERO_THRESHOLD]
    S = float(-4.0 * np.sum(c2 * np.log(2.0 * c2)))
    lo, hi = entropy_bounds(len(c2))
    if not lo - tol <= S <= hi + tol:
        raise WignerBellError(f"entropy {S} outside [{lo}, {hi}]")
    return S


@dataclass(frozen=True)
class InvarianceRow:
    m: int
    before: float
    after: float
    spectrum_shift: float

    @property
    def difference(self) -> float:
        return abs(self.after - self.before)


def invariance_report(state: FockState, L, m_values: Sequence[int], mass_of: MassSpec) -> list[InvarianceRow]:
    """Entropy of ``rho_m`` before and after ``U(Lambda)`` for each requested ``m``."""
    n = state.particle_number
    moved = lorentz_transform_state(L, state, mass_of)
    rows = []
    for m in m_values:
        if not 1 <= m <= n:
            raise ValueError(f"m must lie in 1..{n}, got {m}")
        a = reduce_state(state, m).spectrum()
        b = reduce_state(moved, m).spectrum()
        rows.append(InvarianceRow(m, a.entropy(), b.entropy(), a.displacement(b)))
    return rows


def expected_trace(n: int, m: int) -> int:
    return comb(n, m)
