"""Finite fermionic Fock space with an exact unitary Lorentz action.

A :class:`FockState` is a map from strictly increasing tuples of
:class:`Mode` objects to complex amplitudes.  The tuple ``(m1, ..., mk)``
stands for ``a+(m1) ... a+(mk) |0>``.  The vacuum is ``{(): 1}`` and the zero
vector is the empty map.

Modes keep their exact floating-point momenta, but identity, hashing and
ordering go through a quantized key ``round(p / step)``.
"""

from __future__ import annotations

import functools
import json
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from wignerbell.errors import GridCollisionError, InvalidMassError, WignerBellError
from wignerbell.lorentz import on_shell
from wignerbell.wigner import transform_momentum, wigner_finite

DEFAULT_STEP = 1e-9
PRUNE = 1e-14
MAX_PARTICLES = 6

_SPIN_FROM_TEXT = {"+": 0, "-": 1, "−": 1}
_SPIN_TO_TEXT = ("+", "-")


def _spin_index(spin) -> int:
    if isinstance(spin, str):
        try:
            return _SPIN_FROM_TEXT[spin.strip()]
        except KeyError:
            raise ValueError(f"spin must be '+' or '-', got {spin!r}") from None
    if spin in (0, 1):
        return int(spin)
    if spin in (0.5, -0.5):
        return 0 if spin > 0 else 1
    raise ValueError(f"spin must be '+', '-', 0, 1 or +-1/2, got {spin!r}")


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class Mode:
    """One-particle label ``(p, s, n)``; ``spin`` is 0 for up and 1 for down."""

    momentum: tuple[float, float, float]
    spin: int = 0
    species: int = 0
    step: float = DEFAULT_STEP
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = tuple(float(x) for x in np.asarray(self.momentum, dtype=float).reshape(3))
        if not all(np.isfinite(p)):
            raise ValueError(f"momentum must be finite, got {p}")
        if not self.step > 0:
            raise ValueError("quantization step must be positive")
        object.__setattr__(self, "momentum", p)
        object.__setattr__(self, "spin", _spin_index(self.spin))
        object.__setattr__(self, "species", int(self.species))
        q = tuple(int(v) for v in np.rint(np.asarray(p) / self.step))
        object.__setattr__(self, "key", (q, self.spin, self.species))

    @property
    def sz(self) -> float:
        return 0.5 - self.spin

    @property
    def spin_symbol(self) -> str:
        return _SPIN_TO_TEXT[self.spin]

    def with_spin(self, spin) -> Mode:
        return Mode(self.momentum, spin, self.species, self.step)

    def four_momentum(self, m: float) -> np.ndarray:
        return on_shell(self.momentum, m)

    def __eq__(self, other):
        if not isinstance(other, Mode):
            return NotImplemented
        return self.key == other.key

    def __lt__(self, other):
        if not isinstance(other, Mode):
            return NotImplemented
        return self.key < other.key

    def __hash__(self):
        return hash(self.key)


def mode_pair(p, species: int = 0, step: float = DEFAULT_STEP) -> tuple[Mode, Mode]:
    """Spin-up and spin-down modes at one momentum."""
    return Mode(p, 0, species, step), Mode(p, 1, species, step)


class FockState:
    """Immutable finite superposition of occupation-number basis states."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple[Mode, ...], complex] | None = None):
        clean: dict[tuple[Mode, ...], complex] = {}
        for modes, amp in (terms or {}).items():
            modes = tuple(modes)
            if any(modes[i + 1] <= modes[i] for i in range(len(modes) - 1)):
                raise ValueError("mode lists must be strictly increasing")
            amp = complex(amp)
            if abs(amp) >= PRUNE:
                clean[modes] = amp
        self._terms = clean

    @classmethod
    def vacuum(cls) -> FockState:
        return cls({(): 1.0})

    @classmethod
    def zero(cls) -> FockState:
        return cls()

    @classmethod
    def basis(cls, modes: Iterable[Mode], amp: complex = 1.0) -> FockState:
        """``amp * a+(m1) ... a+(mk) |0>`` for modes given in any order."""
        state = cls.vacuum()
        for m in reversed(list(modes)):
            state = create(state, m)
        return state * amp

    @property
    def terms(self) -> dict[tuple[Mode, ...], complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def particle_numbers(self) -> set[int]:
        return {len(k) for k in self._terms}

    @property
    def particle_number(self) -> int:
        ns = self.particle_numbers
        if len(ns) != 1:
            raise WignerBellError(f"state has no fixed particle number (sectors {sorted(ns)})")
        return ns.pop()

    @property
    def modes(self) -> list[Mode]:
        return sorted({m for k in self._terms for m in k})

    def norm2(self) -> float:
        return float(np.sum(np.abs(np.fromiter(self._terms.values(), complex, len(self._terms))) ** 2))

    def normalized(self) -> FockState:
        n = np.sqrt(self.norm2())
        if n == 0:
            raise WignerBellError("cannot normalize the zero vector")
        return self * (1.0 / n)

    def __add__(self, other: FockState) -> FockState:
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0.0) + v
        return FockState(out)

    def __sub__(self, other: FockState) -> FockState:
        return self + other * (-1.0)

    def __mul__(self, c: complex) -> FockState:
        return FockState({k: c * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> FockState:
        return self * (-1.0)

    def __repr__(self) -> str:
        return f"FockState({len(self._terms)} terms)"

    def to_json(self) -> str:
        return json.dumps(to_document(self))

    @classmethod
    def from_json(cls, text: str, step: float = DEFAULT_STEP) -> FockState:
        return from_document(json.loads(text), step)


def create(state: FockState, mode: Mode) -> FockState:
    out: dict[tuple[Mode, ...], complex] = {}
    for modes, amp in state.items():
        if mode in modes:
            continue
        j = sum(1 for m in modes if m < mode)
        key = modes[:j] + (mode,) + modes[j:]
        out[key] = out.get(key, 0.0) + (amp if j % 2 == 0 else -amp)
    return FockState(out)


def annihilate(state: FockState, mode: Mode) -> FockState:
    out: dict[tuple[Mode, ...], complex] = {}
    for modes, amp in state.items():
        try:
            j = modes.index(mode)
        except ValueError:
            continue
        key = modes[:j] + modes[j + 1 :]
        out[key] = out.get(key, 0.0) + (amp if j % 2 == 0 else -amp)
    return FockState(out)


def inner_product(a: FockState, b: FockState) -> complex:
    """``<a|b>``, antilinear in ``a``."""
    small, large, conj_small = (a, b, True) if len(a) <= len(b) else (b, a, False)
    total = 0j
    lt = large.terms
    for k, v in small.items():
        w = lt.get(k)
        if w is not None:
            total += v.conjugate() * w if conj_small else w.conjugate() * v
    return total


def _check_antisymmetric(C, tol: float = 1e-12) -> np.ndarray:
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"coefficient matrix must be square, got shape {C.shape}")
    if np.abs(C + C.T).max(initial=0.0) > tol:
        raise ValueError("coefficient matrix is not antisymmetric")
    return C


def two_particle_from_C(C, modes: Sequence[Mode]) -> FockState:
    """``sum_ij C_ij a+_i a+_j |0>`` over the given mode list."""
    C = _check_antisymmetric(C)
    if len(modes) != C.shape[0]:
        raise ValueError("mode list length does not match the coefficient matrix")
    if len(set(modes)) != len(modes):
        raise GridCollisionError("mode list contains duplicate modes")
    out: dict[tuple[Mode, ...], complex] = {}
    for i, mi in enumerate(modes):
        for j, mj in enumerate(modes):
            if i == j or C[i, j] == 0:
                continue
            key, sign = (mi, mj), 1.0
            if mj < mi:
                key, sign = (mj, mi), -1.0
            out[key] = out.get(key, 0.0) + sign * C[i, j]
    return FockState(out)


def C_from_two_particle(state: FockState, modes: Sequence[Mode]) -> np.ndarray:
    """Inverse of :func:`two_particle_from_C` on a two-particle state."""
    index = {m: i for i, m in enumerate(modes)}
    C = np.zeros((len(modes), len(modes)), dtype=complex)
    for k, amp in state.items():
        if len(k) != 2:
            raise WignerBellError("state is not in the two-particle sector")
        i, j = index[k[0]], index[k[1]]
        C[i, j] += amp / 2
        C[j, i] -= amp / 2
    return C


MassSpec = float | Mapping[int, float] | Callable[[int], float]


def _mass_lookup(mass_of: MassSpec) -> Callable[[int], float]:
    if callable(mass_of):
        fn = mass_of
    elif isinstance(mass_of, Mapping):
        fn = mass_of.__getitem__
    else:
        value = float(mass_of)
        fn = lambda _n: value  # noqa: E731

    def checked(n: int) -> float:
        m = float(fn(n))
        if not m > 0:
            raise InvalidMassError(f"species {n} has non-positive mass {m}")
        return m

    return checked


def lorentz_transform_state(L, state: FockState, mass_of: MassSpec, max_particles: int = MAX_PARTICLES) -> FockState:
    """``U(Lambda)|state>`` with ``a+(p,s,n) -> sum_s' D_{s's}(W) a+(Lambda p, s', n)``."""
    L = np.asarray(L, dtype=float)
    mass = _mass_lookup(mass_of)
    cache: dict[tuple, tuple[np.ndarray, tuple[Mode, Mode]]] = {}
    landed: dict[tuple, tuple] = {}

    def image(mode: Mode):
        k = (mode.key[0], mode.species)
        hit = cache.get(k)
        if hit is None:
            m = mass(mode.species)
            p = on_shell(mode.momentum, m)
            D = wigner_finite(L, p, m).su2
            new_p = transform_momentum(L, p, m)[1:]
            up, down = mode_pair(new_p, mode.species, mode.step)
            prev = landed.setdefault(up.key, k)
            if prev != k:
                raise GridCollisionError(
                    f"momenta {prev[0]} and {k[0]} (grid units) map to the same cell; refine the grid step"
                )
            hit = cache[k] = (D, (up, down))
        return hit

    out = FockState()
    for modes, amp in state.items():
        if len(modes) > max_particles:
            raise WignerBellError(f"term with {len(modes)} particles exceeds the limit of {max_particles}")
        term = FockState({(): amp})
        for mode in reversed(modes):
            D, targets = image(mode)
            term = create(term, targets[0]) * D[0, mode.spin] + create(term, targets[1]) * D[1, mode.spin]
        out = out + term
    return out


def _cluster_keys(states: Sequence[FockState], tol: float) -> dict[tuple, int]:
    """Assign nearby exact momenta (max-norm within ``tol``) a shared label."""
    reps: list[np.ndarray] = []
    labels: dict[tuple, int] = {}
    for s in states:
        for modes in s.terms:
            for m in modes:
                if m.key[0] in labels:
                    continue
                p = np.asarray(m.momentum)
                for idx, r in enumerate(reps):
                    if np.abs(r - p).max() <= tol:
                        labels[m.key[0]] = idx
                        break
                else:
                    labels[m.key[0]] = len(reps)
                    reps.append(p)
    return labels


def state_distance(a: FockState, b: FockState, p_tol: float = 1e-8) -> float:
    """``|a - b|`` after identifying momenta that agree within ``p_tol``.

    Useful when two states were produced along different arithmetic routes and
    their momenta differ by rounding noise that may straddle a grid cell.
    """
    labels = _cluster_keys([a, b], p_tol)
    sign_cache = {}

    def relabel(s: FockState) -> dict:
        out: dict[tuple, complex] = {}
        for modes, amp in s.items():
            keys = [(labels[m.key[0]], m.spin, m.species) for m in modes]
            order = sorted(range(len(keys)), key=keys.__getitem__)
            sign = sign_cache.get(tuple(order))
            if sign is None:
                sign = sign_cache[tuple(order)] = permutation_sign(order)
            k = tuple(keys[i] for i in order)
            out[k] = out.get(k, 0.0) + sign * amp
        return out

    da, db = relabel(a), relabel(b)
    diff = [da.get(k, 0.0) - db.get(k, 0.0) for k in set(da) | set(db)]
    return float(np.sqrt(np.sum(np.abs(np.asarray(diff, dtype=complex)) ** 2)))


def permutation_sign(order: Sequence[int]) -> int:
    order = list(order)
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def to_document(state: FockState) -> list[dict]:
    return [
        {
            "modes": [{"p": list(m.momentum), "spin": m.spin_symbol, "species": m.species} for m in modes],
            "amp": [amp.real, amp.imag],
        }
        for modes, amp in state.items()
    ]


def from_document(doc: list[dict], step: float = DEFAULT_STEP) -> FockState:
    out = FockState()
    for term in doc:
        modes = [Mode(d["p"], d["spin"], d.get("species", 0), step) for d in term["modes"]]
        if len(set(modes)) != len(modes):
            raise GridCollisionError("term lists the same mode twice")
        re, im = term["amp"]
        out = out + FockState.basis(modes, complex(re, im))
    return out


def fock_from_bell(b, step: float = DEFAULT_STEP) -> FockState:
    """``sum_mu C_mu |B^mu(p1, p2)>`` built from creation operators on the vacuum."""
    from wignerbell.bellstate import spin_matrix_from_amplitudes

    f = spin_matrix_from_amplitudes(b.amplitudes)
    out = FockState()
    for s1 in (0, 1):
        for s2 in (0, 1):
            m1 = Mode(b.p1[1:], s1, b.species[0], step)
            m2 = Mode(b.p2[1:], s2, b.species[1], step)
            if m1 == m2:
                continue
            out = out + FockState.basis([m1, m2], f[s1, s2])
    return out


def bell_amplitudes_from_fock(state: FockState, p1, p2, species=(0, 0), step: float = DEFAULT_STEP) -> np.ndarray:
    """Read ``C_mu`` off a two-particle state at momenta ``p1, p2`` (3- or 4-vectors)."""
    from wignerbell.bellstate import amplitudes_from_spin_matrix

    p1 = np.asarray(p1, dtype=float)[-3:]
    p2 = np.asarray(p2, dtype=float)[-3:]
    f = np.zeros((2, 2), dtype=complex)
    for s1 in (0, 1):
        for s2 in (0, 1):
            probe = FockState.basis([Mode(p1, s1, species[0], step), Mode(p2, s2, species[1], step)])
            f[s1, s2] = inner_product(probe, state)
    return amplitudes_from_spin_matrix(f)
