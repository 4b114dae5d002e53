"""
State representations and metrics.

Basis conventions, used everywhere in the package:

* each atom is a two-level system with basis order ``|g>`` (index 0) then
  ``|e>`` (index 1);
* atoms are laid out left to right in their declared order, the leftmost
  atom being the most significant digit of a dense index;
* a photon ladder, when present, is the last tensor factor.

With ``n`` atoms, the basis state with only atom ``k`` excited therefore sits
at dense index ``2**(n - 1 - k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

NORM_TOL = 1e-9
DENSE_ATOM_CAP = 20


class NumericalGuardError(ArithmeticError):
    """A numerical sanity check (normalization, truncation, unitarity) tripped."""


class NormalizationError(NumericalGuardError):
    pass


def _as_amps(amps) -> np.ndarray:
    arr = np.array(amps, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError("amplitudes must be a 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise NormalizationError("amplitudes contain NaN or Inf")
    arr.setflags(write=False)
    return arr


def _check_norm(amps: np.ndarray, tol: float) -> None:
    norm2 = float(np.vdot(amps, amps).real)
    if abs(norm2 - 1.0) > tol:
        raise NormalizationError(f"state norm^2 = {norm2!r}, expected 1 within {tol:g}")


@dataclass(frozen=True, eq=False)
class SingleExcitationState:
    """Amplitudes over the one-excitation manifold of ``n`` atoms.

    ``amps[k]`` is the coefficient of the basis state in which atom ``k`` is
    excited and every other atom is in its ground state. The array is
    read-only once the state is built.
    """

    amps: np.ndarray

    def __post_init__(self):
        amps = _as_amps(self.amps)
        if amps.size < 1:
            raise ValueError("a single-excitation state needs at least one atom")
        _check_norm(amps, NORM_TOL)
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return int(self.amps.size)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.amps)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"SingleExcitationState(n={self.n})"


@dataclass(frozen=True, eq=False)
class PureStateDense:
    """Dense state vector over a tensor product of subsystems.

    ``dims`` lists the subsystem dimensions in tensor order (atoms have
    dimension 2, a photon ladder truncated at ``n_max`` photons has
    dimension ``n_max + 1``). ``amps`` is the flattened row-major vector.
    """

    dims: tuple
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid subsystem dimensions {dims}")
        amps = _as_amps(self.amps)
        if amps.size != int(np.prod(dims)):
            raise ValueError(f"{amps.size} amplitudes do not match dims {dims}")
        _check_norm(amps, NORM_TOL)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    def __repr__(self):
        return f"PureStateDense(dims={self.dims})"


State = Union[SingleExcitationState, PureStateDense]


def _shape_of(s: State):
    if isinstance(s, SingleExcitationState):
        return ("single", s.n)
    if isinstance(s, PureStateDense):
        return ("dense", s.dims)
    raise TypeError(f"not a state: {type(s).__name__}")


def inner_product(a: State, b: State) -> complex:
    """Return ``<a|b>``, conjugating ``a``."""
    if _shape_of(a) != _shape_of(b):
        raise ValueError(f"dimension mismatch: {_shape_of(a)} vs {_shape_of(b)}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: State, b: State) -> float:
    """Pure-state fidelity ``|<a|b>|**2``; blind to global phases."""
    f = abs(inner_product(a, b)) ** 2
    return float(min(f, 1.0))


def w_class_fidelity(s: SingleExcitationState) -> float:
    """Fidelity with the canonical W state after the best per-atom phase fix.

    Equals ``(sum_k |c_k| / sqrt(n))**2`` and reaches 1 exactly when every
    amplitude has magnitude ``1/sqrt(n)``.
    """
    n = s.n
    total = np.sum(np.abs(s.amps))
    return float(min(total * total / n, 1.0))


def canonical_w(n: int) -> SingleExcitationState:
    if n < 1:
        raise ValueError(f"W state needs n >= 1, got {n}")
    return SingleExcitationState(np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128))


def basis_excitation(n: int, k: int) -> SingleExcitationState:
    """Product state with atom ``k`` excited and the other ``n - 1`` atoms ground."""
    if not 0 <= k < n:
        raise IndexError(f"atom {k} out of range for {n} atoms")
    amps = np.zeros(n, dtype=np.complex128)
    amps[k] = 1.0
    return SingleExcitationState(amps)


def excitation_index(n: int, k: int) -> int:
    """Dense index of the basis state with only atom ``k`` (of ``n``) excited."""
    return 1 << (n - 1 - k)


def to_dense(s: SingleExcitationState, cap: int = DENSE_ATOM_CAP) -> PureStateDense:
    n = s.n
    if n > cap:
        raise ValueError(f"{n} atoms exceeds the dense-size cap of {cap}")
    vec = np.zeros(1 << n, dtype=np.complex128)
    idx = [excitation_index(n, k) for k in range(n)]
    vec[idx] = s.amps
    return PureStateDense((2,) * n, vec)


def project_single_excitation(d: PureStateDense, renormalize: bool = False) -> SingleExcitationState:
    """Read the one-excitation amplitudes back out of an all-atom dense state.

    Raises NormalizationError if the dense state carries weight outside the
    single-excitation sector, unless ``renormalize`` is set.
    """
    if any(dim != 2 for dim in d.dims):
        raise ValueError("projection needs an atoms-only dense state")
    n = len(d.dims)
    amps = d.amps[[excitation_index(n, k) for k in range(n)]].copy()
    if renormalize:
        amps = amps / np.linalg.norm(amps)
    return SingleExcitationState(amps)


def apply_two_atom_unitary(d: PureStateDense, i: int, j: int, u: np.ndarray) -> PureStateDense:
    """Apply a 4x4 operator to atoms ``i`` and ``j`` of a dense state.

    ``u`` is written in the ordered basis ``|g_i g_j>, |g_i e_j>, |e_i g_j>,
    |e_i e_j>``.
    """
    dims = d.dims
    if i == j or not (0 <= i < len(dims) and 0 <= j < len(dims)):
        raise IndexError(f"invalid atom pair ({i}, {j})")
    if dims[i] != 2 or dims[j] != 2:
        raise ValueError("both targets must be two-level atoms")
    psi = d.amps.reshape(dims)
    psi = np.moveaxis(psi, (i, j), (0, 1))
    rest = psi.shape[2:]
    out = (np.asarray(u) @ psi.reshape(4, -1)).reshape((2, 2) + rest)
    out = np.moveaxis(out, (0, 1), (i, j))
    return PureStateDense(dims, out.reshape(-1))


def fix_global_phase(amps, reference_phase: float = 0.0, atol: float = 1e-15) -> np.ndarray:
    """Rotate ``amps`` so the first nonzero entry has argument ``reference_phase``."""
    amps = np.asarray(amps, dtype=np.complex128)
    nz = np.flatnonzero(np.abs(amps) > atol)
    if nz.size == 0:
        return amps.copy()
    lead = amps[nz[0]]
    return amps * (np.exp(1j * reference_phase) * abs(lead) / lead)


def relative_phases(amps) -> np.ndarray:
    """Arguments of ``amps`` relative to the first amplitude, wrapped to (-pi, pi]."""
    amps = np.asarray(amps, dtype=np.complex128)
    rel = np.angle(amps * np.conj(amps[0]))
    # keep +pi rather than -pi so a sign flip reads as pi
    rel[np.isclose(rel, -np.pi, atol=1e-12)] = np.pi
    return rel


def permute(s: SingleExcitationState, order: Sequence[int]) -> SingleExcitationState:
    """Reorder atoms: output atom ``m`` is input atom ``order[m]``."""
    order = np.asarray(order, dtype=np.intp)
    if sorted(order.tolist()) != list(range(s.n)):
        raise ValueError("order must be a permutation of the atom indices")
    return SingleExcitationState(s.amps[order])
