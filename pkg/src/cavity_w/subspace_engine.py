"""
Cascade simulation on the single-excitation manifold.

A register of ``n`` atoms holding one excitation is stored as ``n`` complex
amplitudes. A detuned cavity pass on atoms ``i`` and ``j`` then only mixes
``c_i`` and ``c_j``:

    c_i <- exp(-i theta) * (cos(theta) c_i - i sin(theta) c_j)
    c_j <- exp(-i theta) * (cos(theta) c_j - i sin(theta) c_i)

and every other amplitude is left alone (its two-atom component is ``|gg>``).

Doubling appends ``n`` ground-state ancillas at indices ``n .. 2n-1`` and
pairs atom ``k`` with ancilla ``n + k``. Starting from one excited atom,
``K`` doublings give ``2**K`` atoms; atom ``k`` of the result descended
through the ancilla branch in round ``r`` iff bit ``r`` of ``k`` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .pair_interaction import PI_4, effective_propagator
from .state_core import (
    SingleExcitationState,
    apply_two_atom_unitary,
    project_single_excitation,
    to_dense,
)

MAX_AMPLITUDES = 1 << 24


@dataclass(frozen=True)
class PairRotation:
    i: int
    j: int
    theta: float = PI_4

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError(f"pair rotation needs distinct atoms, got ({self.i}, {self.j})")
        if self.i < 0 or self.j < 0:
            raise IndexError(f"negative atom index in ({self.i}, {self.j})")


@dataclass(frozen=True)
class RoundPlan:
    """A set of cavity passes that run in parallel; no atom appears twice."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(self.pairs)
        seen = set()
        for p in pairs:
            if p.i in seen or p.j in seen:
                raise ValueError(f"atom reused within a round: ({p.i}, {p.j})")
            seen.update((p.i, p.j))
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def max_index(self) -> int:
        return max((max(p.i, p.j) for p in self.pairs), default=-1)


def doubling_plan(n: int, theta: float = PI_4) -> RoundPlan:
    """Pair atom ``k`` with ancilla ``n + k`` for every ``k < n``."""
    return RoundPlan(tuple(PairRotation(k, n + k, theta) for k in range(n)))


def rotate_pairs_inplace(amps: np.ndarray, i_idx, j_idx, theta) -> None:
    """Apply pair rotations to ``amps`` in place.

    ``i_idx`` and ``j_idx`` must together be free of repeats. ``theta`` may be
    a scalar or one angle per pair. Atoms live on the last axis, so a 2-d
    ``amps`` is a batch of registers (``theta`` then broadcasts per row).
    """
    i_idx = np.asarray(i_idx, dtype=np.intp)
    j_idx = np.asarray(j_idx, dtype=np.intp)
    theta = np.asarray(theta, dtype=float)
    ph = np.exp(-1j * theta)
    c = ph * np.cos(theta)
    s = -1j * ph * np.sin(theta)
    ci = amps[..., i_idx]
    cj = amps[..., j_idx]
    amps[..., i_idx] = c * ci + s * cj
    amps[..., j_idx] = c * cj + s * ci


def apply_pair(state: SingleExcitationState, rot: PairRotation) -> SingleExcitationState:
    if max(rot.i, rot.j) >= state.n:
        raise IndexError(f"pair ({rot.i}, {rot.j}) out of range for {state.n} atoms")
    amps = state.amps.copy()
    rotate_pairs_inplace(amps, [rot.i], [rot.j], rot.theta)
    return SingleExcitationState(amps)


def apply_round(state: SingleExcitationState, plan: RoundPlan) -> SingleExcitationState:
    if plan.max_index >= state.n:
        raise IndexError(f"round touches atom {plan.max_index}, register has {state.n}")
    amps = state.amps.copy()
    if len(plan):
        i_idx, j_idx, thetas = zip(*((p.i, p.j, p.theta) for p in plan))
        rotate_pairs_inplace(amps, i_idx, j_idx, thetas)
    return SingleExcitationState(amps)


def _double_amps(amps: np.ndarray, theta, cap: int) -> np.ndarray:
    n = amps.size
    if 2 * n > cap:
        raise MemoryError(f"doubling to {2 * n} amplitudes exceeds the cap of {cap}")
    out = np.zeros(2 * n, dtype=np.complex128)
    out[:n] = amps
    k = np.arange(n)
    rotate_pairs_inplace(out, k, k + n, theta)
    return out


def expand_double(state: SingleExcitationState, theta: float = PI_4,
                  cap: int = MAX_AMPLITUDES) -> SingleExcitationState:
    """Double the register: append ``n`` ground ancillas and pair ``k`` with ``n + k``."""
    return SingleExcitationState(_double_amps(state.amps, theta, cap))


def run_cascade(rounds: int, theta: float = PI_4, cap: int = MAX_AMPLITUDES) -> SingleExcitationState:
    """Start from one excited atom and double ``rounds`` times."""
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    if (1 << rounds) > cap:
        raise MemoryError(f"2**{rounds} amplitudes exceeds the cap of {cap}")
    amps = np.ones(1, dtype=np.complex128)
    for _ in range(rounds):
        amps = _double_amps(amps, theta, cap)
    return SingleExcitationState(amps)


def analytic_amplitude(k: int, rounds: int, theta: float = PI_4) -> complex:
    """Closed-form amplitude of atom ``k`` after ``rounds`` doublings of one excitation.

    Each round multiplies the amplitude by ``exp(-i theta) cos(theta)`` if the
    atom stayed on the original branch and by ``-i exp(-i theta) sin(theta)``
    if it is that round's ancilla, so with ``p = popcount(k)``::

        c_k = exp(-i K theta) * cos(theta)**(K - p) * (-i sin(theta))**p

    At ``theta = pi/4`` this is ``2**(-K/2) * exp(-i K pi/4) * (-i)**p``.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    if not 0 <= k < (1 << rounds):
        raise IndexError(f"atom {k} out of range for 2**{rounds} atoms")
    p = bin(k).count("1")
    # (-i)**p cycles with period 4; exact powers avoid rounding in the phase
    minus_i_pow = (1, -1j, -1, 1j)[p % 4]
    mag = math.cos(theta) ** (rounds - p) * math.sin(theta) ** p
    return complex(np.exp(-1j * rounds * theta) * minus_i_pow * mag)


def analytic_amplitudes(rounds: int, theta: float = PI_4) -> np.ndarray:
    """Vectorized ``analytic_amplitude`` for every atom of the ``2**rounds`` register."""
    k = np.arange(1 << rounds, dtype=np.uint64)
    p = np.zeros(k.shape, dtype=np.int64)
    for r in range(rounds):
        p += ((k >> np.uint64(r)) & np.uint64(1)).astype(np.int64)
    minus_i_pow = np.array([1, -1j, -1, 1j])[p % 4]
    mag = math.cos(theta) ** (rounds - p) * math.sin(theta) ** p.astype(float)
    return np.exp(-1j * rounds * theta) * minus_i_pow * mag


def run_rounds_dense(initial: SingleExcitationState, rounds: Iterable[RoundPlan],
                     n_atoms: int) -> SingleExcitationState:
    """Reference path: the same rounds on the full ``2**n`` state vector.

    The register is padded with ground atoms up to ``n_atoms`` and every
    pass is the 4x4 two-atom propagator contracted into the dense vector.
    Meant for small registers only.
    """
    amps = np.zeros(n_atoms, dtype=np.complex128)
    amps[: initial.n] = initial.amps
    dense = to_dense(SingleExcitationState(amps))
    for plan in rounds:
        for p in plan:
            dense = apply_two_atom_unitary(dense, p.i, p.j, effective_propagator(p.theta))
    return project_single_excitation(dense)


def ancilla_first_order(rounds: int) -> list:
    """Permutation that lists each last-round ancilla just before its partner.

    For two rounds the storage order is ``(a2, b2, a1, b1)`` (EPR pair, then
    their ancillas) and this returns ``[2, 0, 3, 1]``, i.e. the
    ``(a1, a2, b1, b2)`` labelling of the four-atom setup. Use with
    ``state_core.permute``.
    """
    if rounds < 1:
        return [0]
    n = 1 << (rounds - 1)
    order = []
    for k in range(n):
        order.extend((n + k, k))
    return order
