"""
Two atoms crossing a detuned single-mode cavity.

Three levels of description are provided:

* ``effective_propagator`` -- closed-form evolution under the vacuum
  effective Hamiltonian ``lambda * (sum_j |e_j><e_j| + S1+ S2- + S1- S2+)``;
* ``photon_effective_hamiltonian`` -- the effective Hamiltonian before the
  vacuum assumption, acting on atom (x) atom (x) photon ladder;
* ``exact_propagator`` -- the full detuned Jaynes-Cummings coupling
  ``g * sum_j (exp(-i delta t) a^dag S_j^- + exp(i delta t) a S_j^+)``,
  integrated exactly in a frame where it is time independent.

Two-atom matrices use the ordered basis ``|gg>, |ge>, |eg>, |ee>``. Dense
atom-photon matrices use atom 1 (x) atom 2 (x) photon, photon index last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .state_core import NumericalGuardError

DEFAULT_N_MAX = 5
PI_4 = math.pi / 4
TRUNCATION_TOL = 1e-6
UNITARITY_TOL = 1e-10


class TruncationError(NumericalGuardError):
    """Population reached the top rung of the truncated photon ladder."""


@dataclass(frozen=True)
class InteractionParams:
    """Physical knobs of one cavity pass.

    Parameters
    ----------
    g : float
        Atom-cavity coupling, rad/s.
    delta : float
        Detuning (atomic minus cavity frequency), rad/s.
    theta : float
        Pulse angle ``lambda * t`` in rad; ``pi/4`` is the 50/50 sharing pass.
    """

    g: float
    delta: float
    theta: float = PI_4

    def __post_init__(self):
        if not (self.g > 0 and math.isfinite(self.g)):
            raise ValueError(f"g must be positive, got {self.g}")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not (self.theta >= 0 and math.isfinite(self.theta)):
            raise ValueError(f"theta must be finite and >= 0, got {self.theta}")

    @property
    def lam(self) -> float:
        """Effective atom-atom coupling ``g**2 / delta`` (rad/s)."""
        return self.g * self.g / self.delta

    @property
    def t(self) -> float:
        """Pass duration in seconds, ``theta / lambda``."""
        return self.theta / self.lam

    @property
    def ratio(self) -> float:
        return self.delta / self.g

    @classmethod
    def from_duration(cls, g: float, delta: float, t: float) -> "InteractionParams":
        if t < 0:
            raise ValueError(f"duration must be >= 0, got {t}")
        return cls(g, delta, theta=(g * g / delta) * t)

    @classmethod
    def from_hz(cls, g_hz: float, delta_over_g: float, theta: float = PI_4) -> "InteractionParams":
        """Build from an ordinary-frequency coupling; ``g = 2*pi*g_hz`` rad/s."""
        g = 2.0 * math.pi * g_hz
        return cls(g, delta_over_g * g, theta)


def effective_propagator(theta: float) -> np.ndarray:
    """4x4 evolution of two atoms after a detuned pass of pulse angle ``theta``.

    ``|gg>`` is untouched, ``|ee>`` picks up ``exp(-2i theta)``, and the
    one-excitation pair rotates as
    ``exp(-i theta) * (cos(theta) * 1 - i sin(theta) * X)``.
    All phases are kept; they become relative phases once the pair is part
    of a larger register.
    """
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    ph = np.exp(-1j * theta)
    c, s = math.cos(theta), math.sin(theta)
    u = np.zeros((4, 4), dtype=np.complex128)
    u[0, 0] = 1.0
    u[1, 1] = u[2, 2] = ph * c
    u[1, 2] = u[2, 1] = -1j * ph * s
    u[3, 3] = ph * ph
    return u


def vacuum_effective_hamiltonian() -> np.ndarray:
    """Vacuum effective Hamiltonian on the two atoms, in units of lambda."""
    return np.array(
        [[0, 0, 0, 0],
         [0, 1, 1, 0],
         [0, 1, 1, 0],
         [0, 0, 0, 2]],
        dtype=np.complex128,
    )


def _atom_ops():
    sm = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |g><e|
    proj_e = np.diag([0.0, 1.0]).astype(np.complex128)
    proj_g = np.diag([1.0, 0.0]).astype(np.complex128)
    return sm, proj_e, proj_g


def _ladder_ops(n_max: int):
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    d = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(np.complex128)
    return a, d


def photon_effective_hamiltonian(n_max: int = DEFAULT_N_MAX) -> np.ndarray:
    """Effective Hamiltonian with the cavity mode kept, in units of lambda.

    ``sum_j (|e_j><e_j| a a^dag - |g_j><g_j| a^dag a) + S1+ S2- + S1- S2+``
    on atom (x) atom (x) photon ladder. ``a a^dag`` is taken as
    ``a^dag a + 1`` so the top rung is not distorted by truncation.
    """
    sm, proj_e, proj_g = _atom_ops()
    a, d = _ladder_ops(n_max)
    i2, ip = np.eye(2), np.eye(d)
    num = np.diag(np.arange(d, dtype=float))
    aad = num + ip
    h = (
        np.kron(np.kron(proj_e, i2), aad)
        + np.kron(np.kron(i2, proj_e), aad)
        - np.kron(np.kron(proj_g, i2), num)
        - np.kron(np.kron(i2, proj_g), num)
    )
    hop = np.kron(np.kron(sm.conj().T, sm), ip)
    return (h + hop + hop.conj().T).astype(np.complex128)


def vacuum_indices(n_max: int) -> np.ndarray:
    """Dense indices of ``|gg,0>, |ge,0>, |eg,0>, |ee,0>``."""
    return np.arange(4) * (n_max + 1)


def _coupling_terms(n_max: int):
    sm, proj_e, _ = _atom_ops()
    a, d = _ladder_ops(n_max)
    i2, ip = np.eye(2), np.eye(d)
    lower = np.kron(np.kron(sm, i2), ip) + np.kron(np.kron(i2, sm), ip)
    ad = np.kron(np.kron(i2, i2), a.conj().T)
    h_c = ad @ lower
    h_c = h_c + h_c.conj().T
    excitations = np.diag(np.kron(np.kron(proj_e, i2), ip) + np.kron(np.kron(i2, proj_e), ip)).real
    return h_c, excitations


def exact_propagator(params: InteractionParams, n_max: int = DEFAULT_N_MAX,
                     check_truncation: bool = True) -> np.ndarray:
    """Interaction-picture propagator of the full detuned atom-cavity coupling.

    With ``A = delta * sum_j |e_j><e_j|`` and
    ``H_c = g * sum_j (a^dag S_j^- + a S_j^+)`` the time-dependent coupling
    equals ``exp(iAt) H_c exp(-iAt)``, hence
    ``U_I(t) = exp(iAt) exp(-i (A + H_c) t)``. The exponential is taken
    through an eigendecomposition of the Hermitian generator, so no time
    ordering or step-size error enters.

    Raises
    ------
    TruncationError
        If any vacuum-photon input puts more than 1e-6 population on the top
        ladder rung.
    """
    h_c, excitations = _coupling_terms(n_max)
    t = params.t
    gen = params.delta * np.diag(excitations) + params.g * h_c
    w, v = np.linalg.eigh(gen)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    u = np.exp(1j * params.delta * excitations * t)[:, None] * u

    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > UNITARITY_TOL:
        raise NumericalGuardError(f"exact propagator not unitary: max deviation {err:.3g}")
    if check_truncation:
        d = n_max + 1
        cols = u[:, vacuum_indices(n_max)]
        top = np.abs(cols.reshape(4, d, 4)[:, n_max, :]) ** 2
        worst = float(top.sum(axis=0).max())
        if worst > TRUNCATION_TOL:
            raise TruncationError(
                f"population {worst:.3g} on the top photon rung n={n_max}; raise n_max"
            )
    return u


def excitation_number(n_max: int) -> np.ndarray:
    """Diagonal of the total excitation number (atoms + photons) on the dense space."""
    _, excitations = _coupling_terms(n_max)
    photons = np.tile(np.arange(n_max + 1, dtype=float), 4)
    return excitations + photons


@dataclass(frozen=True)
class ApproximationReport:
    """How far the effective pass is from the exact detuned dynamics.

    ``infidelity`` is ``1 - |<ideal, 0|out>|**2`` with the ideal atomic
    output taken from ``effective_propagator`` and the photon in vacuum;
    it includes population lost to photon states.
    ``conditional_infidelity`` renormalizes the vacuum-sector output first,
    so it measures only the coherent error. All three are worst cases over
    the four atomic basis inputs.
    """

    infidelity: float
    photon_leakage: float
    ratio: float
    conditional_infidelity: float
    per_input_infidelity: tuple = field(default=())
    per_input_leakage: tuple = field(default=())


def compare_effective_exact(params: InteractionParams, n_max: int = DEFAULT_N_MAX) -> ApproximationReport:
    u_exact = exact_propagator(params, n_max)
    u_eff = effective_propagator(params.theta)
    d = n_max + 1
    vac = vacuum_indices(n_max)

    infid, leak, cond = [], [], []
    for b in range(4):
        out = u_exact[:, vac[b]].reshape(4, d)
        in_vacuum = out[:, 0]
        p_vac = float(np.vdot(in_vacuum, in_vacuum).real)
        overlap = abs(np.vdot(u_eff[:, b], in_vacuum)) ** 2
        infid.append(max(0.0, 1.0 - overlap))
        leak.append(max(0.0, 1.0 - p_vac))
        cond.append(max(0.0, 1.0 - overlap / p_vac))
    return ApproximationReport(
        infidelity=max(infid),
        photon_leakage=max(leak),
        ratio=params.ratio,
        conditional_infidelity=max(cond),
        per_input_infidelity=tuple(infid),
        per_input_leakage=tuple(leak),
    )
