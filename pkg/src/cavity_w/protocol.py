"""
The generation protocol: EPR pair, doubling rounds, measurement reduction.

Round 0 sends the excited atom and one ground atom through a cavity and
leaves them in a W-type Bell pair; every later round doubles the register.
Targets that are not powers of two are reached by building the next power
of two and measuring surplus atoms in the ``{|g>, |e>}`` basis, keeping the
run only if every outcome is ``|g>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .pair_interaction import PI_4, InteractionParams
from .state_core import SingleExcitationState, w_class_fidelity
from .subspace_engine import MAX_AMPLITUDES, apply_round, doubling_plan

GROUND, EXCITED = "ground", "excited"

RandomSource = Union[None, int, np.random.Generator]


def rounds_for(target_n: int) -> int:
    """Number of doubling rounds needed to reach at least ``target_n`` atoms."""
    return max(0, (int(target_n) - 1).bit_length())


@dataclass(frozen=True)
class Schedule:
    target_n: int
    rounds: tuple
    theta_per_pass: float
    pass_duration: float
    params: InteractionParams

    @property
    def K(self) -> int:
        return len(self.rounds)

    @property
    def register_size(self) -> int:
        return 1 << self.K

    @property
    def reduction_count(self) -> int:
        return self.register_size - self.target_n

    @property
    def n_passes(self) -> int:
        return sum(len(r) for r in self.rounds)


@dataclass(frozen=True)
class MeasurementRecord:
    measured_atom: int
    outcome: str
    probability_of_outcome: float


@dataclass
class ProtocolResult:
    """Outcome of one protocol run.

    When a reduction measurement finds the excitation, ``succeeded`` is False
    and ``state`` is the register as it was just before that measurement.
    """

    state: SingleExcitationState
    total_time: float
    rounds_executed: int
    reduction_outcomes: list = field(default_factory=list)
    succeeded: bool = True
    seed: Optional[int] = None

    @property
    def w_fidelity(self) -> float:
        return w_class_fidelity(self.state)


def build_schedule(target_n: int, params: InteractionParams) -> Schedule:
    """Plan the cavity passes for a ``target_n``-atom W state.

    Round ``r`` holds ``2**r`` passes pairing atom ``k`` with ``2**r + k``.
    """
    if target_n < 2:
        raise ValueError(f"target_n must be >= 2, got {target_n}")
    if not math.isclose(params.theta, PI_4, rel_tol=0, abs_tol=1e-12):
        raise ValueError(f"schedule passes need theta = pi/4, got {params.theta}")
    K = rounds_for(target_n)
    rounds = tuple(doubling_plan(1 << r, params.theta) for r in range(K))
    return Schedule(
        target_n=int(target_n),
        rounds=rounds,
        theta_per_pass=params.theta,
        pass_duration=params.t,
        params=params,
    )


def _rng(randomness: RandomSource):
    if isinstance(randomness, np.random.Generator):
        return randomness, None
    return np.random.default_rng(randomness), randomness


def run_rounds(schedule: Schedule, cap: int = MAX_AMPLITUDES) -> SingleExcitationState:
    """Run every round of ``schedule`` from one excited atom, without measurement."""
    if schedule.register_size > cap:
        raise MemoryError(f"{schedule.register_size} amplitudes exceeds the cap of {cap}")
    amps = np.zeros(schedule.register_size, dtype=np.complex128)
    amps[0] = 1.0
    state = SingleExcitationState(amps)
    for plan in schedule.rounds:
        state = apply_round(state, plan)
    return state


def run_ideal(schedule: Schedule, randomness: RandomSource = None,
              cap: int = MAX_AMPLITUDES) -> ProtocolResult:
    """Execute the schedule without noise.

    Power-of-two targets are deterministic and consume no randomness. Other
    targets need ``randomness`` (a seed or a Generator) for the reduction
    measurements; the returned result is marked failed if any of them comes
    out excited.
    """
    state = run_rounds(schedule, cap)
    total_time = schedule.K * schedule.pass_duration
    if schedule.reduction_count == 0:
        return ProtocolResult(state, total_time, schedule.K)
    if randomness is None:
        raise ValueError(
            f"target {schedule.target_n} needs {schedule.reduction_count} reduction "
            "measurements; pass a seed or Generator"
        )
    reduced = reduce_to_size(state, schedule.target_n, randomness)
    reduced.total_time = total_time
    reduced.rounds_executed = schedule.K
    return reduced


def measure_atom(state: SingleExcitationState, atom: int, rng: np.random.Generator):
    """Projectively measure one atom in the energy basis.

    Returns ``(record, post_state)``. On a ground outcome the atom is removed
    and the rest renormalized; on an excited outcome the remaining atoms are
    all ground and ``post_state`` is None.
    """
    if not 0 <= atom < state.n:
        raise IndexError(f"atom {atom} out of range for {state.n} atoms")
    p_exc = float(abs(state.amps[atom]) ** 2)
    p_exc = min(max(p_exc, 0.0), 1.0)
    if rng.random() < p_exc:
        return MeasurementRecord(atom, EXCITED, p_exc), None
    rest = np.delete(state.amps, atom)
    rest = rest / np.linalg.norm(rest)
    return MeasurementRecord(atom, GROUND, 1.0 - p_exc), SingleExcitationState(rest)


def reduce_to_size(state: SingleExcitationState, target_n: int,
                   randomness: RandomSource = None) -> ProtocolResult:
    """Measure the highest-index atom until ``target_n`` atoms remain.

    Born probabilities come from the actual state, so the same routine is
    valid for noisy inputs. For an equal-magnitude ``W_m`` the overall
    success probability is ``target_n / m``.
    """
    if target_n > state.n:
        raise ValueError(f"cannot reduce {state.n} atoms to {target_n}")
    if target_n < 1:
        raise ValueError(f"target_n must be >= 1, got {target_n}")
    rng, seed = _rng(randomness)
    records = []
    current = state
    while current.n > target_n:
        rec, post = measure_atom(current, current.n - 1, rng)
        records.append(rec)
        if post is None:
            return ProtocolResult(current, 0.0, 0, records, succeeded=False, seed=seed)
        current = post
    return ProtocolResult(current, 0.0, 0, records, succeeded=True, seed=seed)


def reduction_success_probability(m: int, target_n: int) -> float:
    """Telescoping product ``prod_{s=target_n+1}^{m} (s-1)/s = target_n / m``."""
    return target_n / m
