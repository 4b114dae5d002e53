"""
Noisy trajectories and the hardware time budget.

Two error sources are modelled on pure single-excitation trajectories:

* pulse-angle jitter: every cavity pass uses ``theta ~ Normal(pi/4, sigma**2)``,
  drawn independently per pass;
* radiative decay: after each round every atom undergoes an amplitude-damping
  step with ``p = 1 - exp(-pass_duration / T_r)``. Atom ``k`` emits with
  probability ``p * |c_k|**2``; an emission removes the only excitation and
  the trajectory is counted as failed. The no-emission branch scales every
  one-excitation amplitude by the same ``sqrt(1 - p)``, so after
  renormalization the state is unchanged.

Since at most one atom is excited, the per-round survival probability is
exactly ``1 - p`` and ``K`` rounds survive with ``(1 - p)**K``.

Seeds: an ensemble seeded with ``s`` derives one stream per noise source
(jitter, decay, reduction measurements) from ``SeedSequence(s).spawn(3)``.
Each stream is consumed as a row-major block, one row per trajectory, so
trajectory ``i`` always sees row ``i`` whatever the ensemble size or chunking,
and switching one noise source on or off leaves the others' draws untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .pair_interaction import PI_4, InteractionParams
from .protocol import Schedule, rounds_for
from .state_core import SingleExcitationState, w_class_fidelity
from .subspace_engine import MAX_AMPLITUDES, rotate_pairs_inplace

DEFAULT_T_R = 3e-2
NOMINAL_PROCESS_TIME = 1e-3

SeedLike = Union[None, int, np.random.SeedSequence]


@dataclass(frozen=True)
class NoiseConfig:
    theta_sigma: float = 0.0
    T_r: float = DEFAULT_T_R
    decay_enabled: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.theta_sigma >= 0:
            raise ValueError(f"theta_sigma must be >= 0, got {self.theta_sigma}")
        if not self.T_r > 0:
            raise ValueError(f"T_r must be > 0, got {self.T_r}")

    @property
    def is_noiseless(self) -> bool:
        return self.theta_sigma == 0 and not self.decay_enabled


@dataclass(frozen=True)
class TrajectoryOutcome:
    state: Optional[SingleExcitationState]
    decayed: bool
    fidelity_sample: float
    decay_round: Optional[int] = None
    reduction_failed: bool = False


def decay_probability(duration: float, T_r: float) -> float:
    """Probability that an excited atom emits within ``duration``."""
    return -math.expm1(-duration / T_r)


def survival_probability(schedule: Schedule, noise: NoiseConfig) -> float:
    """Closed-form probability that a trajectory keeps its excitation."""
    if not noise.decay_enabled:
        return 1.0
    p = decay_probability(schedule.pass_duration, noise.T_r)
    return (1.0 - p) ** schedule.K


def _streams(seed: SeedLike):
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(c) for c in ss.spawn(3)]


def _run_batch(schedule: Schedule, noise: NoiseConfig, rows: int, streams, cap: int):
    """Propagate ``rows`` trajectories at once.

    Returns ``(amps, decayed, decay_round, reduction_failed)``; ``amps`` holds
    the final registers (after any reduction, ``target_n`` columns).
    """
    jitter_rng, decay_rng, measure_rng = streams
    size = schedule.register_size
    if size > cap:
        raise MemoryError(f"{size} amplitudes exceeds the cap of {cap}")
    n_passes, K = schedule.n_passes, schedule.K
    z = jitter_rng.standard_normal((rows, n_passes)) if noise.theta_sigma > 0 else None
    u_decay = decay_rng.random((rows, K)) if noise.decay_enabled else None
    u_meas = measure_rng.random((rows, schedule.reduction_count)) if schedule.reduction_count else None
    p = decay_probability(schedule.pass_duration, noise.T_r)

    amps = np.zeros((rows, size), dtype=np.complex128)
    amps[:, 0] = 1.0
    decayed = np.zeros(rows, dtype=bool)
    decay_round = np.full(rows, -1)
    col = 0
    for r, plan in enumerate(schedule.rounds):
        i_idx = np.array([q.i for q in plan], dtype=np.intp)
        j_idx = np.array([q.j for q in plan], dtype=np.intp)
        thetas = np.array([q.theta for q in plan], dtype=float)
        if z is not None:
            thetas = schedule.theta_per_pass + noise.theta_sigma * z[:, col:col + len(plan)]
        col += len(plan)
        rotate_pairs_inplace(amps, i_idx, j_idx, thetas)
        if u_decay is not None:
            # atom k emits with p |c_k|^2; summed over atoms this is p * norm^2
            emit = p * np.sum(np.abs(amps) ** 2, axis=1)
            hit = ~decayed & (u_decay[:, r] < emit)
            decay_round[hit] = r
            decayed |= hit

    failed = np.zeros(rows, dtype=bool)
    for m in range(schedule.reduction_count):
        last = size - 1 - m
        p_exc = np.abs(amps[:, last]) ** 2 / np.sum(np.abs(amps[:, : last + 1]) ** 2, axis=1)
        failed |= u_meas[:, m] < p_exc
    if schedule.reduction_count:
        amps = amps[:, : schedule.target_n]
        norms = np.linalg.norm(amps, axis=1, keepdims=True)
        amps /= np.where(norms > 0, norms, 1.0)
    return amps, decayed, decay_round, failed & ~decayed


def _fidelities(amps: np.ndarray, dead: np.ndarray) -> np.ndarray:
    n = amps.shape[1]
    f = np.minimum(np.sum(np.abs(amps), axis=1) ** 2 / n, 1.0)
    f[dead] = 0.0
    return f


def sample_noisy_run(schedule: Schedule, noise: NoiseConfig, seed: SeedLike = None,
                     cap: int = MAX_AMPLITUDES) -> TrajectoryOutcome:
    """Run one noisy trajectory of ``schedule``.

    ``seed`` defaults to ``noise.seed``; the trajectory equals trajectory 0 of
    an ensemble with the same seed. With all noise off the amplitudes are
    bitwise identical to ``protocol.run_ideal``.
    """
    streams = _streams(noise.seed if seed is None else seed)
    amps, decayed, decay_round, failed = _run_batch(schedule, noise, 1, streams, cap)
    if decayed[0]:
        return TrajectoryOutcome(None, True, 0.0, decay_round=int(decay_round[0]))
    if failed[0]:
        return TrajectoryOutcome(None, False, 0.0, reduction_failed=True)
    state = SingleExcitationState(amps[0])
    return TrajectoryOutcome(state, False, w_class_fidelity(state))


def sample_fidelities(schedule: Schedule, noise: NoiseConfig, trials: int,
                      chunk_amplitudes: int = 1 << 22, cap: int = MAX_AMPLITUDES):
    """Fidelity sample and decay flag of every trajectory in a seeded ensemble."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    streams = _streams(noise.seed)
    rows = max(1, chunk_amplitudes // schedule.register_size)
    fid = np.empty(trials)
    dec = np.empty(trials, dtype=bool)
    for start in range(0, trials, rows):
        stop = min(trials, start + rows)
        amps, decayed, _, failed = _run_batch(schedule, noise, stop - start, streams, cap)
        fid[start:stop] = _fidelities(amps, decayed | failed)
        dec[start:stop] = decayed
    return fid, dec


def estimate_fidelity(schedule: Schedule, noise: NoiseConfig, trials: int):
    """Mean and standard error of the trajectory fidelity over ``trials`` runs."""
    fid, _ = sample_fidelities(schedule, noise, trials)
    mean = float(fid.mean())
    stderr = float(fid.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


def survival_frequency(schedule: Schedule, noise: NoiseConfig, trials: int) -> float:
    """Fraction of ``trials`` trajectories that never lost their excitation."""
    _, dec = sample_fidelities(schedule, noise, trials)
    return float(np.count_nonzero(~dec)) / trials


@dataclass(frozen=True)
class FeasibilityReport:
    """Time budget of the protocol against the radiative lifetime.

    Two accountings are reported. ``max_rounds`` counts sequential passes of
    duration ``t_pass`` that fit in ``budget * T_r``. ``max_rounds_per_process``
    instead divides the budget by a fixed whole-process time
    (``process_time``, 1 ms by default), i.e. counts how many times a
    complete generation run of that duration fits.
    """

    t_pass: float
    target_n: int
    rounds: int
    total_time: float
    order_time: float
    decay_probability_per_atom: float
    T_r: float
    budget: float
    max_rounds: int
    max_size: int
    process_time: float
    max_rounds_per_process: int
    max_size_per_process: int
    params_echo: InteractionParams


def _fits(budget: float, step: float) -> int:
    # relative slack so that e.g. 0.03 / 0.001 counts as 30, not 29
    return int(math.floor(budget / step * (1.0 + 1e-12)))


def feasibility(params: InteractionParams, target_n: int, T_r: float = DEFAULT_T_R,
                budget: float = 1.0, process_time: float = NOMINAL_PROCESS_TIME) -> FeasibilityReport:
    if target_n < 1:
        raise ValueError(f"target_n must be >= 1, got {target_n}")
    if T_r <= 0 or budget <= 0 or process_time <= 0:
        raise ValueError("T_r, budget and process_time must be positive")
    t_pass = PI_4 / params.lam
    rounds = rounds_for(target_n)
    total = rounds * t_pass
    max_rounds = _fits(budget * T_r, t_pass)
    per_process = _fits(budget * T_r, process_time)
    return FeasibilityReport(
        t_pass=t_pass,
        target_n=int(target_n),
        rounds=rounds,
        total_time=total,
        order_time=math.pi * params.delta / params.g ** 2,
        decay_probability_per_atom=decay_probability(total, T_r),
        T_r=T_r,
        budget=budget,
        max_rounds=max_rounds,
        max_size=2 ** max_rounds,
        process_time=process_time,
        max_rounds_per_process=per_process,
        max_size_per_process=2 ** per_process,
        params_echo=params,
    )
