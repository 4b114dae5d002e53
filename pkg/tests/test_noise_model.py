import itertools
import math

import numpy as np
import pytest

from cavity_w.noise_model import (
    NoiseConfig,
    decay_probability,
    estimate_fidelity,
    feasibility,
    sample_fidelities,
    sample_noisy_run,
    survival_frequency,
    survival_probability,
)
from cavity_w.pair_interaction import InteractionParams
from cavity_w.protocol import build_schedule, run_ideal

PARAMS = InteractionParams.from_hz(24_000, 10)
W4 = build_schedule(4, PARAMS)


def w4_fidelity_closed_form(t0, t1, t2):
    # |amplitudes| of (a2, b2, a1, b1) after passes t0 (EPR), t1 (a2-a1), t2 (b2-b1)
    mags = [abs(math.cos(t0) * math.cos(t1)), abs(math.sin(t0) * math.cos(t2)),
            abs(math.cos(t0) * math.sin(t1)), abs(math.sin(t0) * math.sin(t2))]
    return sum(mags) ** 2 / 4


def w4_mean_fidelity_quadrature(sigma, order=40):
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / w.sum()
    total = 0.0
    for (x0, w0), (x1, w1), (x2, w2) in itertools.product(zip(x, w), repeat=3):
        thetas = [math.pi / 4 + sigma * v for v in (x0, x1, x2)]
        total += w0 * w1 * w2 * w4_fidelity_closed_form(*thetas)
    return total


def test_noise_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(theta_sigma=-0.1)
    with pytest.raises(ValueError):
        NoiseConfig(T_r=0)
    assert NoiseConfig().is_noiseless


@pytest.mark.parametrize("target", [2, 4, 8, 64])
def test_zero_noise_is_ideal_bitwise(target):
    sched = build_schedule(target, PARAMS)
    out = sample_noisy_run(sched, NoiseConfig(seed=9))
    assert out.fidelity_sample == 1.0 or out.fidelity_sample == pytest.approx(1, abs=1e-12)
    assert not out.decayed
    assert out.state.amps.tobytes() == run_ideal(sched).state.amps.tobytes()


def test_zero_noise_estimate():
    mean, err = estimate_fidelity(W4, NoiseConfig(), 500)
    assert mean == pytest.approx(1, abs=1e-12)
    assert err == pytest.approx(0, abs=1e-12)


def test_decay_probability_reference_hardware():
    total = feasibility(PARAMS, 4).total_time
    assert total == pytest.approx(1.0417e-4, rel=1e-3)
    p = decay_probability(total, 3e-2)
    assert p == pytest.approx(1 - math.exp(-total / 3e-2), rel=1e-12)
    assert p == pytest.approx(3.5e-3, rel=0.02)


def test_survival_closed_form_equals_total_time_exponential():
    noise = NoiseConfig(T_r=3e-2, decay_enabled=True)
    for target in (2, 4, 16, 1024):
        sched = build_schedule(target, PARAMS)
        expected = math.exp(-sched.K * sched.pass_duration / 3e-2)
        assert survival_probability(sched, noise) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("T_r,target", [(3e-2, 4), (2e-4, 4), (1e-4, 16)])
def test_survival_frequency_matches_closed_form(T_r, target):
    sched = build_schedule(target, PARAMS)
    noise = NoiseConfig(T_r=T_r, decay_enabled=True, seed=17)
    trials = 100_000
    p = survival_probability(sched, noise)
    freq = survival_frequency(sched, noise, trials)
    assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / trials)


def test_decayed_trajectory_has_zero_fidelity():
    noise = NoiseConfig(T_r=1e-6, decay_enabled=True, seed=3)
    out = sample_noisy_run(W4, noise)
    assert out.decayed and out.fidelity_sample == 0.0 and out.state is None
    assert out.decay_round == 0


def test_jitter_quadrature_oracle_sanity():
    assert w4_fidelity_closed_form(*(3 * [math.pi / 4])) == pytest.approx(1)
    assert w4_mean_fidelity_quadrature(0.0) == pytest.approx(1)


def test_jitter_mean_fidelity_w4():
    noise = NoiseConfig(theta_sigma=0.05, seed=5)
    mean, err = estimate_fidelity(W4, noise, 10_000)
    assert 0.99 <= mean < 1.0
    assert abs(mean - w4_mean_fidelity_quadrature(0.05)) <= 3 * err


def test_fidelity_non_increasing_in_sigma():
    means = []
    for sigma in (0.0, 0.02, 0.05, 0.1, 0.2):
        mean, err = estimate_fidelity(W4, NoiseConfig(theta_sigma=sigma, seed=21), 10_000)
        means.append((mean, err))
    for (m1, e1), (m2, e2) in zip(means, means[1:]):
        assert m2 <= m1 + e1 + e2


def test_added_decay_never_helps():
    jitter = NoiseConfig(theta_sigma=0.05, seed=8)
    both = NoiseConfig(theta_sigma=0.05, T_r=3e-4, decay_enabled=True, seed=8)
    fj, _ = sample_fidelities(W4, jitter, 5000)
    fb, _ = sample_fidelities(W4, both, 5000)
    assert np.all((fb == fj) | (fb == 0))
    assert fb.mean() <= fj.mean()


def test_single_run_is_row_zero_of_ensemble():
    noise = NoiseConfig(theta_sigma=0.1, T_r=5e-4, decay_enabled=True, seed=44)
    single = sample_noisy_run(W4, noise).fidelity_sample
    fid, _ = sample_fidelities(W4, noise, 50)
    assert fid[0] == single


def test_ensemble_independent_of_chunking():
    sched = build_schedule(8, PARAMS)
    noise = NoiseConfig(theta_sigma=0.05, T_r=1e-3, decay_enabled=True, seed=2)
    a, _ = sample_fidelities(sched, noise, 1000)
    b, _ = sample_fidelities(sched, noise, 1000, chunk_amplitudes=8 * 37)
    assert a.tobytes() == b.tobytes()


def test_estimate_reproducible():
    noise = NoiseConfig(theta_sigma=0.05, seed=1)
    assert estimate_fidelity(W4, noise, 2000) == estimate_fidelity(W4, noise, 2000)
    with pytest.raises(ValueError):
        estimate_fidelity(W4, noise, 0)


def test_noisy_reduction_success_rate():
    sched = build_schedule(3, PARAMS)
    fid, _ = sample_fidelities(sched, NoiseConfig(seed=4), 40_000)
    hits = np.count_nonzero(fid > 0) / fid.size
    assert abs(hits - 0.75) <= 3 * math.sqrt(0.75 * 0.25 / fid.size)
    assert np.allclose(fid[fid > 0], 1.0)


def test_feasibility_reference_hardware():
    rep = feasibility(PARAMS, 4, T_r=3e-2)
    assert rep.t_pass == pytest.approx(math.pi * PARAMS.delta / (4 * PARAMS.g ** 2), rel=1e-12)
    assert rep.t_pass == pytest.approx(5.2e-5, rel=0.01)
    assert rep.order_time == pytest.approx(4 * rep.t_pass, rel=1e-12)
    assert abs(rep.order_time - 2e-4) / 2e-4 <= 0.10
    assert rep.total_time == pytest.approx(2 * rep.t_pass, rel=1e-12)
    assert rep.total_time == pytest.approx(1.0e-4, rel=0.05)
    assert rep.max_rounds_per_process == 30
    assert rep.max_size_per_process == 2 ** 30
    # exactly t_pass = delta*pi/(4 g^2) = 10 / (8 * 24000) s = 1/19200 s, so 0.03 s holds 576 passes
    assert rep.t_pass == pytest.approx(1 / 19200, rel=1e-12)
    assert rep.max_rounds == 576
    assert rep.max_size == 2 ** 576


def test_feasibility_large_target_and_budget():
    rep = feasibility(PARAMS, 1 << 20)
    assert rep.rounds == 20
    assert rep.total_time == 20 * rep.t_pass
    half = feasibility(PARAMS, 4, budget=0.5)
    assert half.max_rounds_per_process == 15
    assert feasibility(PARAMS, 4) == feasibility(PARAMS, 4)
