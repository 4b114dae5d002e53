import math

import numpy as np
import pytest

from cavity_w.pair_interaction import InteractionParams
from cavity_w.protocol import (
    EXCITED,
    GROUND,
    build_schedule,
    measure_atom,
    reduce_to_size,
    reduction_success_probability,
    rounds_for,
    run_ideal,
)
from cavity_w.state_core import SingleExcitationState, canonical_w, fix_global_phase, w_class_fidelity
from cavity_w.subspace_engine import analytic_amplitudes, run_cascade

PARAMS = InteractionParams.from_hz(24_000, 10)


def three_sigma(p, n):
    return 3 * math.sqrt(p * (1 - p) / n)


@pytest.mark.parametrize("n,K", [(2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (1024, 10)])
def test_rounds_for(n, K):
    assert rounds_for(n) == K
    assert 2 ** K >= n > 2 ** (K - 1)


def test_schedule_target_4():
    s = build_schedule(4, PARAMS)
    assert s.K == 2
    assert [len(r) for r in s.rounds] == [1, 2]
    assert s.reduction_count == 0
    assert [(p.i, p.j) for p in s.rounds[1]] == [(0, 2), (1, 3)]


def test_schedule_target_3_and_2():
    s3 = build_schedule(3, PARAMS)
    assert (s3.K, s3.reduction_count) == (2, 1)
    s2 = build_schedule(2, PARAMS)
    assert (s2.K, s2.n_passes) == (1, 1)
    assert s2.pass_duration == pytest.approx(PARAMS.t)


def test_schedule_errors():
    with pytest.raises(ValueError):
        build_schedule(1, PARAMS)
    with pytest.raises(ValueError):
        build_schedule(4, InteractionParams(PARAMS.g, PARAMS.delta, theta=0.5))


def test_run_ideal_epr():
    res = run_ideal(build_schedule(2, PARAMS))
    s2 = 1 / math.sqrt(2)
    np.testing.assert_allclose(fix_global_phase(res.state.amps), [s2, -1j * s2], atol=1e-12)
    assert res.succeeded and res.rounds_executed == 1


def test_run_ideal_w4():
    res = run_ideal(build_schedule(4, PARAMS))
    np.testing.assert_allclose(fix_global_phase(res.state.amps), 0.5 * np.array([1, -1j, -1j, -1]), atol=1e-12)
    assert res.total_time == 2 * PARAMS.t


def test_run_ideal_1024():
    res = run_ideal(build_schedule(1024, PARAMS))
    np.testing.assert_allclose(np.abs(res.state.amps), 2 ** -5, atol=1e-10, rtol=0)
    np.testing.assert_allclose(res.state.amps, analytic_amplitudes(10), atol=1e-10, rtol=0)
    assert w_class_fidelity(res.state) == pytest.approx(1, abs=1e-9)
    assert res.total_time == res.rounds_executed * build_schedule(1024, PARAMS).pass_duration


def test_run_ideal_bit_reproducible():
    a = run_ideal(build_schedule(64, PARAMS)).state.amps
    b = run_ideal(build_schedule(64, PARAMS)).state.amps
    assert a.tobytes() == b.tobytes()


def test_run_ideal_non_power_of_two_needs_randomness():
    sched = build_schedule(3, PARAMS)
    with pytest.raises(ValueError):
        run_ideal(sched)
    res = run_ideal(sched, randomness=1)
    assert res.rounds_executed == 2
    if res.succeeded:
        assert res.state.n == 3
        assert w_class_fidelity(res.state) == pytest.approx(1, abs=1e-12)


def test_measure_atom_ground_renormalizes():
    rng = np.random.default_rng(0)
    s = SingleExcitationState([0.6, 0.8j, 0])
    rec, post = measure_atom(s, 2, rng)
    assert rec.outcome == GROUND and rec.probability_of_outcome == pytest.approx(1)
    np.testing.assert_allclose(post.amps, [0.6, 0.8j])


def test_measure_atom_excited_certain():
    rec, post = measure_atom(SingleExcitationState([0, 1]), 1, np.random.default_rng(0))
    assert rec.outcome == EXCITED and post is None


def test_reduce_identity():
    res = reduce_to_size(canonical_w(5), 5, 0)
    assert res.succeeded and res.reduction_outcomes == []


def test_reduce_errors():
    with pytest.raises(ValueError):
        reduce_to_size(canonical_w(3), 4, 0)


def test_reduce_keeps_equal_magnitudes():
    rng = np.random.default_rng(3)
    for _ in range(50):
        res = reduce_to_size(run_cascade(3), 5, rng)
        if res.succeeded:
            assert res.state.n == 5
            np.testing.assert_allclose(np.abs(res.state.amps), 1 / math.sqrt(5), atol=1e-12)
            assert [r.measured_atom for r in res.reduction_outcomes] == [7, 6, 5]
            np.testing.assert_allclose([r.probability_of_outcome for r in res.reduction_outcomes],
                                       [7 / 8, 6 / 7, 5 / 6], atol=1e-12)


def test_reduction_probability_telescopes():
    assert reduction_success_probability(4, 3) == 0.75
    assert math.prod((s - 1) / s for s in range(6, 9)) == pytest.approx(reduction_success_probability(8, 5))
    # odd target 2n+1 from 2n+2: 1 - 1/(2(n+1))
    for n in range(1, 6):
        assert reduction_success_probability(2 * n + 2, 2 * n + 1) == pytest.approx(1 - 1 / (2 * (n + 1)))


@pytest.mark.parametrize("m,n,seed", [(4, 3, 11), (8, 5, 12)])
def test_reduction_frequency(m, n, seed):
    trials = 20_000
    rng = np.random.default_rng(seed)
    start = run_cascade(int(math.log2(m)))
    hits = sum(reduce_to_size(start, n, rng).succeeded for _ in range(trials))
    p = n / m
    assert abs(hits / trials - p) <= three_sigma(p, trials)
