"""
Noise and the time budget
=========================

Pulse-angle jitter (from atomic velocity spread) and radiative decay of the
Rydberg levels are sampled on pure-state trajectories. The time budget sets
how many doubling rounds fit inside the radiative lifetime.
"""

from cavity_w import InteractionParams, NoiseConfig, build_schedule, estimate_fidelity, feasibility

params = InteractionParams.from_hz(24_000, delta_over_g=10)

rep = feasibility(params, target_n=4, T_r=3e-2)
print(f"t_pass = {rep.t_pass:.3e} s  (pi delta / g^2 = {rep.order_time:.3e} s)")
print(f"W4 needs {rep.rounds} rounds, {rep.total_time:.3e} s; decay probability {rep.decay_probability_per_atom:.2e}")
print(f"sequential passes within T_r: {rep.max_rounds}")
print(f"whole {rep.process_time:g} s processes within T_r: {rep.max_rounds_per_process} "
      f"-> up to 2^{rep.max_rounds_per_process} = {rep.max_size_per_process} atoms")

###############################################################################
# Mean W-class fidelity for a 16-atom run.
sched = build_schedule(16, params)
print(f"\n{'sigma [rad]':>11} {'T_r [s]':>8} {'mean F':>8} {'stderr':>8}")
for T_r in (3e-2, 1e-3):
    for sigma in (0.0, 0.02, 0.05, 0.1):
        noise = NoiseConfig(theta_sigma=sigma, T_r=T_r, decay_enabled=True, seed=3)
        mean, err = estimate_fidelity(sched, noise, 20_000)
        print(f"{sigma:>11} {T_r:>8g} {mean:>8.5f} {err:>8.1e}")
