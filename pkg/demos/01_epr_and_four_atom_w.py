"""
EPR pair and four-atom W state
==============================

One excited atom and one ground atom cross a detuned cavity with pulse
angle pi/4 and leave as a W-type Bell pair. Each of the two atoms is then
paired with a fresh ground-state ancilla in its own cavity, which gives a
four-atom W state with phases (+1, -i, -i, -1).
"""

import numpy as np

from cavity_w import InteractionParams, SingleExcitationState, build_schedule, permute, run_ideal, w_class_fidelity
from cavity_w.state_core import fix_global_phase, relative_phases, to_dense
from cavity_w.subspace_engine import ancilla_first_order

params = InteractionParams.from_hz(24_000, delta_over_g=10)
print(f"lambda = {params.lam:.1f} rad/s, pass duration = {params.t * 1e6:.1f} us")

###############################################################################
# Step 1: the Bell pair. Storage order is (a2, b2).
epr = run_ideal(build_schedule(2, params)).state
print("EPR amplitudes (a2, b2):", np.round(fix_global_phase(epr.amps), 6))
print("dense vector |gg>,|ge>,|eg>,|ee>:", np.round(to_dense(SingleExcitationState(fix_global_phase(epr.amps))).amps, 6))

###############################################################################
# Step 2: double. Storage order is (a2, b2, a1, b1), ancillas appended.
w4 = run_ideal(build_schedule(4, params))
amps = fix_global_phase(w4.state.amps)
print("W4 amplitudes (a2, b2, a1, b1):", np.round(amps, 6))
print("phases relative to a2 / pi:", relative_phases(amps) / np.pi)
print("W-class fidelity:", w_class_fidelity(w4.state))
print(f"total time: {w4.total_time * 1e6:.1f} us over {w4.rounds_executed} rounds")

###############################################################################
# The labelled order of the four-atom setup is (a1, a2, b1, b2).
labelled = permute(w4.state, ancilla_first_order(2))
for label, a in zip(("a1", "a2", "b1", "b2"), fix_global_phase(labelled.amps, -np.pi / 2)):
    print(f"  {label}: {a.real:+.3f} {a.imag:+.3f}i")
