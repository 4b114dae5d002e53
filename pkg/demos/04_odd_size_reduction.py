"""
Odd sizes by measurement
========================

Doubling only reaches powers of two. To get W_3 from W_4 one atom is
measured; the ground outcome (probability 3/4) leaves a W_3. Going further
down multiplies the per-step probabilities, which telescope to n/m.
"""

import numpy as np

from cavity_w import reduce_to_size, run_cascade, w_class_fidelity

rng = np.random.default_rng(7)
trials = 100_000
for K, target in ((2, 3), (3, 7), (3, 5), (4, 9)):
    m = 2 ** K
    start = run_cascade(K)
    hits = 0
    for _ in range(trials):
        res = reduce_to_size(start, target, rng)
        hits += res.succeeded
    p = target / m
    sigma = np.sqrt(p * (1 - p) / trials)
    print(f"W{m} -> W{target}: success {hits / trials:.4f}, expected {p:.4f} ({abs(hits / trials - p) / sigma:.1f} sigma)")

res = reduce_to_size(run_cascade(3), 5, np.random.default_rng(1))
print("one run:", [(r.measured_atom, r.outcome, round(r.probability_of_outcome, 4)) for r in res.reduction_outcomes])
if res.succeeded:
    print("W-class fidelity of the result:", w_class_fidelity(res.state))
