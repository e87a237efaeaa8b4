"""
The spiking zone
================

Above the saddle and below the line w = b v, every orbit blows up. Starting
points there stay there, and Euler iterates climb monotonically in v and w.
"""

import numpy as np

from spikesim import InputCurrent, ModelSpec, SimState, SolverConfig, analyze_fixed_points, in_spiking_zone, simulate

model = ModelSpec("canonical-quadratic", a=1.0, b=1.0, c=-1.0, d=0.5)
for I in (0.0, 0.25, 1.0):
    fp = analyze_fixed_points(model, I)
    roots = [x for x in (fp.v_minus, fp.v_plus) if x is not None and abs(x) != float("inf")]
    print(f"I={I}: {fp.regime}, fixed-point potentials {[round(x, 4) for x in roots]}")

fp = analyze_fixed_points(model, 0.0)
current = InputCurrent.constant(0.0)
rng = np.random.default_rng(1)
for _ in range(5):
    v0 = fp.v_plus + rng.uniform(0.1, 3.0)
    init = SimState(0.0, v0, model.b * v0 - rng.uniform(0.0, 2.0))
    cfg = SolverConfig(scheme="oracle", theta=100.0, t_end=100.0, max_events=1, record_every=1)
    traj, train = simulate(model, current, init, cfg)
    keep = traj.branch != 3
    inside = all(in_spiking_zone(model, 0.0, SimState(0.0, v, w), fp) for v, w in zip(traj.v[keep], traj.w[keep]))
    print(f"start ({init.v:.3f}, {init.w:.3f}): spike at t={train.events[0][0]:.4f}, stayed in zone: {inside}")
