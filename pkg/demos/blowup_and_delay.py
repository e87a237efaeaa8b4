"""
Finite-time blow-up and the Euler delay
=======================================

Stripped of adaptation, the membrane equation is y' = y**2 or y' = e**y, which
diverge in finite time. Euler reaches any cutoff late, by an amount that grows
only logarithmically with the cutoff for the quadratic case.
"""

import math

from spikesim import InputCurrent, ModelSpec, SimState, SolverConfig, simulate, spike_time_delay
from spikesim.error_analysis import blowup_time, onedim_blowup_solution

quadratic = ModelSpec("canonical-quadratic", a=0.0, b=0.0, c=-1.0, d=0.0)
zero = InputCurrent.constant(0.0)

print("exact y(t) from y0=1:", [round(onedim_blowup_solution("power(2)", 1.0, t), 4) for t in (0.0, 0.5, 0.9, 0.99)])
print("blow-up time:", blowup_time("power(2)", 1.0))

# the reference solver hits the analytic crossing time of a very high cutoff
cfg = SolverConfig(scheme="oracle", theta=1e6, t_end=2.0, max_events=1, oracle_tol=1e-12)
_, train = simulate(quadratic, zero, SimState(0.0, 1.0, 0.0), cfg)
print(f"oracle crossing of 1e6: {train.events[0][0]:.12f}  exact {1 - 1e-6:.12f}")

# Euler lag at theta=10 against the prediction, for several steps
for tau in (1e-2, 1e-3, 1e-4):
    cfg = SolverConfig(scheme="euler", dt=tau, theta=10.0, t_end=2.0, max_events=1, spike_interp="linear")
    _, train = simulate(quadratic, zero, SimState(0.0, 1.0, 0.0), cfg)
    lag = train.events[0][0] - 0.9
    print(f"tau={tau:g}: lag {lag:.3e}  predicted {spike_time_delay('power(2)', 10.0, 1.0, tau):.3e}")

# the lag grows like ln(theta)
for theta in (10.0, 100.0, 1000.0):
    cfg = SolverConfig(scheme="euler", dt=1e-4, theta=theta, t_end=2.0, max_events=1, spike_interp="linear")
    _, train = simulate(quadratic, zero, SimState(0.0, 1.0, 0.0), cfg)
    lag = train.events[0][0] - (1 - 1 / theta)
    print(f"theta={theta:g}: lag/tau = {lag / 1e-4:.3f}  ln(theta) = {math.log(theta):.3f}")
