"""
Cost and accuracy of the four schemes
=====================================

Same problem, four solvers: fixed-step Euler, the fixed-step hybrid that
switches to stepping in v where the potential moves fast, its curvature-driven
adaptive version, and the reference solver. Deltas are against the reference.
"""

from spikesim import load_shipped_config, run_comparison

base = load_shipped_config()
configs = [
    base.with_solver(scheme="euler", dt=0.01),
    base.with_solver(scheme="hybrid-fixed", dt=0.01, dv=0.1),
    base.with_solver(scheme="hybrid-adaptive", epsilon=0.01),
    base.with_solver(scheme="hybrid-adaptive", epsilon=0.1),
    base.with_solver(scheme="oracle"),
]
rows = run_comparison(configs, repeat=3)

print(f"{'scheme':16s} {'param':>7s} {'steps':>7s} {'ms':>7s} {'pattern':>9s} {'dt_spike':>10s} {'dw_spike':>10s}")
for r in rows:
    print(f"{r['scheme']:16s} {r['tau_or_eps']:7.2g} {r['step_count']:7d} {1e3 * r['wall_time_median']:7.1f} "
          f"{r['pattern']:>9s} {r['first_spike_time_delta']:10.2e} {r['first_spike_w_delta']:10.2e}")
