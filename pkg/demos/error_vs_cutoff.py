"""
How the first-order error grows with the cutoff
================================================

A(v) and B(v) are the leading error coefficients on v and w along an orbit,
for F growing like v**m or like e**v. Both grow without bound with the
cutoff, and the measured Euler error on w follows the same trend.
"""

import numpy as np

from spikesim import error_vs_cutoff_curve, load_shipped_config, run_error_sweep
from spikesim.harness import output_dir

thetas = list(1.0 + np.geomspace(0.5, 30.0, 8))
for cls, v0 in (("power(4)", 1.0), ("exponential", 0.0)):
    print(cls)
    for p in error_vs_cutoff_curve(cls, v0, a=0.5, b=0.5, theta_list=[v0 + t - 1.0 for t in thetas]):
        print(f"  theta={p.v:8.3f}  A={p.A:12.4e}  B={p.B:12.4e}")

# measured first-spike errors of Euler on the bursting model
base = load_shipped_config().with_solver(scheme="euler", t_end=100.0)
path = output_dir() / "euler_error_sweep.csv"
rows = run_error_sweep(base, taus=[0.02, 0.01, 0.005], thetas=[30.0, 100.0, 300.0], csv_path=path)
for r in rows:
    print(f"theta={r['theta']:5.0f} tau={r['tau']:.3f}  spike-time error={r['spike_time_error']:.4f}  w error={r['w_error']:.4f}")
print("written to", path)
