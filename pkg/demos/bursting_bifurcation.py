"""
Bursting or regular spiking, depending on the step
==================================================

The quadratic model with a=0.02, b=0.19, c=-59.9, d=1.15 and I=7.6 fires
doublets: the adaptation value at spike time alternates between two levels.
A coarse Euler step loses that structure.
"""

from spikesim import load_shipped_config, simulate
from spikesim.spiketrain import classify_pattern, occupied_clusters, reset_histogram, reset_sequence

cfg = load_shipped_config("izhikevich_burst")
model, current, init = cfg.model, cfg.current, cfg.init

runs = {
    "euler dt=0.1": cfg.solver.replace(scheme="euler", dt=0.1),
    "euler dt=0.01": cfg.solver.replace(scheme="euler", dt=0.01),
    "hybrid eps=0.01": cfg.solver.replace(scheme="hybrid-adaptive", epsilon=0.01),
    "oracle": cfg.solver.replace(scheme="oracle"),
}

for name, solver in runs.items():
    _, train = simulate(model, current, init, solver)
    seq = reset_sequence(train)
    pattern = classify_pattern(seq)
    clusters = occupied_clusters(reset_histogram(seq, 20))
    print(f"{name:16s} steps={train.step_count:7d} spikes={len(train):3d} "
          f"pattern={pattern.label:10s} clusters={clusters}")

# the last few reset values of the fine Euler run, two per burst
_, train = simulate(model, current, init, runs["euler dt=0.01"])
print("last resets:", ", ".join(f"{w:.4f}" for w in train.w_values[-6:]))
