"""
Shot noise from finite coincidence counts
=========================================

Each probe's fidelity is turned into a Poisson count with mean
F * 5000/s * I, and the algorithm only sees the relative estimate
2 N+/(N+ + N-). Shorter integration means fewer counts and noisier
gradients.
"""

from selfguided.harness import load_config, simulate, summarize

config = load_config("noise-sweep")
summary = summarize(config, simulate(config))
for tag, res in summary["results"].items():
    print(f"{tag:12s} final infidelity {res['final_mean']:.5f} +- {res['final_se']:.5f}  "
          f"first k below 0.1: {res['threshold_k']}")
