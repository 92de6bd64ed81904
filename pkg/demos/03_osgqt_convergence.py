"""
SGQT versus orthogonalised SGQT on d = 5 phase qudits
=====================================================

Both algorithms start from the same random phase-only estimate, see the same
probe directions and use constant gains alpha = 0.05, beta = 0.2. OSGQT
subtracts the estimate's own response f(sigma_k, sigma_k +/- beta Delta_k),
computed numerically, so the true state becomes an exact fixed point.
"""

import numpy as np

from selfguided import Schedule, TomographyConfig, aggregate, derive_seed, make_rng, random_oam_state
from selfguided import run_tomography, threshold_crossing

RUNS, K = 100, 350
traces = {"sgqt": [], "osgqt": []}
for r in range(RUNS):
    seed = derive_seed(2025, r)
    psi = random_oam_state(5, make_rng(seed, 0))
    for variant in traces:
        cfg = TomographyConfig(5, K, variant, Schedule.constant(0.05, 0.2), seed=seed)
        traces[variant].append(run_tomography(cfg, psi, run_id=r))

agg = {v: aggregate(t) for v, t in traces.items()}
print("    k   SGQT infidelity    OSGQT infidelity")
for k in (0, 25, 50, 100, 150, 200, 250, 300, 350):
    print(f"{k:5d}   {agg['sgqt'].mean[k]:.3e}          {agg['osgqt'].mean[k]:.3e}")

for v, a in agg.items():
    print(f"{v:6s} final fidelity {100 * (1 - a.mean[-1]):.2f} +- {100 * a.se[-1]:.2f} % (SE); "
          f"first k below 0.1: {threshold_crossing(a, 0.1)}")

##############################################################################
# Optional plot of the mean curves with one-standard-deviation bands.

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    k = np.arange(K + 1)
    for v, style in (("sgqt", "-"), ("osgqt", "--")):
        a = agg[v]
        plt.semilogy(k, a.mean, style, label=v.upper())
        plt.fill_between(k, np.maximum(a.mean - a.std, 1e-12), a.mean + a.std, alpha=0.2)
    plt.xlabel("iteration k")
    plt.ylabel("mean infidelity")
    plt.legend()
    plt.savefig("osgqt_convergence.png", dpi=120)
    print("wrote osgqt_convergence.png")
