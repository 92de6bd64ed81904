"""
Sweeping constant gains
=======================

Both algorithms are sensitive to alpha and beta. Comparing the best cell of
each variant over a grid is a fairer test than a single shared setting.
"""

import dataclasses

from selfguided.harness import grid_sweep, load_config

base = dataclasses.replace(load_config("alpha-beta-grid"), runs=20)
sweep = grid_sweep(base.alphas, base.betas, base)

print(" alpha   beta   variant   final infidelity")
for row in sweep.table:
    print(f"{row['alpha']:6.3f} {row['beta']:6.3f}   {row['tag']:7s}   {row['final_mean']:.3e}")
for tag, best in sweep.best.items():
    print(f"best {tag}: alpha={best['alpha']}, beta={best['beta']} -> {best['final_mean']:.3e}")
