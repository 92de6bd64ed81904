"""
Single-pixel imaging and self-guided imaging are the same algorithm
===================================================================

Self-guided imaging runs the two-probe SPSA update with the linear overlap
<O|sigma> as the distance measure. Because that measure is linear, the
finite difference (f+ - f-) / (2 beta) collapses to <O|Delta_k> for any
probe size beta, and the update is exactly the SPI running sum.
"""

import numpy as np

from selfguided import HadamardMasks, ImagingOracle, NoiseModel, RandomMasks, Schedule, TomographyConfig
from selfguided import run_spi, run_tomography, test_image

obj = test_image("disk", 64, 64).ravel()

##############################################################################
# Random +-1 masks, no noise. Both pipelines see the same 4096 masks.

masks = RandomMasks(obj.size, 4096, seed=11)
spi = run_spi(obj, masks, "spi")
cfg = TomographyConfig(obj.size, 4096, "sgi", Schedule.constant(alpha=1.0, beta=0.2))
sgi = run_tomography(cfg, obj, masks=masks)

print("random masks")
for k in range(0, 4097, 512):
    print(f"  k={k:5d}  SPI error {spi.metric[k]:.6f}  SGI error {sgi.metric[k]:.6f}")
print(f"  largest per-iteration difference: {np.max(np.abs(spi.metrics - sgi.metrics)):.2e}")

##############################################################################
# Hadamard masks with Gaussian noise of width 0.25 added to every overlap.
# Noise sample n_k depends only on (seed, k), so both pipelines receive the
# identical noisy measurement at each iteration.

noise = NoiseModel.gaussian(0.25)
masks = HadamardMasks(obj.size)
spi = run_spi(obj, masks, "spi", noise, seed=7)
cfg = TomographyConfig(obj.size, len(masks), "sgi", Schedule.constant(1.0, 0.2), noise)
sgi = run_tomography(cfg, obj, ImagingOracle(obj, noise, seed=7), masks=masks)

print("Hadamard masks, gamma = 0.25")
print(f"  final error SPI {spi.final:.6f}  SGI {sgi.final:.6f}")
print(f"  largest per-iteration difference: {np.max(np.abs(spi.metrics - sgi.metrics)):.2e}")

##############################################################################
# Without noise the full Hadamard set is an orthogonal basis, so after all
# 4096 masks the running sum equals 4096 * O and the error vanishes.

exact = run_spi(obj, HadamardMasks(obj.size), "spi")
print(f"complete noiseless Hadamard basis: error {exact.final:.1e}")
