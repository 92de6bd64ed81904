"""
Orthogonalised ghost imaging as a Kaczmarz sweep
================================================

With random (non-orthogonal) masks the SPI sum keeps re-adding information
the estimate already has. Subtracting the estimate's own overlap
<sigma|Delta_k> before the update projects sigma onto the hyperplane
<x|Delta_k> = y_k, a Kaczmarz step.
"""

import numpy as np

from selfguided import RandomMasks, aggregate, ghost_estimate, normalize, ogi_step, run_spi, test_image

obj = test_image("disk", 32, 32).ravel()

##############################################################################
# A single corrected step annihilates the residual for its mask.

rng = np.random.default_rng(0)
sigma = rng.standard_normal(obj.size)
mask = RandomMasks(obj.size, 1, seed=3)[0]
y = obj @ mask
after = ogi_step(sigma, y, mask)
print(f"residual before {y - sigma @ mask:+.3f}, after {y - after @ mask:+.1e}")

##############################################################################
# Mean error over ten mask sequences. OGI keeps improving long after SPI
# has flattened out.

curves = {"spi": [], "ogi": []}
for seed in range(10):
    masks = RandomMasks(obj.size, 2048, seed=seed)
    for variant in curves:
        curves[variant].append(run_spi(obj, masks, variant, seed=seed))

spi, ogi = aggregate(curves["spi"]), aggregate(curves["ogi"])
for k in (0, 256, 512, 1024, 2048):
    print(f"k={k:5d}  SPI {spi.mean[k]:.4f}  OGI {ogi.mean[k]:.4f}")

##############################################################################
# The covariance ghost-imaging estimate from the same measurements matches
# the normalised SPI sum up to the mean-subtraction of masks and signals.

masks = RandomMasks(obj.size, 2048, seed=0)
gi = ghost_estimate((m, obj @ m) for m in masks)
print(f"ghost estimate overlap with object: {normalize(gi) @ obj:.4f}")
