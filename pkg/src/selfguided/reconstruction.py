"""Linear-measurement image reconstruction: ghost imaging, iterative SPI and OGI."""

from typing import NamedTuple

import numpy as np

from .measurement import ImagingOracle
from .metrics import RunTrace, image_error


class ImagingMeasurement(NamedTuple):
    mask: np.ndarray
    y: float
    k: int = 0


def _flat(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size != b.size:
        raise ValueError(f"dimension mismatch: {a.size} != {b.size}")
    return a, b


def ghost_estimate(measurements) -> np.ndarray:
    """Covariance estimate (1/N) sum_k (y_k - mean y)(Delta_k - mean Delta). Not normalised."""
    measurements = list(measurements)
    if len(measurements) < 2:
        raise ValueError("ghost imaging needs at least two measurements")
    shape = np.shape(measurements[0][0])
    masks = np.array([np.ravel(m[0]) for m in measurements], dtype=float)
    if masks.ndim != 2:
        raise ValueError("all masks must have the same number of pixels")
    y = np.array([m[1] for m in measurements], dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("measurements must be finite")
    dy = y - y.mean()
    dm = masks - masks.mean(axis=0)
    return (dy @ dm / len(y)).reshape(shape)


def spi_step(sigma, y, mask) -> np.ndarray:
    """sigma + y * Delta. The running sum is left unnormalised."""
    sigma, mask = _flat(sigma, mask)
    return sigma + y * mask.reshape(sigma.shape)


def ogi_step(sigma, y, mask, normalized=True) -> np.ndarray:
    """Kaczmarz-corrected update sigma + c * Delta with c = (y - <sigma|Delta>) / <Delta|Delta>.

    With ``normalized=False`` the division by <Delta|Delta> is dropped, which
    overshoots badly for unnormalised ±1 masks but follows the update as
    usually written.
    """
    sigma, mask = _flat(sigma, mask)
    mask = mask.reshape(sigma.shape)
    residual = y - np.dot(sigma.ravel(), mask.ravel())
    if normalized:
        mm = np.dot(mask.ravel(), mask.ravel())
        if mm == 0.0:
            raise ValueError("zero mask carries no measurement")
        residual /= mm
    return sigma + residual * mask


def run_spi(obj, masks, variant="spi", noise=None, seed=0, run_id=0, normalized=True) -> RunTrace:
    """Reconstruct ``obj`` from the mask sequence with SPI or OGI updates.

    ``obj`` is either the hidden image or an ImagingOracle wrapping it. Noise
    realisations depend only on (seed, k), so SPI and OGI runs with the same
    seed see identical measurements. The metric column is image_error.
    """
    if variant not in ("spi", "ogi"):
        raise ValueError(f"unknown imaging variant {variant!r}")
    oracle = obj if isinstance(obj, ImagingOracle) else ImagingOracle(obj, noise, seed)
    truth = oracle.obj
    sigma = np.zeros_like(truth)
    trace = RunTrace(run_id=run_id, seed=seed, variant=variant)
    trace.append(image_error(truth, sigma))
    for k, mask in enumerate(masks):
        mask = np.ravel(mask)
        y = oracle.overlap(mask, k)
        if variant == "spi":
            sigma = spi_step(sigma, y, mask)
            coeff = y
        else:
            before = sigma
            sigma = ogi_step(sigma, y, mask, normalized)
            coeff = (y - np.dot(before, mask)) / (np.dot(mask, mask) if normalized else 1.0)
        trace.append(image_error(truth, sigma), g_k=coeff)
    trace.estimate = sigma
    return trace
