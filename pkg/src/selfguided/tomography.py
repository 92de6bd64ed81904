"""SPSA-driven self-guided reconstruction: SGQT, OSGQT and self-guided imaging.

Every step probes the current estimate at sigma +/- beta_k * Delta_k, turns
the two measured distances into a directional gradient and walks along
Delta_k. Quantum estimates are renormalised after each step; imaging
estimates are not, which keeps self-guided imaging identical to SPI.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import fidelity, normalize
from .generators import RandomMasks, make_rng, random_oam_state, random_perturbation
from .measurement import ImagingOracle, NoDetectionsError, NoiseModel, QuantumOracle
from .metrics import RunTrace, image_error, infidelity

log = logging.getLogger(__name__)

QUANTUM_VARIANTS = ("sgqt", "osgqt")
VARIANTS = QUANTUM_VARIANTS + ("sgi",)

# substream keys under a run seed
TRUTH_STREAM, INIT_STREAM, DIRECTION_STREAM, NOISE_STREAM = range(4)


@dataclass(frozen=True)
class Schedule:
    """Gain sequences alpha_k and beta_k.

    ``constant`` returns (alpha, beta) at every k. ``power-law`` returns
    alpha_k = a / (k + 1 + A)**s and beta_k = b / (k + 1)**t.
    """

    kind: str = "constant"
    alpha: float = 0.05
    beta: float = 0.2
    a: float = 0.05
    A: float = 0.0
    s: float = 0.602
    b: float = 0.2
    t: float = 0.101

    def __post_init__(self):
        if self.kind not in ("constant", "power-law"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "constant":
            if self.alpha <= 0 or self.beta <= 0:
                raise ValueError("alpha and beta must be > 0")
        elif self.a <= 0 or self.b <= 0 or self.A < 0 or self.s < 0 or self.t < 0:
            raise ValueError("power-law gains need a, b > 0 and A, s, t >= 0")

    @classmethod
    def constant(cls, alpha, beta):
        return cls("constant", alpha=alpha, beta=beta)

    @classmethod
    def power_law(cls, a, b, A=0.0, s=0.602, t=0.101):
        return cls("power-law", a=a, b=b, A=A, s=s, t=t)

    def __call__(self, k) -> tuple[float, float]:
        if self.kind == "constant":
            return self.alpha, self.beta
        return self.a / (k + 1 + self.A) ** self.s, self.b / (k + 1) ** self.t


@dataclass(frozen=True)
class TomographyConfig:
    dimension: int = 5
    iterations: int = 350
    variant: str = "osgqt"
    schedule: Schedule = field(default_factory=Schedule)
    noise: NoiseModel = field(default_factory=NoiseModel)
    seed: int = 0
    state_mode: str = "phase-only"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.variant in QUANTUM_VARIANTS and self.dimension < 2:
            raise ValueError("quantum variants need dimension >= 2")


def spsa_gradient(f_plus, f_minus, beta_k) -> float:
    """Two-point directional gradient (f+ - f-) / (2 beta_k)."""
    if not beta_k > 0:
        raise ValueError("beta_k must be > 0")
    return (f_plus - f_minus) / (2.0 * beta_k)


def probe_states(sigma_k, delta_k, beta_k):
    """Unnormalised probes sigma_k +/- beta_k * Delta_k."""
    if not beta_k > 0:
        raise ValueError("beta_k must be > 0")
    sigma_k = np.asarray(sigma_k)
    delta_k = np.asarray(delta_k)
    if sigma_k.shape != delta_k.shape:
        raise ValueError(f"dimension mismatch: {sigma_k.shape} != {delta_k.shape}")
    return sigma_k + beta_k * delta_k, sigma_k - beta_k * delta_k


def _measure(oracle, sigma_plus, sigma_minus):
    if hasattr(oracle, "measure_pair"):
        return oracle.measure_pair(sigma_plus, sigma_minus)
    return oracle(sigma_plus), oracle(sigma_minus)


def _relative(oracle):
    # count-based oracles report 2N/(N+ + N-) rather than absolute fidelities
    return isinstance(oracle, QuantumOracle) and oracle.noise.kind == "poisson"


def _quantum_update(sigma_k, delta_k, alpha_k, beta_k, oracle, orthogonalise):
    sigma_plus, sigma_minus = probe_states(sigma_k, delta_k, beta_k)
    f_plus, f_minus = _measure(oracle, sigma_plus, sigma_minus)
    diff = f_plus - f_minus
    if orthogonalise:
        c_plus = fidelity(sigma_k, sigma_plus)
        c_minus = fidelity(sigma_k, sigma_minus)
        if _relative(oracle):
            scale = 2.0 / (c_plus + c_minus)
            c_plus, c_minus = scale * c_plus, scale * c_minus
        diff -= c_plus - c_minus
    g_k = spsa_gradient(diff, 0.0, beta_k)
    return normalize(sigma_k + alpha_k * g_k * delta_k), f_plus, f_minus, g_k


def sgqt_step(sigma_k, delta_k, alpha_k, beta_k, oracle):
    """One SGQT iteration; ``oracle`` maps a probe to f(psi, probe) or has ``measure_pair``."""
    return _quantum_update(sigma_k, delta_k, alpha_k, beta_k, oracle, False)[0]


def osgqt_step(sigma_k, delta_k, alpha_k, beta_k, oracle):
    """One OSGQT iteration.

    The estimate's own response f(sigma_k, sigma_k +/- beta_k Delta_k) is
    computed numerically and subtracted from the measured difference, so the
    oracle is still called exactly twice.
    """
    return _quantum_update(sigma_k, delta_k, alpha_k, beta_k, oracle, True)[0]


def _sgi_update(sigma_k, delta_k, alpha_k, beta_k, oracle, k):
    sigma_k = np.asarray(sigma_k, dtype=float)
    delta_k = np.asarray(delta_k, dtype=float)
    if sigma_k.size != delta_k.size:
        raise ValueError(f"dimension mismatch: {sigma_k.size} != {delta_k.size}")
    delta_k = delta_k.reshape(sigma_k.shape)
    if hasattr(oracle, "measure_pair"):
        f_plus, f_minus = oracle.measure_pair(sigma_k, delta_k, beta_k, k)
    else:
        f_plus, f_minus = oracle(sigma_k + beta_k * delta_k), oracle(sigma_k - beta_k * delta_k)
    g_k = spsa_gradient(f_plus, f_minus, beta_k)
    return sigma_k + alpha_k * g_k * delta_k, f_plus, f_minus, g_k


def sgi_step(sigma_k, delta_k, alpha_k, beta_k, oracle, k=0):
    """Self-guided imaging: the SGQT update with the linear overlap as distance; no normalisation."""
    return _sgi_update(sigma_k, delta_k, alpha_k, beta_k, oracle, k)[0]


def run_tomography(config, truth, oracle=None, *, masks=None, initial=None, run_id=0) -> RunTrace:
    """Run ``config.iterations`` steps of the configured variant against ``truth``.

    Quantum runs start from a seeded random phase-only state, imaging runs
    from the zero image; ``initial`` overrides either. The probe directions
    come from a substream of ``config.seed`` that does not depend on the
    variant, so SGQT and OSGQT runs with one seed see the same Delta_k.
    """
    seed = config.seed
    trace = RunTrace(run_id=run_id, seed=seed, variant=config.variant)
    K = config.iterations

    if config.variant == "sgi":
        obj = np.asarray(truth, dtype=float).ravel()
        if oracle is None:
            oracle = ImagingOracle(obj, config.noise, seed=make_rng(seed, NOISE_STREAM).integers(2**63))
        if masks is None:
            masks = RandomMasks(obj.size, K, seed=make_rng(seed, DIRECTION_STREAM).integers(2**63))
        if len(masks) < K:
            raise ValueError(f"{K} iterations need {K} masks, got {len(masks)}")
        sigma = np.zeros_like(obj) if initial is None else np.asarray(initial, dtype=float).ravel()
        trace.append(image_error(obj, sigma))
        for k in range(K):
            alpha_k, beta_k = config.schedule(k)
            sigma, f_plus, f_minus, g_k = _sgi_update(sigma, np.ravel(masks[k]), alpha_k, beta_k, oracle, k)
            trace.append(image_error(obj, sigma), f_plus=f_plus, f_minus=f_minus, g_k=g_k,
                         alpha_k=alpha_k, beta_k=beta_k)
        trace.estimate = sigma
        return trace

    psi = np.asarray(truth, dtype=complex)
    if psi.size != config.dimension:
        raise ValueError(f"truth has dimension {psi.size}, config says {config.dimension}")
    if oracle is None:
        oracle = QuantumOracle(psi, config.noise, make_rng(seed, NOISE_STREAM))
    if initial is None:
        sigma = random_oam_state(config.dimension, make_rng(seed, INIT_STREAM), config.state_mode)
    else:
        sigma = normalize(np.asarray(initial, dtype=complex))
    directions = make_rng(seed, DIRECTION_STREAM)
    orthogonalise = config.variant == "osgqt"
    trace.append(infidelity(psi, sigma))
    for k in range(K):
        alpha_k, beta_k = config.schedule(k)
        delta = random_perturbation(config.dimension, directions)
        try:
            sigma, f_plus, f_minus, g_k = _quantum_update(sigma, delta, alpha_k, beta_k, oracle, orthogonalise)
        except NoDetectionsError:
            log.info("run %d k=%d: no detections, step skipped", run_id, k)
            trace.skipped.append(k)
            trace.append(infidelity(psi, sigma), alpha_k=alpha_k, beta_k=beta_k, n_plus=0, n_minus=0)
            continue
        counts = getattr(oracle, "last_counts", None)
        trace.append(
            infidelity(psi, sigma), f_plus=f_plus, f_minus=f_minus, g_k=g_k, alpha_k=alpha_k, beta_k=beta_k,
            n_plus=counts[0] if counts else None, n_minus=counts[1] if counts else None,
        )
    trace.estimate = sigma
    return trace
