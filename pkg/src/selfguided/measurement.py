"""Measurement oracles and noise models.

Quantum oracles return the fidelity between the hidden state and a probe,
either exactly or through simulated Poisson coincidence counts. Imaging
oracles return linear overlaps with the hidden object, optionally with
additive Gaussian noise indexed by iteration so that two pipelines can be
fed the identical noise realisation.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import fidelity, linear_overlap
from .generators import make_rng

log = logging.getLogger(__name__)

NOISE_KINDS = ("none", "gaussian", "poisson")


class NoDetectionsError(RuntimeError):
    """Both probes recorded zero counts; the iteration carries no information."""


@dataclass(frozen=True)
class NoiseModel:
    kind: str = "none"
    gamma: float = 0.0
    rate: float = 5e3
    integration_time: float = 1.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.rate <= 0 or self.integration_time <= 0:
            raise ValueError("rate and integration_time must be > 0")

    @classmethod
    def gaussian(cls, gamma):
        return cls("gaussian", gamma=gamma)

    @classmethod
    def poisson(cls, rate, integration_time):
        return cls("poisson", rate=rate, integration_time=integration_time)


class CountPair(NamedTuple):
    n_plus: int
    n_minus: int


def noiseless_oracle(truth, probe) -> float:
    """Fidelity for complex (quantum) inputs, linear overlap for real (imaging) inputs."""
    if np.iscomplexobj(truth) or np.iscomplexobj(probe):
        return fidelity(truth, probe)
    return linear_overlap(truth, probe)


def gaussian_overlap_noise(y, gamma, rng) -> float:
    """Return y + n with n ~ Normal(0, gamma**2); gamma == 0 returns y unchanged."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if gamma == 0:
        return y
    return y + gamma * rng.standard_normal()


def poisson_counts(F, rate, integration_time, rng) -> int:
    """Detection events for a projection of fidelity F: Poisson(F * rate * integration_time)."""
    if rate <= 0 or integration_time <= 0:
        raise ValueError("rate and integration_time must be > 0")
    F = min(max(F, 0.0), 1.0)
    return int(rng.poisson(F * rate * integration_time))


def fidelity_from_counts(counts) -> tuple[float, float]:
    """Relative fidelity estimates (2N+/(N+ + N-), 2N-/(N+ + N-))."""
    n_plus, n_minus = counts
    total = n_plus + n_minus
    if total <= 0:
        raise NoDetectionsError("no detections; iteration must be skipped or retried")
    f_plus = 2 * n_plus / total
    return f_plus, 2.0 - f_plus


class GaussianStream:
    """Noise samples n_k ~ Normal(0, gamma**2), with n_k a pure function of (seed, k)."""

    def __init__(self, gamma, seed):
        if gamma < 0:
            raise ValueError("gamma must be >= 0")
        self.gamma = float(gamma)
        self.seed = int(seed)

    def __call__(self, k) -> float:
        if self.gamma == 0:
            return 0.0
        return gaussian_overlap_noise(0.0, self.gamma, make_rng(self.seed, k))


class QuantumOracle:
    """Measures f(psi, sigma+/-) for a hidden pure state.

    One instance per run. With Poisson noise the two probes are counted
    independently and turned into relative fidelities; ``last_counts`` keeps
    the raw counts of the latest pair. ``calls`` counts single-probe
    evaluations.
    """

    def __init__(self, truth, noise=None, rng=None):
        self.truth = np.asarray(truth, dtype=complex)
        self.noise = noise or NoiseModel()
        if self.noise.kind == "gaussian":
            raise ValueError("gaussian noise applies to imaging overlaps, not fidelities")
        if self.noise.kind == "poisson" and rng is None:
            raise ValueError("poisson oracle needs an rng")
        self.rng = rng
        self.calls = 0
        self.last_counts = None

    def fidelity(self, probe) -> float:
        self.calls += 1
        return fidelity(self.truth, probe)

    def measure_pair(self, sigma_plus, sigma_minus) -> tuple[float, float]:
        """(f_plus, f_minus) for the two probes; raises NoDetectionsError on zero counts."""
        f_plus = self.fidelity(sigma_plus)
        f_minus = self.fidelity(sigma_minus)
        if self.noise.kind == "none":
            self.last_counts = None
            return f_plus, f_minus
        m = self.noise
        counts = CountPair(
            poisson_counts(f_plus, m.rate, m.integration_time, self.rng),
            poisson_counts(f_minus, m.rate, m.integration_time, self.rng),
        )
        self.last_counts = counts
        return fidelity_from_counts(counts)


class ImagingOracle:
    """Linear overlaps <O|probe> with a hidden real object.

    Gaussian noise n_k is added to the mask overlap <O|Delta_k>. For a
    probe sigma +/- beta*Delta_k the noisy overlap is therefore
    <O|sigma> +/- beta*(<O|Delta_k> + n_k), so that SPI and self-guided
    imaging consume exactly the same noisy measurement at iteration k.
    """

    def __init__(self, obj, noise=None, seed=0):
        self.obj = np.asarray(obj, dtype=float).ravel()
        self.noise = noise or NoiseModel()
        if self.noise.kind == "poisson":
            raise ValueError("poisson noise applies to quantum fidelities, not imaging overlaps")
        self.stream = GaussianStream(self.noise.gamma if self.noise.kind == "gaussian" else 0.0, seed)
        self.calls = 0

    def overlap(self, mask, k) -> float:
        """Noisy single-pixel measurement y_k = <O|Delta_k> + n_k."""
        self.calls += 1
        return linear_overlap(self.obj, mask) + self.stream(k)

    def measure_pair(self, sigma, delta, beta, k) -> tuple[float, float]:
        """Noisy f(O, sigma +/- beta*Delta_k)."""
        self.calls += 2
        sigma = np.ravel(sigma)
        delta = np.ravel(delta)
        n_k = self.stream(k)
        f_plus = linear_overlap(self.obj, sigma + beta * delta) + beta * n_k
        f_minus = linear_overlap(self.obj, sigma - beta * delta) - beta * n_k
        return f_plus, f_minus
