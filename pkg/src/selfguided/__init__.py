"""Stochastic self-guided reconstruction: SPI, ghost imaging, OGI, SGI, SGQT and OSGQT."""

__version__ = "0.1.0"

from .core import fidelity, inner_product, linear_overlap, normalize
from .generators import (
    HadamardMasks,
    RandomMasks,
    derive_seed,
    hadamard_mask,
    make_rng,
    random_oam_state,
    random_perturbation,
    random_sign_mask,
    test_image,
)
from .measurement import (
    CountPair,
    ImagingOracle,
    NoDetectionsError,
    NoiseModel,
    QuantumOracle,
    fidelity_from_counts,
    gaussian_overlap_noise,
    noiseless_oracle,
    poisson_counts,
)
from .metrics import RunTrace, aggregate, image_error, infidelity, threshold_crossing
from .reconstruction import ghost_estimate, ogi_step, run_spi, spi_step
from .tomography import (
    Schedule,
    TomographyConfig,
    osgqt_step,
    probe_states,
    run_tomography,
    sgi_step,
    sgqt_step,
    spsa_gradient,
)

__all__ = [
    "CountPair",
    "HadamardMasks",
    "ImagingOracle",
    "NoDetectionsError",
    "NoiseModel",
    "QuantumOracle",
    "RandomMasks",
    "RunTrace",
    "Schedule",
    "TomographyConfig",
    "aggregate",
    "derive_seed",
    "fidelity",
    "fidelity_from_counts",
    "gaussian_overlap_noise",
    "ghost_estimate",
    "hadamard_mask",
    "image_error",
    "infidelity",
    "inner_product",
    "linear_overlap",
    "make_rng",
    "noiseless_oracle",
    "normalize",
    "ogi_step",
    "osgqt_step",
    "poisson_counts",
    "probe_states",
    "random_oam_state",
    "random_perturbation",
    "random_sign_mask",
    "run_spi",
    "run_tomography",
    "sgi_step",
    "sgqt_step",
    "spi_step",
    "spsa_gradient",
    "test_image",
    "threshold_crossing",
]
