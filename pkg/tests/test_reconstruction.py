import numpy as np
import pytest

from selfguided.core import normalize
from selfguided.generators import HadamardMasks, RandomMasks, hadamard_mask, make_rng, random_sign_mask
from selfguided.generators import test_image as make_image
from selfguided.measurement import NoiseModel
from selfguided.metrics import image_error
from selfguided.reconstruction import ImagingMeasurement, ghost_estimate, ogi_step, run_spi, spi_step


def test_ghost_estimate_constant_signal_vanishes():
    m = [ImagingMeasurement(np.array([1.0, -1.0]), 0.3), ImagingMeasurement(np.array([-1.0, -1.0]), 0.3)]
    np.testing.assert_array_equal(ghost_estimate(m), [0.0, 0.0])
    with pytest.raises(ValueError):
        ghost_estimate(m[:1])


def test_ghost_estimate_zero_mean_form():
    masks = np.array([[1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [-1.0, -1.0]])
    y = np.array([0.5, -0.5, 0.2, -0.2])
    expected = sum(yk * mk for yk, mk in zip(y, masks)) / len(y)
    np.testing.assert_allclose(ghost_estimate(zip(masks, y)), expected, atol=1e-15)


def test_ghost_estimate_hadamard_recovers_mean_subtracted_object():
    obj = make_image("disk", 4, 4).ravel()
    rows = [hadamard_mask(16, k) for k in range(1, 16)]
    est = ghost_estimate([(m, obj @ m) for m in rows])
    # brute-force covariance, pixel by pixel
    N = len(rows)
    y = [sum(o * m for o, m in zip(obj, row)) for row in rows]
    ybar = sum(y) / N
    brute = [sum((y[k] - ybar) * (rows[k][p] - sum(r[p] for r in rows) / N) for k in range(N)) / N for p in range(16)]
    np.testing.assert_allclose(est, brute, atol=1e-15)
    # pixel 0 is +1 in every non-DC row, so the covariance cannot see it
    assert est[0] == 0.0
    target = obj - obj.mean()
    assert normalize(target) @ normalize(est) == pytest.approx(0.988826, abs=1e-6)
    target[0] = 0.0
    assert normalize(target - target[1:].mean() * (np.arange(16) > 0)) @ normalize(est) == pytest.approx(1.0, abs=1e-12)


def test_ghost_estimate_invariances():
    rng = make_rng(10)
    masks = [random_sign_mask(9, rng) for _ in range(12)]
    y = rng.standard_normal(12)
    base = ghost_estimate(zip(masks, y))
    np.testing.assert_allclose(ghost_estimate(zip(masks, y + 3.7)), base, atol=1e-12)
    offset = rng.standard_normal(9)
    np.testing.assert_allclose(ghost_estimate(zip([m + offset for m in masks], y)), base, atol=1e-12)


def test_spi_step():
    mask = np.array([1.0, -1.0, 1.0])
    np.testing.assert_array_equal(spi_step(np.zeros(3), 0.0, mask), 0)
    obj = np.array([0.2, 0.4, 0.8])
    np.testing.assert_allclose(spi_step(np.zeros(3), obj @ mask, mask), (obj @ mask) * mask)
    with pytest.raises(ValueError):
        spi_step(np.zeros(2), 1.0, mask)


def test_spi_steps_commute_and_increment_is_linear():
    obj = make_image("gradient", 4, 4).ravel()
    h1, h2 = hadamard_mask(16, 3), hadamard_mask(16, 9)
    a = spi_step(spi_step(np.zeros(16), obj @ h1, h1), obj @ h2, h2)
    b = spi_step(spi_step(np.zeros(16), obj @ h2, h2), obj @ h1, h1)
    np.testing.assert_allclose(a, b, atol=1e-15)
    sigma = np.linspace(-1, 1, 16)
    inc = lambda y: spi_step(sigma, y, h1) - sigma  # noqa: E731
    np.testing.assert_allclose(inc(0.3 + 0.5), inc(0.3) + inc(0.5), atol=1e-15)


def test_ogi_step_examples():
    rng = make_rng(12)
    obj = normalize(rng.uniform(0, 1, 16))
    mask = random_sign_mask(16, rng)
    y = obj @ mask
    np.testing.assert_allclose(ogi_step(np.zeros(16), y, mask), y / 16 * mask, atol=1e-15)
    np.testing.assert_allclose(ogi_step(np.zeros(16), y, mask, normalized=False), y * mask, atol=1e-15)
    np.testing.assert_allclose(ogi_step(obj, y, mask), obj, atol=1e-15)
    with pytest.raises(ValueError):
        ogi_step(np.zeros(3), 1.0, np.zeros(3))


def test_ogi_step_is_projection():
    rng = make_rng(13)
    for _ in range(100):
        sigma = rng.standard_normal(32)
        mask = random_sign_mask(32, rng)
        y = rng.standard_normal()
        once = ogi_step(sigma, y, mask)
        assert once @ mask == pytest.approx(y, abs=1e-12)
        np.testing.assert_allclose(ogi_step(once, y, mask), once, atol=1e-12)


def test_run_spi_zero_iterations():
    trace = run_spi(make_image("disk", 8, 8), [], "spi")
    assert len(trace) == 1 and trace.metric == [1.0]


def test_run_spi_full_hadamard_is_exact():
    obj = make_image("disk", 64, 64)
    trace = run_spi(obj, HadamardMasks(4096), "spi")
    assert len(trace) == 4097
    assert trace.final < 1e-10
    assert normalize(trace.estimate) @ obj.ravel() >= 1 - 1e-10


def test_ogi_beats_spi_on_random_masks():
    obj = make_image("disk", 16, 16)
    finals = {"spi": [], "ogi": []}
    for seed in range(5):
        masks = RandomMasks(256, 512, seed=seed)
        for variant in finals:
            finals[variant].append(run_spi(obj, masks, variant, seed=seed).metrics)
    spi = np.mean(finals["spi"], axis=0)
    ogi = np.mean(finals["ogi"], axis=0)
    assert ogi[-1] < spi[-1]
    # non-increasing in expectation: compare coarse windows of the mean curve
    windows = ogi[1:].reshape(-1, 64).mean(axis=1)
    assert np.all(np.diff(windows) < 0)


def test_run_spi_noise_depends_only_on_seed():
    obj = make_image("checker", 8, 8)
    masks = RandomMasks(64, 50, seed=1)
    a = run_spi(obj, masks, "spi", NoiseModel.gaussian(0.25), seed=3)
    b = run_spi(obj, masks, "spi", NoiseModel.gaussian(0.25), seed=3)
    c = run_spi(obj, masks, "spi", NoiseModel.gaussian(0.25), seed=4)
    assert a.metric == b.metric
    assert a.metric != c.metric
    with pytest.raises(ValueError):
        run_spi(obj, masks, "cgls")
