import numpy as np
import pytest

from prida import robustness, synth
from prida.robustness import NoiseSpec


def test_noise_spec_validation():
    NoiseSpec(sigma=0.1)
    with pytest.raises(ValueError):
        NoiseSpec(sigma=-0.1)
    with pytest.raises(ValueError):
        NoiseSpec(kind="poisson")


def test_add_noise_seeded_and_unclamped():
    img = np.full((8, 8), 0.01)
    spec = NoiseSpec(sigma=0.5, seed=3)
    a = robustness.add_noise(img, spec)
    b = robustness.add_noise(img, spec)
    assert np.array_equal(a, b)
    assert a.min() < 0.0  # noise is not clamped
    c = robustness.add_noise(img, NoiseSpec(sigma=0.5, seed=4))
    assert not np.array_equal(a, c)


def test_add_noise_sigma_zero_copies():
    img = np.random.default_rng(0).uniform(size=(4, 4))
    out = robustness.add_noise(img, NoiseSpec(sigma=0.0))
    assert np.array_equal(out, img)
    assert out is not img


def test_stability_trial_requires_uniform_start():
    k0 = np.array([0.6, 0.4])
    with pytest.raises(ValueError):
        robustness.stability_trial(k0, np.zeros(2), np.zeros(2), 0.1)


def test_stability_trial_zero_noise():
    k0 = np.full(5, 0.2)
    lhs, rhs = robustness.stability_trial(k0, np.ones(5), np.zeros(5), 0.3)
    assert lhs == 0.0 and rhs == 0.0


def test_stability_trial_tanh_oracle():
    # s = 2, g = 0, noise (a, 0): direct evaluation gives
    # lhs = 2 * (1/2 - e^{-eta a}/(1 + e^{-eta a})) = 2 * tanh(eta a / 2) / 2 ... * 2
    k0 = np.array([0.5, 0.5])
    for a in (0.01, 0.5, 2.0):
        for eta in (0.05, 0.3):
            lhs, rhs = robustness.stability_trial(k0, np.zeros(2), np.array([a, 0.0]), eta)
            direct = 2.0 * abs(0.5 - np.exp(-eta * a) / (1.0 + np.exp(-eta * a)))
            assert abs(lhs - direct) < 1e-12
            assert lhs <= rhs + 1e-12


def test_stability_bound_random_trials():
    rng = np.random.default_rng(1)
    for _ in range(500):
        s = int(rng.integers(2, 100))
        k0 = np.full(s, 1.0 / s)
        g = rng.normal(0, 10.0 ** rng.uniform(-2, 2), size=s)
        abar = 10.0 ** rng.uniform(-4, 0)
        eta = rng.uniform(0.0, 1.0) / abar
        av = rng.uniform(-abar, abar, size=s)
        lhs, rhs = robustness.stability_trial(k0, g, av, eta)
        assert lhs <= rhs + 1e-12


def test_noise_sweep_row_schema():
    f_true = synth.make_test_image(24, seed=0)
    k_true = synth.make_delta_kernel(3)
    from prida.types import SolverConfig
    rows = robustness.noise_sweep(f_true, k_true, [0.0],
                                  cfg=SolverConfig(max_iters=20), seed=0)
    assert len(rows) == 1
    row = rows[0]
    assert set(row) == {"sigma", "endpoint_error", "psnr", "runtime_s"}
    assert row["sigma"] == 0.0
    # loose bound on this miniature instance; the tight delta-recovery
    # requirement is exercised at full size in the acceptance suite
    assert row["endpoint_error"] <= 1e-2
