"""Gaussian surrogate fitting and belief updates."""
import numpy as np
import pytest

from qpde.fitting import (GaussianEstimate, fit_gaussian, gaussian_model,
                          multiply_gaussians)


def test_recovers_exact_gaussian_parameters():
    x = np.linspace(-2.0, 6.0, 21)
    y = gaussian_model(x, offset=0.5, amplitude=0.5, mu=2.0, sigma=1.0)
    fit = fit_gaussian(x, y)
    assert fit.converged
    assert fit.mu == pytest.approx(2.0, abs=1e-6)
    assert fit.sigma == pytest.approx(1.0, abs=1e-6)
    assert fit.amplitude == pytest.approx(0.5, abs=1e-6)
    assert fit.offset == pytest.approx(0.5, abs=1e-6)


def test_recovery_with_asymmetric_window_and_low_contrast():
    x = np.linspace(0.0, 4.0, 31)
    y = gaussian_model(x, offset=0.31, amplitude=0.22, mu=2.6, sigma=0.5)
    fit = fit_gaussian(x, y)
    assert fit.converged
    assert fit.mu == pytest.approx(2.6, abs=1e-5)
    assert fit.sigma == pytest.approx(0.5, abs=1e-4)


def test_constant_data_falls_back():
    x = np.linspace(-1.0, 1.0, 11)
    fit = fit_gaussian(x, np.full(11, 0.5), fallback_sigma=3.0)
    assert not fit.converged
    assert fit.sigma == 3.0
    assert fit.mu == pytest.approx(0.0, abs=1e-12)


def test_fallback_centroid_weights_above_median():
    x = np.linspace(0.0, 10.0, 11)
    y = np.zeros(11)
    y[7] = 1e-10  # effectively degenerate
    fit = fit_gaussian(x, y, fallback_sigma=1.5)
    assert not fit.converged


def test_cosine_sweep_peak_location():
    # Interference fringe for a gap of 2.0 scanned across a wide window.
    x = np.linspace(-10.0, 10.0, 21)
    y = 0.5 * (1.0 + np.cos((2.0 - x) * 0.2))
    fit = fit_gaussian(x, y)
    assert fit.converged
    assert fit.mu == pytest.approx(2.0, abs=0.1)


def test_needs_five_points():
    with pytest.raises(ValueError, match="5"):
        fit_gaussian(np.array([0.0, 1.0, 2.0]), np.array([0.1, 0.9, 0.1]))


def test_amplitude_respects_interference_cap():
    x = np.linspace(-4.0, 4.0, 41)
    y = 0.5 * (1.0 + np.cos(x * 1.5))
    fit = fit_gaussian(x, y)
    assert fit.converged
    assert 0 < fit.amplitude <= 0.5
    assert 0 <= fit.offset <= 1.0


def test_multiply_gaussians_symmetric_case():
    out = multiply_gaussians(GaussianEstimate(3.0, 2.0), GaussianEstimate(3.0, 2.0))
    assert out.mu == pytest.approx(3.0)
    assert out.sigma == pytest.approx(2.0 / np.sqrt(2.0))


def test_multiply_gaussians_closed_form():
    out = multiply_gaussians(GaussianEstimate(0.0, 10.0), GaussianEstimate(2.0, 5.0))
    assert out.mu == pytest.approx(1.6)
    assert out.sigma == pytest.approx(np.sqrt(20.0))


def test_multiply_gaussians_always_shrinks():
    rng = np.random.default_rng(6)
    for _ in range(200):
        prior = GaussianEstimate(rng.normal(), rng.uniform(0.1, 10))
        fit = GaussianEstimate(rng.normal(), rng.uniform(0.1, 10))
        out = multiply_gaussians(prior, fit)
        assert out.sigma < min(prior.sigma, fit.sigma)


def test_gaussian_estimate_requires_positive_sigma():
    with pytest.raises(ValueError):
        GaussianEstimate(0.0, 0.0)
    with pytest.raises(ValueError):
        GaussianEstimate(0.0, -1.0)
