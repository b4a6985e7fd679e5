"""Waveform rendering, prior covariance rows, Gaussian-process sampling."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qdetlim import (
    FlatBandPrior,
    GaussianPulse,
    GridError,
    LorentzianPrior,
    SampledWaveform,
    Sinusoid,
    TimeGrid,
    TimeSeries,
    ValidationError,
    circulant_eigenvalues,
    covariance_row,
    freq_integral,
    render,
    resonant_burst,
    sample_gp,
)


# -- deterministic rendering ------------------------------------------------


def test_zero_amplitude_sinusoid_renders_to_zero():
    grid = TimeGrid(0.0, 10.0, 64)
    out = render(Sinusoid(0.0, 1.0), grid)
    assert np.all(out.values == 0.0)


def test_sinusoid_renders_pointwise():
    grid = TimeGrid(0.0, 16.0 * np.pi, 256)
    w = Sinusoid(1.4, 0.5, 0.0)
    out = render(w, grid)
    assert np.array_equal(out.values, 1.4 * np.cos(0.5 * grid.times()))


def test_gaussian_pulse_integrates_to_area():
    grid = TimeGrid(0.0, 200.0, 2048)  # dt ~ 0.1, width 10 dt and up
    for width in (1.0, 4.0, 10.0):
        out = render(GaussianPulse(area=2.5, center=100.0, width=width), grid)
        assert_allclose(grid.dt * out.values.sum(), 2.5, rtol=1e-6)


def test_sampled_waveform_requires_its_own_grid():
    grid = TimeGrid(0.0, 4.0, 16)
    w = SampledWaveform(TimeSeries(grid, np.arange(16.0)))
    assert render(w, grid) is w.ts
    with pytest.raises(GridError):
        render(w, TimeGrid(0.0, 4.0, 32))


def test_resonant_burst_has_compact_support():
    grid = TimeGrid(0.0, 400.0, 4096)
    out = resonant_burst(grid, 0.3, carrier=1.0, center=80.0, width=10.0)
    t = grid.times()
    outside = np.abs(t - 80.0) > 40.0
    assert np.all(out.values[outside] == 0.0)
    inside = np.abs(t - 80.0) <= 40.0
    expected = 0.3 * np.exp(-0.5 * ((t - 80.0) / 10.0) ** 2) * np.cos(t)
    assert_allclose(out.values[inside], expected[inside], rtol=1e-12)


def test_waveform_parameter_validation():
    with pytest.raises(ValidationError):
        Sinusoid(-1.0, 1.0)
    with pytest.raises(ValidationError):
        GaussianPulse(area=1.0, center=0.0, width=0.0)
    with pytest.raises(ValidationError):
        LorentzianPrior(-0.1, 1.0)
    with pytest.raises(ValidationError):
        FlatBandPrior(1.0, 2.0, 1.0)


# -- covariance rows --------------------------------------------------------


def test_zero_strength_prior_has_zero_row():
    grid = TimeGrid(0.0, 100.0, 128)
    assert np.all(covariance_row(LorentzianPrior(0.0, 0.2), grid) == 0.0)


def test_lorentzian_row_zero_lag_variance():
    # sigma_x(0) = s0 omega_c / 2 in the continuum; resolved, long window
    s0, om_c = 2.0, 0.1
    grid = TimeGrid(0.0, 1000.0, 2048)  # omega_c T = 100, dt omega_c = 0.049
    row = covariance_row(LorentzianPrior(s0, om_c), grid)
    assert_allclose(row[0], s0 * om_c / 2.0, rtol=0.02)


def test_covariance_row_is_even_and_psd():
    grid = TimeGrid(0.0, 500.0, 256)
    for prior in (LorentzianPrior(1.3, 0.2), FlatBandPrior(0.7, 0.1, 0.8)):
        row = covariance_row(prior, grid)
        assert np.array_equal(row, np.roll(row[::-1], 1))
        eigs = circulant_eigenvalues(row).real
        assert eigs.min() >= -1e-9 * row[0]


def test_flat_band_psd_shape_and_variance():
    prior = FlatBandPrior(0.5, 0.2, 1.0)
    assert prior.psd(0.1) == 0.0
    assert prior.psd(0.5) == 0.5
    assert prior.psd(-0.5) == 0.5
    assert prior.psd(1.5) == 0.0
    grid = TimeGrid(0.0, 600.0, 1024)
    row = covariance_row(prior, grid)
    assert_allclose(row[0], freq_integral(prior.psd(grid.omegas()), grid), rtol=1e-12)


def test_priors_must_be_resolved_by_the_grid():
    grid = TimeGrid(0.0, 10.0, 16)  # Nyquist ~ 5
    with pytest.raises(ValidationError):
        covariance_row(LorentzianPrior(1.0, 6.0), grid)
    with pytest.raises(ValidationError):
        covariance_row(FlatBandPrior(1.0, 0.0, 5.5), grid)


# -- Gaussian-process sampling ----------------------------------------------


def test_zero_prior_samples_to_zero():
    grid = TimeGrid(0.0, 100.0, 64)
    for seed in (0, 1, 99):
        assert np.all(sample_gp(LorentzianPrior(0.0, 0.2), grid, seed).values == 0.0)


def test_equal_seeds_are_bit_identical():
    grid = TimeGrid(0.0, 160.0, 32)
    prior = LorentzianPrior(2.0, 0.1)
    a = sample_gp(prior, grid, 7).values
    b = sample_gp(prior, grid, 7).values
    assert np.array_equal(a, b)
    c = sample_gp(prior, grid, 8).values
    assert not np.array_equal(a, c)


def test_sample_moments_match_covariance_row():
    grid = TimeGrid(0.0, 160.0, 32)
    prior = LorentzianPrior(2.0, 0.1)
    row = covariance_row(prior, grid)
    draws = 100_000
    paths = np.array([sample_gp(prior, grid, seed).values for seed in range(draws)])
    assert np.all(np.isfinite(paths))

    # variance at a fixed sample
    var_hat = paths[:, 5].var()
    var_se = row[0] * np.sqrt(2.0 / draws)
    assert abs(var_hat - row[0]) <= 3.0 * var_se

    # lag-1 covariance at a fixed sample pair
    prod = paths[:, 5] * paths[:, 6]
    cov_hat = prod.mean()
    cov_se = prod.std(ddof=1) / np.sqrt(draws)
    assert abs(cov_hat - row[1]) <= 3.0 * cov_se

    # zero mean everywhere over the first 10^4 draws
    mean = paths[:10_000].mean(axis=0)
    assert np.abs(mean).max() < 4.0 * np.sqrt(row[0] / 10_000)
