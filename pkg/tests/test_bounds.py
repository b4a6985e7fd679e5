"""Fidelity computations and the error-probability bounds built on them."""

import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import dense_circulant, random_psd_row
from qdetlim import (
    BandwidthWarning,
    BoundsReport,
    LorentzianPrior,
    NumericsError,
    Sinusoid,
    TimeGrid,
    TimeSeries,
    ValidationError,
    bounds_report,
    covariance_row,
    fidelity_optomech,
    fidelity_sinusoid,
    forward_transform,
    freq_integral,
    gamma_f_deterministic,
    gamma_f_stochastic,
    helstrom_bayes_bound,
    log_fidelity_deterministic_freq,
    log_fidelity_deterministic_timedomain,
    log_fidelity_optomech,
    log_fidelity_sinusoid,
    log_fidelity_stochastic_circulant,
    natural_units_detector,
    neyman_pearson_bound,
    np_curve,
    psd_to_covariance_row,
    render,
    resonant_burst,
)


def _cosine_spectrum(grid, amplitude, omega):
    return forward_transform(render(Sinusoid(amplitude, omega), grid))


# -- deterministic fidelity, frequency route ---------------------------------


def test_zero_waveform_has_unit_fidelity():
    grid = TimeGrid(0.0, 50.0, 128)
    spec = forward_transform(TimeSeries(grid, np.zeros(128)))
    assert log_fidelity_deterministic_freq(lambda w: np.ones_like(w), spec) == 0.0
    det = natural_units_detector()
    assert fidelity_optomech(det, spec) == 1.0
    assert gamma_f_deterministic(det, spec) == 0.0


def test_constant_psd_reduces_to_waveform_energy():
    # flat S_q = c: ln F = -(c/hbar^2) dt sum x_k^2 by Parseval
    grid = TimeGrid(0.0, 40.0, 512)
    rng = np.random.default_rng(3)
    x = TimeSeries(grid, rng.normal(size=512))
    c, hbar = 0.7, 1.3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BandwidthWarning)  # flat integrand by design
        got = log_fidelity_deterministic_freq(
            lambda w: c * np.ones_like(w), forward_transform(x), hbar
        )
    expected = -c * grid.dt * (x.values**2).sum() / hbar**2
    assert_allclose(got, expected, rtol=1e-10)


def test_negative_psd_and_bad_hbar_are_rejected():
    grid = TimeGrid(0.0, 10.0, 32)
    spec = forward_transform(TimeSeries(grid, np.ones(32)))
    with pytest.raises(ValidationError):
        log_fidelity_deterministic_freq(lambda w: -np.ones_like(w), spec)
    with pytest.raises(ValidationError):
        log_fidelity_deterministic_freq(lambda w: np.ones_like(w), spec, 0.0)


def test_frequency_route_matches_time_domain_surrogate():
    # narrowband burst well inside the window start, high-Q mechanics
    gm = 5e-5
    det = natural_units_detector(gamma_m=gm, gamma=50.0, omega0=25.0)
    grid = TimeGrid(0.0, 100.0 / gm, 2_000_000)
    unit = resonant_burst(grid, 1.0, carrier=1.0, center=80.0, width=20.0)
    log_unit = log_fidelity_optomech(det, forward_transform(unit))
    amp = 1.0 / np.sqrt(abs(log_unit))
    x = TimeSeries(grid, amp * unit.values)
    sys_, state = det.stationary_equivalent_linsys()
    log_time = log_fidelity_deterministic_timedomain(sys_, state, x)
    log_freq = amp**2 * log_unit
    assert abs(log_time - log_freq) <= 0.02 * abs(log_freq)


# -- sinusoid shortcut --------------------------------------------------------


def test_sinusoid_fidelity_basics():
    assert fidelity_sinusoid(2.0, 0.0, 10.0) == 1.0
    base = log_fidelity_sinusoid(2.0, 0.3, 10.0)
    doubled = log_fidelity_sinusoid(2.0, 0.6, 10.0)
    assert_allclose(doubled, 4.0 * base, rtol=1e-12)
    with pytest.raises(ValidationError):
        log_fidelity_sinusoid(-1.0, 0.3, 10.0)
    with pytest.raises(ValidationError):
        log_fidelity_sinusoid(1.0, 0.3, 0.0)


def test_sinusoid_matches_frequency_route_on_long_window():
    # integer number of periods, T Omega = 256 pi: two exact spectral lines
    det = natural_units_detector()
    omega, amp = 1.0, 0.02
    grid = TimeGrid(0.0, 256.0 * np.pi, 4096)
    log_freq = log_fidelity_optomech(det, _cosine_spectrum(grid, amp, omega))
    s_q = det.position_psd(np.array([omega]))[0]
    log_sin = log_fidelity_sinusoid(s_q, amp, grid.duration)
    assert_allclose(log_freq, log_sin, rtol=0.01)
    assert_allclose(log_freq, log_sin, rtol=1e-9)  # exact on-grid lines


def test_gamma_f_deterministic_sinusoid_and_scaling():
    det = natural_units_detector()
    omega, amp = 1.0, 0.05
    grid = TimeGrid(0.0, 200.0 * np.pi, 4096)
    spec = _cosine_spectrum(grid, amp, omega)
    gamma = gamma_f_deterministic(det, spec)
    s_q = det.position_psd(np.array([omega]))[0]
    assert_allclose(gamma, s_q * amp**2 / 2.0, rtol=1e-9)

    scaled = _cosine_spectrum(grid, 3.0 * amp, omega)
    assert_allclose(gamma_f_deterministic(det, scaled), 9.0 * gamma, rtol=1e-12)


def test_off_resonance_fidelity_follows_transfer_magnitude():
    det = natural_units_detector()
    grid = TimeGrid(0.0, 200.0 * np.pi, 4096)  # both lines on grid
    on = log_fidelity_optomech(det, _cosine_spectrum(grid, 0.01, 1.0))
    off = log_fidelity_optomech(det, _cosine_spectrum(grid, 0.01, 1.5))
    k_ratio = (
        np.abs(det.k4(np.array([1.5]))[0]) ** 2 / np.abs(det.k4(np.array([1.0]))[0]) ** 2
    )
    assert_allclose(off / on, k_ratio, rtol=1e-9)


def test_weak_field_fidelity_tends_to_one():
    det = natural_units_detector(mean_field=1e-8)
    grid = TimeGrid(0.0, 200.0 * np.pi, 4096)
    log_f = log_fidelity_optomech(det, _cosine_spectrum(grid, 0.1, 1.0))
    assert abs(log_f) < 1e-10
    assert fidelity_optomech(det, _cosine_spectrum(grid, 0.1, 1.0)) == pytest.approx(1.0, abs=1e-10)


# -- stochastic fidelity ------------------------------------------------------


def test_zero_prior_stochastic_fidelity():
    row_q = np.array([1.0, 0.2, 0.1, 0.2])
    assert log_fidelity_stochastic_circulant(row_q, np.zeros(4), 0.5) == 0.0
    grid = TimeGrid(0.0, 100.0, 256)
    res = gamma_f_stochastic(lambda w: np.ones_like(w), lambda w: np.zeros_like(w), grid)
    assert res.gamma_f == 0.0
    assert res.fidelity == 1.0
    assert res.log_fidelity == -res.gamma_f * grid.duration


def test_two_sample_circulant_closed_form():
    a, b, dt, hbar = 0.7, 1.9, 0.3, 1.1
    log_f = log_fidelity_stochastic_circulant(
        np.array([a, 0.0]), np.array([b, 0.0]), dt, hbar
    )
    assert_allclose(math.exp(log_f), 1.0 / (1.0 + 2.0 * dt**2 * a * b / hbar**2), rtol=1e-12)


def test_circulant_fidelity_matches_dense_determinant():
    dt, hbar = 0.3, 0.7
    rng = np.random.default_rng(11)
    for n in (2, 3, 8, 17, 64):
        q_row = random_psd_row(rng, n, scale=2.0)
        x_row = random_psd_row(rng, n, scale=1.5)
        log_f = log_fidelity_stochastic_circulant(q_row, x_row, dt, hbar)
        m = np.eye(n) + (2.0 * dt**2 / hbar**2) * dense_circulant(q_row) @ dense_circulant(x_row)
        sign, logdet = np.linalg.slogdet(m)
        assert sign > 0
        assert_allclose(log_f, -0.5 * logdet, rtol=1e-8, atol=1e-12)


def test_inconsistent_covariance_rows_are_rejected():
    q_row = np.array([10.0, 0.0, 0.0, 0.0])
    x_row = np.array([0.1, 0.2, 0.1, 0.2])  # circulant spectrum dips to -0.2
    with pytest.raises(NumericsError):
        log_fidelity_stochastic_circulant(q_row, x_row, 1.0)
    with pytest.raises(ValidationError):
        log_fidelity_stochastic_circulant(q_row, np.zeros(6), 1.0)
    with pytest.raises(ValidationError):
        log_fidelity_stochastic_circulant(q_row, q_row, 0.0)


def test_weak_signal_exponent_linearizes():
    grid = TimeGrid(0.0, 200.0, 4096)
    s_q = lambda w: 1.0 / (1.0 + w**2)
    s_x = lambda w: 1e-7 / (1.0 + (w / 2.0) ** 2)
    res = gamma_f_stochastic(s_q, s_x, grid)
    linear = freq_integral(s_q(grid.omegas()) * s_x(grid.omegas()), grid)
    assert_allclose(res.gamma_f, linear, rtol=1e-4)


def test_exponent_route_matches_circulant_window_fidelity():
    # psd_to_covariance_row makes the circulant eigenvalues reproduce the PSD
    # samples exactly, so the two routes agree to rounding, far inside the
    # 1 percent window tolerance.
    grid = TimeGrid(0.0, 500.0, 4096)  # 100 correlation times of the prior
    s_q = lambda w: 0.8 / (1.0 + (w / 0.5) ** 2)
    prior = LorentzianPrior(1.1, 0.2)
    res = gamma_f_stochastic(s_q, prior.psd, grid)
    q_row = psd_to_covariance_row(s_q(grid.omegas()), grid)
    x_row = covariance_row(prior, grid)
    log_circ = log_fidelity_stochastic_circulant(q_row, x_row, grid.dt)
    assert_allclose(log_circ, res.log_fidelity, rtol=1e-9)
    assert abs(log_circ - res.log_fidelity) <= 0.01 * abs(res.log_fidelity)


def test_stochastic_psds_must_be_nonnegative():
    grid = TimeGrid(0.0, 100.0, 64)
    with pytest.raises(ValidationError):
        gamma_f_stochastic(lambda w: -np.ones_like(w), lambda w: np.ones_like(w), grid)


# -- Bayes bound --------------------------------------------------------------


def test_helstrom_bound_reference_values():
    assert helstrom_bayes_bound(0.0, 0.5) == 0.0
    assert helstrom_bayes_bound(1.0, 0.5) == 0.5
    assert_allclose(helstrom_bayes_bound(0.5, 0.5), 0.5 * (1.0 - 1.0 / math.sqrt(2.0)), rtol=1e-12)
    with pytest.raises(ValidationError):
        helstrom_bayes_bound(1.5, 0.5)
    with pytest.raises(ValidationError):
        helstrom_bayes_bound(0.5, -0.1)


def test_helstrom_bound_matches_qubit_brute_force():
    # two pure qubit states with the prescribed overlap; the optimal
    # projective measurement achieves 0.5 (1 - ||p1 rho1 - p0 rho0||_1)
    for f in (0.1, 0.5, 0.9):
        c = math.sqrt(f)
        psi0 = np.array([1.0, 0.0])
        psi1 = np.array([c, math.sqrt(1.0 - f)])
        for p0 in (0.1, 0.3, 0.5, 0.62):
            gamma = (1.0 - p0) * np.outer(psi1, psi1) - p0 * np.outer(psi0, psi0)
            brute = 0.5 * (1.0 - np.abs(np.linalg.eigvalsh(gamma)).sum())
            assert_allclose(helstrom_bayes_bound(f, p0), brute, rtol=1e-12, atol=1e-15)


def test_helstrom_bound_monotone_and_peaked_at_even_prior():
    fs = np.linspace(0.0, 1.0, 101)
    vals = [helstrom_bayes_bound(f, 0.3) for f in fs]
    assert np.all(np.diff(vals) >= -1e-15)
    p0s = np.linspace(0.01, 0.99, 99)
    for f in (0.3, 0.9):
        over_p0 = [helstrom_bayes_bound(f, p0) for p0 in p0s]
        assert helstrom_bayes_bound(f, 0.5) >= max(over_p0) - 1e-15
        assert np.all(np.array(over_p0) <= np.minimum(p0s, 1.0 - p0s) + 1e-15)


# -- Neyman-Pearson bound -----------------------------------------------------


def test_np_bound_reference_values():
    for f in (0.2, 0.5, 0.8):
        assert neyman_pearson_bound(f, f) == 0.0
        assert neyman_pearson_bound(f, f + 0.1 if f < 0.9 else 1.0) == 0.0
        assert_allclose(neyman_pearson_bound(f, 0.0), f, rtol=1e-12)
    assert neyman_pearson_bound(1.0, 0.0) == 1.0
    assert neyman_pearson_bound(0.4, 0.1, interchanged=True) == neyman_pearson_bound(0.4, 0.1)


def test_np_bound_continuous_and_monotone():
    f = 0.5
    assert neyman_pearson_bound(f, f - 1e-4) < 1e-6
    p10s = np.linspace(0.0, f, 200)
    vals = [neyman_pearson_bound(f, p) for p in p10s]
    assert np.all(np.diff(vals) <= 1e-15)


def test_np_curve_shape():
    curve = np_curve(0.6)
    assert len(curve) == 101
    p10s, p01s = zip(*curve)
    assert p10s[0] == 0.0 and p10s[-1] == 1.0
    assert_allclose(p01s[0], 0.6, rtol=1e-12)
    assert p01s[-1] == 0.0
    assert np.all(np.diff(p01s) <= 1e-15)
    with pytest.raises(ValidationError):
        np_curve(0.6, n_points=1)


# -- report assembly ----------------------------------------------------------


def test_bounds_report_wiring():
    report = bounds_report(-0.7, duration=10.0, p0=0.3)
    assert isinstance(report, BoundsReport)
    assert_allclose(report.fidelity, math.exp(-0.7), rtol=1e-15)
    assert_allclose(report.gamma_f, 0.07, rtol=1e-12)
    assert report.bayes_bound == helstrom_bayes_bound(report.fidelity, 0.3)
    assert report.bayes_bound <= min(0.3, 0.7)
    assert len(report.np_points) == 101
    p01s = [p01 for _, p01 in report.np_points]
    assert np.all(np.diff(p01s) <= 1e-15)
    for p10, p01 in report.np_points:
        if p10 >= report.fidelity:
            assert p01 == 0.0
    d = report.to_dict()
    assert set(d) == {"fidelity", "log_fidelity", "gamma_f", "p0", "bayes_bound", "np_curve"}
    assert d["np_curve"][0] == [0.0, p01s[0]]
    with pytest.raises(ValidationError):
        bounds_report(-0.7, duration=10.0, p0=1.3)
