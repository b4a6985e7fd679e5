"""Reduced-scale oracle battery behind ``qdetlim selftest``.

Every check pits a package routine against an independently coded oracle
(dense linear algebra, closed forms, antiderivatives, Monte Carlo moments)
at sizes that keep the whole battery within a few seconds.  No test
framework is required; the battery prints one line per check and returns a
process exit code.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
import scipy.linalg
from numpy.testing import assert_allclose

from . import _rng
from .bounds import (
    gamma_f_deterministic,
    gamma_f_stochastic,
    helstrom_bayes_bound,
    log_fidelity_optomech,
    log_fidelity_stochastic_circulant,
)
from .errors import BandwidthWarning
from .linsys import log_fidelity_deterministic_timedomain, position_autocovariance
from .optomech import natural_units_detector
from .receivers import (
    chernoff_exponent_stochastic,
    homodyne_error_probs,
    homodyne_snr,
    kennedy_p01_deterministic,
    simulate_homodyne_mc,
    simulate_kennedy_mc,
)
from .scenario import canonical_payload_bytes, run_bounds, run_receivers, scenario_from_dict, validate_run_output
from .spectral import (
    TimeGrid,
    TimeSeries,
    circulant_eigenvalues,
    forward_transform,
    freq_integral,
    inverse_transform,
    matrix_exponential,
    psd_to_covariance_row,
)
from .waveform import GaussianPulse, LorentzianPrior, covariance_row, render


def _check_parseval():
    grid = TimeGrid(2.0, 10.0, 256)
    rng = np.random.default_rng(11)
    x = TimeSeries(grid, rng.standard_normal(grid.n))
    spec = forward_transform(x)
    lhs = grid.dt * np.sum(np.asarray(x.values) ** 2)
    with warnings.catch_warnings():
        # a white series has no in-band decay; that is fine for Parseval
        warnings.simplefilter("ignore", BandwidthWarning)
        rhs = freq_integral(np.abs(spec.values) ** 2, grid)
    assert_allclose(rhs, lhs, rtol=1e-10)
    back = inverse_transform(spec)
    assert_allclose(np.asarray(back.values).real, x.values, atol=1e-10 * np.abs(x.values).max())


def _check_lorentzian_quadrature():
    s0, omega_c = 2.0, 1.0
    grid = TimeGrid(0.0, 1638.4, 8192)
    omegas = grid.omegas()
    psd = s0 * omega_c**2 / (omegas**2 + omega_c**2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BandwidthWarning)
        got = freq_integral(psd, grid)
    lo, hi = omegas.min() - 0.5 * (omegas[1] - omegas[0]), omegas.max() + 0.5 * (omegas[1] - omegas[0])
    oracle = s0 * omega_c / (2.0 * np.pi) * (np.arctan(hi / omega_c) - np.arctan(lo / omega_c))
    assert_allclose(got, oracle, rtol=1e-3)


def _check_circulant_eigs():
    rng = np.random.default_rng(7)
    row = rng.random(16)
    row = 0.5 * (row + np.roll(row[::-1], 1))  # enforce row[k] == row[n-k]
    got = np.sort(circulant_eigenvalues(row))
    dense = np.sort(np.linalg.eigvalsh(scipy.linalg.circulant(row)))
    assert_allclose(got, dense, atol=1e-9 * max(1.0, np.abs(dense).max()))


def _check_matrix_exponential():
    m, omega = 1.7, 2.3
    g = np.array([[0.0, 1.0 / m], [-m * omega**2, 0.0]])
    for t in (0.0, 0.3, 2.0):
        c, s = np.cos(omega * t), np.sin(omega * t)
        oracle = np.array([[c, s / (m * omega)], [-m * omega * s, c]])
        assert_allclose(matrix_exponential(g, t), oracle, atol=1e-10)


def _check_stationary_state():
    det = natural_units_detector()
    sys_, state = det.stationary_equivalent_linsys()
    s_f = det.hbar**2 * abs(det.transfer("K2", det.omega_m)) ** 2 * det.s_xi
    sigma_qq = s_f / (2.0 * det.mass**2 * det.omega_m**2 * det.gamma_m)
    sigma_pp = s_f / (2.0 * det.gamma_m)
    assert_allclose(state.cov[0, 0], sigma_qq, rtol=1e-9)
    assert_allclose(state.cov[1, 1], sigma_pp, rtol=1e-9)
    assert_allclose(state.cov[0, 1], 0.0, atol=1e-9 * sigma_pp)


def _check_timedomain_fidelity_bruteforce():
    det = natural_units_detector()
    sys_, state = det.stationary_equivalent_linsys()
    grid = TimeGrid(0.0, 12.0, 48)
    x = render(GaussianPulse(area=0.4, center=4.0, width=1.0), grid)
    got = log_fidelity_deterministic_timedomain(sys_, state, x)
    t = grid.times()
    vals = np.asarray(x.values)
    form = 0.0
    for a in range(grid.n):
        if vals[a] == 0.0:
            continue
        for b in range(grid.n):
            if vals[b] == 0.0:
                continue
            form += vals[a] * vals[b] * position_autocovariance(sys_, state, t[a], t[b], grid.t_i)
    oracle = -((grid.dt / det.hbar) ** 2) * form
    assert_allclose(got, oracle, rtol=1e-9)


def _check_stochastic_determinant():
    det = natural_units_detector()
    grid = TimeGrid(0.0, 240.0, 48)
    prior = LorentzianPrior(s0=0.5, omega_c=0.2)
    row_q = psd_to_covariance_row(det.position_psd(grid.omegas()), grid)
    row_x = covariance_row(prior, grid)
    got = log_fidelity_stochastic_circulant(row_q, row_x, grid.dt, det.hbar)
    m = np.eye(grid.n) + (2.0 * grid.dt**2 / det.hbar**2) * scipy.linalg.circulant(
        row_q
    ) @ scipy.linalg.circulant(row_x)
    sign, logabs = np.linalg.slogdet(m)
    assert sign > 0
    assert_allclose(got, -0.5 * logabs, rtol=1e-8)


def _check_half_exponent():
    det = natural_units_detector()
    grid = TimeGrid(0.0, 400.0, 4096)
    spec = forward_transform(render(GaussianPulse(area=8.0, center=100.0, width=8.0), grid))
    gamma_f = gamma_f_deterministic(det, spec)
    gamma_hom = homodyne_snr(det, spec) / grid.duration
    assert abs(gamma_hom - gamma_f / 2.0) <= 1e-9 * gamma_f
    det2 = natural_units_detector(s_eta_excess=3.0)
    gamma_hom2 = homodyne_snr(det2, spec) / grid.duration
    assert_allclose(gamma_hom2, gamma_f / 6.0, rtol=1e-9)


def _check_kennedy_routes():
    det = natural_units_detector()
    grid = TimeGrid(0.0, 400.0, 16384)
    x = render(GaussianPulse(area=8.0, center=20.0, width=3.0), grid)
    res = kennedy_p01_deterministic(det, x)
    assert res.route_mismatch <= 0.01
    spec = forward_transform(x)
    assert_allclose(math.log(res.p01), log_fidelity_optomech(det, spec), rtol=1e-12)


def _check_chernoff():
    det = natural_units_detector()
    grid = TimeGrid(0.0, 800.0, 2048)
    prior = LorentzianPrior(s0=1e-6, omega_c=0.2)
    omegas = grid.omegas()
    r = np.abs(det.k4(omegas)) ** 2 * prior.psd(omegas) / det.s_eta
    assert r.max() <= 1e-3
    res = chernoff_exponent_stochastic(det, prior, grid)
    weak = freq_integral(r**2, grid) / 16.0
    assert_allclose(res.gamma, weak, rtol=0.01)
    assert 0.45 <= res.s_star <= 0.55


def _check_bayes_bound_shape():
    assert helstrom_bayes_bound(1.0, 0.5) == 0.5
    assert helstrom_bayes_bound(0.0, 0.5) == 0.0
    assert_allclose(helstrom_bayes_bound(0.5, 0.5), 0.5 * (1 - math.sqrt(0.5)), rtol=1e-12)
    p10, p01 = homodyne_error_probs(1.0, 0.0)
    assert_allclose(p10, 0.07864960352514257, rtol=1e-12)
    assert p10 == p01


def _mc_scenario_grid():
    det = natural_units_detector()
    grid = TimeGrid(0.0, 400.0, 256)
    return det, grid


def _check_homodyne_mc():
    det, grid = _mc_scenario_grid()
    base = GaussianPulse(area=1.0, center=200.0, width=10.0)
    sigma_base = math.sqrt(homodyne_snr(det, forward_transform(render(base, grid))))
    pulse = GaussianPulse(area=1.0 / sigma_base, center=200.0, width=10.0)
    result = simulate_homodyne_mc(det, pulse, grid, 20000, 0.0, seed=5)
    expected = 0.5 * math.erfc(1.0)
    se = math.sqrt(expected * (1 - expected) / 20000)
    assert abs(result.mc.p10_hat - expected) <= 3 * se
    assert abs(result.mc.p01_hat - expected) <= 3 * se


def _check_kennedy_mc():
    det, grid = _mc_scenario_grid()
    base = GaussianPulse(area=1.0, center=200.0, width=10.0)
    spec = forward_transform(render(base, grid))
    e_base = -log_fidelity_optomech(det, spec)
    pulse = GaussianPulse(area=math.sqrt(2.0 / e_base), center=200.0, width=10.0)
    result = simulate_kennedy_mc(det, pulse, grid, 20000, seed=9)
    expected = math.exp(-2.0)
    se = math.sqrt(expected * (1 - expected) / 20000)
    assert result.p10 == 0.0
    assert abs(result.mc.p01_hat - expected) <= 3 * se


def _check_run_determinism():
    doc = {
        "schema_version": 1,
        "detector": {
            "gamma": 5.0,
            "omega0": 2.5,
            "cav_length": 1.0,
            "mean_field": 1.0,
            "mass": 1.0,
            "omega_m": 1.0,
            "gamma_m": 0.05,
        },
        "grid": {"t_i": 0.0, "t_f": 500.0, "n": 2048},
        "waveform": {"kind": "lorentzian", "s0": 0.5, "omega_c": 0.2},
        "seed": 3,
        "trials": 2000,
    }
    sc = scenario_from_dict(doc)
    out1 = run_receivers(sc, mode="both")
    out2 = run_receivers(sc, mode="both")
    validate_run_output(out1)
    assert canonical_payload_bytes(out1) == canonical_payload_bytes(out2)
    zero = dict(doc, waveform={"kind": "sinusoid", "amplitude": 0.0, "omega": 1.0})
    b = run_bounds(scenario_from_dict(zero))
    assert b["bounds"]["fidelity"] == 1.0
    assert b["bounds"]["bayes_bound"] == 0.5


def _check_spectrum_synthesis_moments():
    grid = TimeGrid(0.0, 320.0, 64)
    prior = LorentzianPrior(s0=1.0, omega_c=0.2)
    psd_nat = prior.psd(grid.natural_omegas())
    rng = _rng.block_generator(0, _rng.stream_tag("selftest-moments"), 0)
    coeffs = _rng.gaussian_spectrum_coeffs(psd_nat, grid.duration, rng, 4000)
    second = (np.abs(coeffs) ** 2).mean(axis=0)
    expected = grid.duration * psd_nat
    assert np.max(np.abs(second / expected - 1.0)) < 0.08
    paths = _rng.coeffs_to_paths(coeffs, grid.duration)
    var_target = covariance_row(prior, grid)[0]
    assert abs(paths.var() / var_target - 1.0) < 0.05


CHECKS = [
    ("transform round trip and exact Parseval", _check_parseval),
    ("frequency quadrature vs Lorentzian antiderivative", _check_lorentzian_quadrature),
    ("circulant eigenvalues vs dense eigendecomposition", _check_circulant_eigs),
    ("matrix exponential vs closed-form oscillator propagator", _check_matrix_exponential),
    ("stationary covariance vs closed form", _check_stationary_state),
    ("time-domain fidelity vs brute-force double sum", _check_timedomain_fidelity_bruteforce),
    ("circulant fidelity vs dense determinant", _check_stochastic_determinant),
    ("homodyne exponent is half the fidelity exponent", _check_half_exponent),
    ("Kennedy energy routes agree", _check_kennedy_routes),
    ("Chernoff endpoints and weak-signal limit", _check_chernoff),
    ("bound and erfc frozen values", _check_bayes_bound_shape),
    ("homodyne Monte Carlo matches erfc formulas", _check_homodyne_mc),
    ("Kennedy Monte Carlo matches Poisson model", _check_kennedy_mc),
    ("run outputs are deterministic and schema-valid", _check_run_determinism),
    ("spectral synthesis second moments", _check_spectrum_synthesis_moments),
]


def run_selftest() -> int:
    """Run every check; print one line each; return a process exit code."""
    failed = 0
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:  # report and keep going
            failed += 1
            print(f"FAIL - {name}: {type(exc).__name__}: {exc}")
        else:
            print(f"ok - {name}")
    total = len(CHECKS)
    print(f"selftest: {total - failed} passed, {failed} failed")
    return 1 if failed else 0
