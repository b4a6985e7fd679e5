"""Concrete receivers on the backaction-cancelled output, and their limits.

With backaction cancellation active, the detector output is the phase
quadrature y = eta + (K2 * K3 * x) under signal, y = eta otherwise, with eta
white Gaussian noise of PSD S_eta.  This module evaluates:

* homodyne detection followed by the exact likelihood-ratio test, whose
  analytic error probabilities are P10 = erfc(sigma + lam/4 sigma)/2 and
  P01 = erfc(sigma - lam/4 sigma)/2 with sigma^2 the matched-filter SNR
  integral and lam the log-likelihood-ratio threshold;
* a Kennedy-style displaced photon counter, which never false-alarms and
  misses with probability exp(-displaced output energy);
* the Dolinar feedback receiver, which attains the Bayes bound exactly (its
  value is delegated to the bound; the feedback law itself is not modeled);
* Chernoff-type error exponents for stationary stochastic waveforms;
* Monte Carlo simulations of both receivers at the waveform level.

Simulations consume counter-based per-block random streams, so results
depend only on (seed, trials, scenario) and never on thread scheduling.
Noise paths are drawn by stationary spectral synthesis, so every trial is
in steady state from the first sample and no warm-up segment needs to be
discarded before applying the decision statistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy.special import erfc

from . import _rng
from .bounds import gamma_f_stochastic, helstrom_bayes_bound
from .errors import NumericsError, ValidationError
from .optomech import OptomechDetector
from .spectral import Spectrum, TimeGrid, TimeSeries, forward_transform, freq_integral, natural_order
from .waveform import (
    DeterministicWaveform,
    FlatBandPrior,
    LorentzianPrior,
    StochasticPrior,
    render,
)

KENNEDY_ROUTE_TOL = 0.01
CHERNOFF_SCAN_POINTS = 1001
CHERNOFF_S_TOL = 1e-8
_MIN_RESOLVED_ERRORS = 25

AnyWaveform = Union[DeterministicWaveform, StochasticPrior]


def _require_qnc(qnc: bool, what: str) -> None:
    if not qnc:
        raise ValidationError(
            f"{what} requires backaction cancellation; this scenario has qnc off"
        )


def _is_stochastic(waveform) -> bool:
    return isinstance(waveform, (LorentzianPrior, FlatBandPrior))


# ---------------------------------------------------------------------------
# homodyne, analytic
# ---------------------------------------------------------------------------


def homodyne_snr(det: OptomechDetector, x_spec: Spectrum, *, qnc: bool = True, strict: bool = False) -> float:
    """Matched-filter SNR parameter sigma^2 = int domega/2pi |K4 x|^2 / (8 S_eta)."""
    _require_qnc(qnc, "homodyne detection")
    k4x = det.k4(x_spec.omegas) * np.asarray(x_spec.values)
    integrand = np.abs(k4x) ** 2 / det.s_eta
    return freq_integral(integrand, x_spec.grid, strict=strict) / 8.0


def homodyne_error_probs(sigma: float, lam: float) -> tuple[float, float]:
    """(P10, P01) of the homodyne likelihood-ratio test at threshold lam.

    ``lam`` is the log-likelihood-ratio threshold; the Bayes-optimal choice
    is ln(P0/P1).  For sigma = 0 the hypotheses coincide and the limiting
    values of the same expressions are returned.
    """
    if not (np.isfinite(sigma) and sigma >= 0):
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if not np.isfinite(lam):
        raise ValidationError("threshold must be finite")
    if sigma == 0.0:
        if lam > 0:
            return 0.0, 1.0
        if lam < 0:
            return 1.0, 0.0
        return 0.5, 0.5
    p10 = 0.5 * erfc(sigma + lam / (4.0 * sigma))
    p01 = 0.5 * erfc(sigma - lam / (4.0 * sigma))
    return float(p10), float(p01)


def bayes_threshold(p0: float) -> float:
    """Bayes-optimal log-likelihood-ratio threshold ln(P0/P1)."""
    if not (np.isfinite(p0) and 0.0 < p0 < 1.0):
        raise ValidationError(f"p0 must lie strictly inside (0, 1), got {p0}")
    return math.log(p0 / (1.0 - p0))


def lambda_for_target_p10(sigma: float, target_p10: float, *, tol: float = 1e-12) -> float:
    """Threshold achieving a requested false-alarm probability, by bisection."""
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValidationError("sigma must be positive to place a threshold")
    if not (0.0 < target_p10 < 1.0):
        raise ValidationError(f"target_p10 must lie strictly inside (0, 1), got {target_p10}")

    def p10_at(lam):
        return 0.5 * erfc(sigma + lam / (4.0 * sigma))

    # p10 decreases in lam; expand the bracket until it straddles the target
    lo, hi = -16.0 * max(sigma**2, 1.0), 16.0 * max(sigma**2, 1.0)
    while p10_at(lo) < target_p10:
        lo *= 2.0
    while p10_at(hi) > target_p10:
        hi *= 2.0
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if p10_at(mid) > target_p10:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def homodyne_exponent_deterministic(sigma2: float, duration: float) -> float:
    """Error exponent of the homodyne test, Gamma_hom = sigma^2 / T."""
    if duration <= 0:
        raise ValidationError("duration must be positive")
    if sigma2 < 0:
        raise ValidationError("sigma^2 must be non-negative")
    return sigma2 / duration


# ---------------------------------------------------------------------------
# Chernoff exponent for stochastic waveforms
# ---------------------------------------------------------------------------


class ChernoffResult(NamedTuple):
    gamma: float
    s_star: float


def chernoff_exponent_stochastic(
    det: OptomechDetector,
    prior: StochasticPrior,
    grid: TimeGrid,
    *,
    qnc: bool = True,
    strict: bool = False,
) -> ChernoffResult:
    """Chernoff error exponent of stochastic-signal homodyne detection.

    Gamma = sup_s (1/2) int domega/2pi { ln[1 + (1-s) R] - (1-s) ln[1 + R] }
    with R = |K4|^2 S_x / S_eta.  The objective vanishes identically at both
    endpoints; it is maximized by a ternary search guarded by a 1001-point
    scan that verifies unimodality (with a local-refinement fallback).
    """
    _require_qnc(qnc, "stochastic homodyne detection")
    prior.check_grid(grid)
    omegas = grid.omegas()
    r = np.abs(det.k4(omegas)) ** 2 * prior.psd(omegas) / det.s_eta
    # single decay check for the whole family of integrands
    freq_integral(np.log1p(r), grid, strict=strict)
    if r.max() == 0.0:
        return ChernoffResult(0.0, 0.5)
    log1p_r = np.log1p(r)
    inv_t = 1.0 / grid.duration

    def objective(s: float) -> float:
        return 0.5 * inv_t * float((np.log1p((1.0 - s) * r) - (1.0 - s) * log1p_r).sum())

    ss = np.linspace(0.0, 1.0, CHERNOFF_SCAN_POINTS)
    gs = np.array([objective(s) for s in ss])
    i_best = int(np.argmax(gs))
    wiggle = 1e-12 * max(1.0, np.abs(gs).max())
    diffs = np.diff(gs)
    unimodal = np.all(diffs[:i_best] >= -wiggle) and np.all(diffs[i_best:] <= wiggle)

    if unimodal:
        lo, hi = 0.0, 1.0
    else:
        lo = ss[max(i_best - 1, 0)]
        hi = ss[min(i_best + 1, CHERNOFF_SCAN_POINTS - 1)]
    while hi - lo > CHERNOFF_S_TOL:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if objective(m1) < objective(m2):
            lo = m1
        else:
            hi = m2
    s_star = 0.5 * (lo + hi)
    return ChernoffResult(max(objective(s_star), 0.0), s_star)


# ---------------------------------------------------------------------------
# Kennedy receiver, analytic
# ---------------------------------------------------------------------------


class KennedyDeterministic(NamedTuple):
    p01: float
    energy_time: float
    energy_freq: float
    route_mismatch: float


def _kennedy_energy_freq(det: OptomechDetector, x_spec: Spectrum, strict: bool = False) -> float:
    k4x = det.k4(x_spec.omegas) * np.asarray(x_spec.values)
    return freq_integral(det.s_xi * np.abs(k4x) ** 2, x_spec.grid, strict=strict)


def _kennedy_energy_time(det: OptomechDetector, x: TimeSeries) -> float:
    """Displaced output energy by direct convolution of impulse responses.

    Midpoint-sampled causal kernels keep the jump of the cavity response at
    t = 0 from biasing the Riemann sums; the half-sample time shift this
    introduces is irrelevant to the energy.
    """
    grid = x.grid
    dt = grid.dt
    t2_len = min(grid.duration, 60.0 / det.gamma)
    m2 = max(int(np.ceil(t2_len / dt)), 2)
    if det.gamma_m > 0:
        t3_len = min(grid.duration, 40.0 / det.gamma_m)
    else:
        t3_len = grid.duration
    m3 = max(int(np.ceil(t3_len / dt)), 2)
    k2s = det.k2_impulse((np.arange(m2) + 0.5) * dt)
    k3s = det.k3_impulse((np.arange(m3) + 0.5) * dt)
    k4t = dt * np.convolve(k2s, k3s)

    vals = np.asarray(x.values, dtype=float)
    nonzero = np.nonzero(vals)[0]
    if nonzero.size == 0:
        return 0.0
    signal = dt * np.convolve(k4t, vals[nonzero[0] : nonzero[-1] + 1])
    return det.s_xi * dt * float(np.dot(signal, signal))


def kennedy_p01_deterministic(
    det: OptomechDetector,
    x: TimeSeries,
    *,
    qnc: bool = True,
    route_tol: float = KENNEDY_ROUTE_TOL,
    strict: bool = False,
) -> KennedyDeterministic:
    """Miss probability exp(-energy) of the displaced photon counter.

    The displaced-output energy is computed along two independent routes,
    time-domain convolution and the frequency-domain integral; disagreement
    beyond ``route_tol`` means the grid under-resolves the dynamics and
    raises :class:`NumericsError`.  The returned probability uses the
    frequency route, which coincides with the output-state fidelity; the
    false-alarm probability of this receiver is identically zero.
    """
    _require_qnc(qnc, "Kennedy detection")
    e_freq = _kennedy_energy_freq(det, forward_transform(x), strict=strict)
    e_time = _kennedy_energy_time(det, x)
    scale = max(e_freq, e_time)
    if scale > 1e-12:
        mismatch = abs(e_time - e_freq) / scale
        if mismatch > route_tol:
            raise NumericsError(
                f"Kennedy energy routes disagree by {mismatch:.2%} (> {route_tol:.2%}): "
                "grid under-resolves the detector response"
            )
    else:
        mismatch = 0.0
    return KennedyDeterministic(math.exp(-e_freq), e_time, e_freq, mismatch)


class KennedyStochastic(NamedTuple):
    p01: float
    gamma_f: float
    mc_estimate: float | None
    mc_se: float | None


def kennedy_p01_stochastic(
    det: OptomechDetector,
    prior: StochasticPrior,
    grid: TimeGrid,
    *,
    qnc: bool = True,
    mc_trials: int = 0,
    seed: int = 0,
    strict: bool = False,
) -> KennedyStochastic:
    """Prior-averaged miss probability E exp(-energy(x)) of the counter.

    On the grid this average is exactly the stochastic fidelity
    exp(-Gamma_F T); with ``mc_trials`` > 0 a direct Monte Carlo average over
    sampled waveforms is exposed alongside for cross-checking.
    """
    _require_qnc(qnc, "Kennedy detection")
    prior.check_grid(grid)
    result = gamma_f_stochastic(det.position_psd, prior.psd, grid, det.hbar, strict=strict)
    mc_mean = mc_se = None
    if mc_trials > 0:
        om_nat = grid.natural_omegas()
        weight = det.s_xi * np.abs(det.k4(om_nat)) ** 2 / grid.duration
        psd_x_nat = np.asarray(prior.psd(om_nat), dtype=float)
        vals = np.empty(mc_trials)

        def worker(start, stop, rng):
            coeffs = _rng.gaussian_spectrum_coeffs(psd_x_nat, grid.duration, rng, stop - start)
            energies = (np.abs(coeffs) ** 2 * weight).sum(axis=1)
            vals[start:stop] = np.exp(-energies)

        _rng.run_blocks(mc_trials, seed, "kennedy-stochastic", worker)
        mc_mean = float(vals.mean())
        mc_se = float(vals.std(ddof=1) / math.sqrt(mc_trials)) if mc_trials > 1 else 0.0
    return KennedyStochastic(result.fidelity, result.gamma_f, mc_mean, mc_se)


def dolinar_error(fidelity: float, p0: float) -> float:
    """Bayes error of the Dolinar feedback receiver: the bound itself.

    The receiver attains the Bayes bound exactly, so its value is delegated
    to the same closed form; the feedback law is not modeled here.
    """
    return helstrom_bayes_bound(fidelity, p0)


# ---------------------------------------------------------------------------
# results and Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class McStats:
    trials: int
    p10_hat: float
    p01_hat: float
    p10_se: float
    p01_se: float
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "p10_hat": self.p10_hat,
            "p01_hat": self.p01_hat,
            "p10_se": self.p10_se,
            "p01_se": self.p01_se,
            "note": self.note,
        }


@dataclass(frozen=True)
class ReceiverResult:
    name: str
    p10: float
    p01: float
    p0: float
    p_e: float
    exponent: float | None = None
    mc: McStats | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "p10": self.p10,
            "p01": self.p01,
            "p0": self.p0,
            "p_e": self.p_e,
            "exponent": self.exponent,
            "mc": self.mc.to_dict() if self.mc is not None else None,
        }


def make_result(name, p10, p01, p0, exponent=None, mc=None) -> ReceiverResult:
    p_e = p0 * p10 + (1.0 - p0) * p01
    return ReceiverResult(name, float(p10), float(p01), float(p0), float(p_e), exponent, mc)


def _binomial_se(p_hat: float, trials: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials)


def _resolution_note(counts: list[int]) -> str | None:
    if min(counts) < _MIN_RESOLVED_ERRORS:
        return (
            f"fewer than {_MIN_RESOLVED_ERRORS} errors observed in at least one "
            "arm; increase trials for resolved estimates"
        )
    return None


def _real_self_paired(coeff_vector: np.ndarray) -> np.ndarray:
    """Project DC and Nyquist bins onto the real axis.

    A real sampled signal has real coefficients on the self-conjugate bins;
    enforcing this keeps the simulated statistic exactly Gaussian with the
    advertised variance.
    """
    out = coeff_vector.astype(complex)
    n = out.size
    out[0] = out[0].real
    if n % 2 == 0:
        out[n // 2] = out[n // 2].real
    return out


def simulate_homodyne_mc(
    det: OptomechDetector,
    waveform: AnyWaveform,
    grid: TimeGrid,
    trials: int,
    lam: float,
    seed: int,
    *,
    p0: float = 0.5,
    qnc: bool = True,
) -> ReceiverResult:
    """Waveform-level Monte Carlo of the homodyne likelihood-ratio test.

    Per trial the readout noise is synthesized spectrally from S_eta; under
    signal the rendered (or freshly sampled, for stochastic priors) waveform
    response is added, and the exact log-likelihood ratio is compared with
    the threshold ``lam``.  Ties are broken by a fair coin, which makes the
    test well defined even when the two hypotheses coincide.
    """
    _require_qnc(qnc, "homodyne detection")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if not np.isfinite(lam):
        raise ValidationError("threshold must be finite")
    n, duration = grid.n, grid.duration
    om_nat = grid.natural_omegas()
    s_eta = det.s_eta
    psd_eta_nat = np.full(n, s_eta)
    stochastic = _is_stochastic(waveform)

    ell = {0: np.empty(trials), 1: np.empty(trials)}
    coin = {0: np.empty(trials), 1: np.empty(trials)}

    if not stochastic:
        x = render(waveform, grid)
        s_nat = _real_self_paired(natural_order(forward_transform(x)) * det.k4(om_nat))
        d2 = float((np.abs(s_nat) ** 2).sum()) / (duration * s_eta)
        half_d2 = 0.5 * d2

        def make_worker(hyp):
            def worker(start, stop, rng):
                c = _rng.gaussian_spectrum_coeffs(psd_eta_nat, duration, rng, stop - start)
                u = rng.random(stop - start)
                if hyp == 1:
                    c = c + s_nat
                ell[hyp][start:stop] = (
                    np.real(np.conj(c) * s_nat).sum(axis=1) / (duration * s_eta) - half_d2
                )
                coin[hyp][start:stop] = u

            return worker

        exponent = homodyne_exponent_deterministic(d2 / 8.0, duration)
    else:
        waveform.check_grid(grid)
        k4_eff = _real_self_paired(det.k4(om_nat))
        psd_x_nat = np.asarray(waveform.psd(om_nat), dtype=float)
        s_sig = np.abs(k4_eff) ** 2 * psd_x_nat
        weights = 1.0 / s_eta - 1.0 / (s_eta + s_sig)
        log_det_term = 0.5 * float(np.log1p(s_sig / s_eta).sum())

        def make_worker(hyp):
            def worker(start, stop, rng):
                m = stop - start
                if hyp == 1:
                    cx = _rng.gaussian_spectrum_coeffs(psd_x_nat, duration, rng, m)
                    c = _rng.gaussian_spectrum_coeffs(psd_eta_nat, duration, rng, m) + k4_eff * cx
                else:
                    c = _rng.gaussian_spectrum_coeffs(psd_eta_nat, duration, rng, m)
                u = rng.random(m)
                ell[hyp][start:stop] = (
                    (np.abs(c) ** 2 * weights).sum(axis=1) / (2.0 * duration) - log_det_term
                )
                coin[hyp][start:stop] = u

            return worker

        exponent = chernoff_exponent_stochastic(det, waveform, grid, qnc=qnc).gamma

    _rng.run_blocks(trials, seed, "homodyne-h0", make_worker(0))
    _rng.run_blocks(trials, seed, "homodyne-h1", make_worker(1))

    decide1_h0 = (ell[0] > lam) | ((ell[0] == lam) & (coin[0] < 0.5))
    decide1_h1 = (ell[1] > lam) | ((ell[1] == lam) & (coin[1] < 0.5))
    p10_hat = float(decide1_h0.mean())
    p01_hat = float((~decide1_h1).mean())
    n10 = int(decide1_h0.sum())
    n01 = int((~decide1_h1).sum())
    mc = McStats(
        trials=trials,
        p10_hat=p10_hat,
        p01_hat=p01_hat,
        p10_se=_binomial_se(p10_hat, trials),
        p01_se=_binomial_se(p01_hat, trials),
        note=_resolution_note([n10, n01]),
    )
    return make_result("homodyne_mc", p10_hat, p01_hat, p0, exponent, mc)


def simulate_kennedy_mc(
    det: OptomechDetector,
    waveform: AnyWaveform,
    grid: TimeGrid,
    trials: int,
    seed: int,
    *,
    p0: float = 0.5,
    qnc: bool = True,
) -> ReceiverResult:
    """Monte Carlo of the displaced photon counter.

    Per trial a Poisson count with mean equal to the displaced output energy
    is drawn; the receiver declares signal on any click.  Under vacuum the
    displaced output is dark, so the false-alarm rate is exactly zero and is
    not simulated.
    """
    _require_qnc(qnc, "Kennedy detection")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    om_nat = grid.natural_omegas()
    duration = grid.duration
    counts = np.empty(trials, dtype=np.int64)
    stochastic = _is_stochastic(waveform)

    if not stochastic:
        x = render(waveform, grid)
        mu = _kennedy_energy_freq(det, forward_transform(x))

        def worker(start, stop, rng):
            counts[start:stop] = rng.poisson(mu, stop - start)

        exponent = mu / duration
    else:
        waveform.check_grid(grid)
        weight = det.s_xi * np.abs(det.k4(om_nat)) ** 2 / duration
        psd_x_nat = np.asarray(waveform.psd(om_nat), dtype=float)

        def worker(start, stop, rng):
            coeffs = _rng.gaussian_spectrum_coeffs(psd_x_nat, duration, rng, stop - start)
            mu_i = (np.abs(coeffs) ** 2 * weight).sum(axis=1)
            counts[start:stop] = rng.poisson(mu_i)

        stoch = gamma_f_stochastic(det.position_psd, waveform.psd, grid, det.hbar)
        exponent = stoch.gamma_f

    _rng.run_blocks(trials, seed, "kennedy-mc", worker)
    p01_hat = float((counts == 0).mean())
    n01 = int((counts == 0).sum())
    mc = McStats(
        trials=trials,
        p10_hat=0.0,
        p01_hat=p01_hat,
        p10_se=0.0,
        p01_se=_binomial_se(p01_hat, trials),
        note=_resolution_note([n01]),
    )
    return make_result("kennedy_mc", 0.0, p01_hat, p0, exponent, mc)
