"""Fundamental error-probability bounds from output-state fidelity.

For binary detection of a waveform with prior probabilities (P0, P1), any
receiver acting on the detector output obeys two fidelity-only bounds:

    Bayes:           P_e  >= (1/2) [1 - sqrt(1 - 4 P0 P1 F)]
    Neyman-Pearson:  P01 >= 1 - [sqrt(P10 F) + sqrt((1-P10)(1-F))]^2
                     for P10 <= F, else the bound is 0,

where F is the fidelity between the two output states.  For a linear Gaussian
detector F has closed forms: a frequency-domain quadratic form for a known
waveform, and a spectral determinant for a stationary Gaussian prior.  All
fidelities are computed and stored in the log domain; the linear-domain value
is derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import NumericsError, ValidationError
from .spectral import Spectrum, TimeGrid, circulant_eigenvalues, freq_integral
from .optomech import OptomechDetector

EIGENVALUE_FLOOR = 1.0 - 1e-9


def log_fidelity_deterministic_freq(
    s_q: Callable[[np.ndarray], np.ndarray],
    x_spec: Spectrum,
    hbar: float = 1.0,
    *,
    strict: bool = False,
) -> float:
    """ln F = -(1/hbar^2) int domega/2pi S_q(omega) |x(omega)|^2.

    ``s_q`` is a sampler returning the position noise PSD at the grid
    frequencies.
    """
    if not (np.isfinite(hbar) and hbar > 0):
        raise ValidationError("hbar must be positive")
    omegas = x_spec.omegas
    sq = np.asarray(s_q(omegas), dtype=float)
    if np.any(sq < 0):
        raise ValidationError("S_q must be non-negative")
    integrand = sq * np.abs(np.asarray(x_spec.values)) ** 2
    return -freq_integral(integrand, x_spec.grid, strict=strict) / hbar**2


def fidelity_deterministic_freq(s_q, x_spec: Spectrum, hbar: float = 1.0, *, strict: bool = False) -> float:
    return math.exp(log_fidelity_deterministic_freq(s_q, x_spec, hbar, strict=strict))


def log_fidelity_sinusoid(s_q_at_omega: float, amplitude: float, duration: float, hbar: float = 1.0) -> float:
    """Narrowband limit for x(t) = X cos(Omega t + theta) observed for time T.

    The two spectral lines at +-Omega each carry |x|^2 mass X^2 T / 4, so the
    general frequency integral collapses to ln F = -T S_q(Omega) X^2 / (2 hbar^2).
    """
    if s_q_at_omega < 0 or amplitude < 0 or duration <= 0:
        raise ValidationError("need S_q >= 0, amplitude >= 0 and duration > 0")
    return -duration * s_q_at_omega * amplitude**2 / (2.0 * hbar**2)


def fidelity_sinusoid(s_q_at_omega, amplitude, duration, hbar: float = 1.0) -> float:
    return math.exp(log_fidelity_sinusoid(s_q_at_omega, amplitude, duration, hbar))


def log_fidelity_optomech(det: OptomechDetector, x_spec: Spectrum, *, strict: bool = False) -> float:
    """ln F for an optomech detector: S_q = hbar^2 |K4|^2 S_xi, hbar^2 cancels."""
    return log_fidelity_deterministic_freq(det.position_psd, x_spec, det.hbar, strict=strict)


def fidelity_optomech(det: OptomechDetector, x_spec: Spectrum, *, strict: bool = False) -> float:
    return math.exp(log_fidelity_optomech(det, x_spec, strict=strict))


def gamma_f_deterministic(det: OptomechDetector, x_spec: Spectrum, *, strict: bool = False) -> float:
    """Fidelity decay exponent Gamma_F = -ln F / T for a known waveform."""
    return -log_fidelity_optomech(det, x_spec, strict=strict) / x_spec.grid.duration


def log_fidelity_stochastic_circulant(s_q_row, s_x_row, dt: float, hbar: float = 1.0) -> float:
    """ln F from the circulant determinant for a stationary Gaussian prior.

    F = det[I + (2 dt^2 / hbar^2) Sigma_q Sigma_x]^(-1/2) evaluated through
    the circulant eigenvalue spectra of the two covariance rows:
    ln F = -(1/2) sum_k ln lambda_k with
    lambda_k = 1 + (2 dt^2/hbar^2) eig_q(k) eig_x(k).
    """
    if not (np.isfinite(dt) and dt > 0):
        raise ValidationError("dt must be positive")
    if not (np.isfinite(hbar) and hbar > 0):
        raise ValidationError("hbar must be positive")
    eq = circulant_eigenvalues(s_q_row).real
    ex = circulant_eigenvalues(s_x_row).real
    if eq.shape != ex.shape:
        raise ValidationError("covariance rows must share one grid")
    lam = 1.0 + (2.0 * dt**2 / hbar**2) * eq * ex
    if lam.min() < EIGENVALUE_FLOOR:
        raise NumericsError(
            f"determinant eigenvalue {lam.min():.12f} below 1: covariance rows "
            "are not consistent positive kernels on this grid"
        )
    return -0.5 * float(np.log(np.maximum(lam, 1.0)).sum())


def fidelity_stochastic_circulant(s_q_row, s_x_row, dt: float, hbar: float = 1.0) -> float:
    return math.exp(log_fidelity_stochastic_circulant(s_q_row, s_x_row, dt, hbar))


class StochasticFidelity(NamedTuple):
    gamma_f: float
    log_fidelity: float
    fidelity: float


def gamma_f_stochastic(
    s_q: Callable[[np.ndarray], np.ndarray],
    s_x: Callable[[np.ndarray], np.ndarray],
    grid: TimeGrid,
    hbar: float = 1.0,
    *,
    strict: bool = False,
) -> StochasticFidelity:
    """Long-time fidelity exponent for a stationary Gaussian waveform prior.

    Gamma_F = (1/2) int domega/2pi ln[1 + 2 S_q S_x / hbar^2]; the window
    fidelity F = exp(-Gamma_F T) is returned alongside.
    """
    if not (np.isfinite(hbar) and hbar > 0):
        raise ValidationError("hbar must be positive")
    omegas = grid.omegas()
    sq = np.asarray(s_q(omegas), dtype=float)
    sx = np.asarray(s_x(omegas), dtype=float)
    if np.any(sq < 0) or np.any(sx < 0):
        raise ValidationError("PSDs must be non-negative")
    integrand = np.log1p(2.0 * sq * sx / hbar**2)
    gamma = 0.5 * freq_integral(integrand, grid, strict=strict)
    log_f = -gamma * grid.duration
    return StochasticFidelity(gamma, log_f, math.exp(log_f))


def _check_prob(name: str, p) -> float:
    p = float(p)
    if not (np.isfinite(p) and 0.0 <= p <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {p}")
    return p


def helstrom_bayes_bound(fidelity, p0) -> float:
    """Minimum Bayes error probability allowed by fidelity alone."""
    f = _check_prob("fidelity", fidelity)
    p0 = _check_prob("p0", p0)
    radicand = max(1.0 - 4.0 * p0 * (1.0 - p0) * f, 0.0)
    return 0.5 * (1.0 - math.sqrt(radicand))


def neyman_pearson_bound(fidelity, p10, *, interchanged: bool = False) -> float:
    """Lower bound on the miss probability at a given false-alarm level.

    With ``interchanged`` the roles of the two error kinds are swapped (the
    bound is symmetric, so the same expression applies; the flag only
    documents which probability the argument represents).
    """
    f = _check_prob("fidelity", fidelity)
    p10 = _check_prob("p10" if not interchanged else "p01", p10)
    if p10 >= f:
        return 0.0
    s = math.sqrt(p10 * f) + math.sqrt((1.0 - p10) * (1.0 - f))
    return min(max(1.0 - s * s, 0.0), 1.0)


def np_curve(fidelity, n_points: int = 101) -> list[tuple[float, float]]:
    """The Neyman-Pearson trade-off curve sampled on a uniform P10 grid."""
    if n_points < 2:
        raise ValidationError("need at least 2 curve points")
    grid = np.linspace(0.0, 1.0, n_points)
    return [(float(p), neyman_pearson_bound(fidelity, float(p))) for p in grid]


@dataclass(frozen=True)
class BoundsReport:
    """Bundle of fidelity-level quantities for one scenario."""

    log_fidelity: float
    gamma_f: float
    p0: float
    bayes_bound: float
    np_points: Sequence[tuple[float, float]] = field(repr=False)

    @property
    def fidelity(self) -> float:
        return math.exp(self.log_fidelity)

    def to_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "log_fidelity": self.log_fidelity,
            "gamma_f": self.gamma_f,
            "p0": self.p0,
            "bayes_bound": self.bayes_bound,
            "np_curve": [[p10, p01] for p10, p01 in self.np_points],
        }


def bounds_report(log_fidelity: float, duration: float, p0: float, n_curve: int = 101) -> BoundsReport:
    """Assemble a :class:`BoundsReport` from a log-fidelity value."""
    f = math.exp(log_fidelity)
    return BoundsReport(
        log_fidelity=log_fidelity,
        gamma_f=-log_fidelity / duration,
        p0=_check_prob("p0", p0),
        bayes_bound=helstrom_bayes_bound(f, p0),
        np_points=tuple(np_curve(f, n_curve)),
    )
