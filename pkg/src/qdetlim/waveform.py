"""Force waveform models: deterministic shapes and stochastic priors.

Deterministic waveforms render to a :class:`~qdetlim.spectral.TimeSeries` on a
grid.  Stochastic waveforms are zero-mean stationary Gaussian priors specified
by a power spectral density S_x(omega); they provide covariance rows for the
circulant fidelity machinery and reproducible sample paths via spectral
synthesis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _rng
from .errors import GridError, NumericsError, ValidationError
from .spectral import TimeGrid, TimeSeries, circulant_eigenvalues, psd_to_covariance_row


@dataclass(frozen=True)
class Sinusoid:
    """x(t) = amplitude * cos(omega t + phase)."""

    amplitude: float
    omega: float
    phase: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ValidationError(f"amplitude must be >= 0, got {self.amplitude}")
        if not (np.isfinite(self.omega) and self.omega >= 0):
            raise ValidationError(f"omega must be >= 0, got {self.omega}")
        if not np.isfinite(self.phase):
            raise ValidationError("phase must be finite")

    def render(self, grid: TimeGrid) -> TimeSeries:
        t = grid.times()
        return TimeSeries(grid, self.amplitude * np.cos(self.omega * t + self.phase))


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian force pulse with total impulse ``area`` and rms width ``width``."""

    area: float
    center: float
    width: float

    def __post_init__(self):
        if not np.isfinite(self.area):
            raise ValidationError("area must be finite")
        if not (np.isfinite(self.width) and self.width > 0):
            raise ValidationError(f"width must be positive, got {self.width}")
        if not np.isfinite(self.center):
            raise ValidationError("center must be finite")

    def render(self, grid: TimeGrid) -> TimeSeries:
        t = grid.times()
        norm = self.area / (self.width * np.sqrt(2.0 * np.pi))
        return TimeSeries(grid, norm * np.exp(-0.5 * ((t - self.center) / self.width) ** 2))


@dataclass(frozen=True, eq=False)
class SampledWaveform:
    """A waveform given directly by its samples; renders only on its own grid."""

    ts: TimeSeries

    def __post_init__(self):
        if not np.all(np.isfinite(np.asarray(self.ts.values, dtype=float))):
            raise ValidationError("sampled waveform must be finite and real")

    def render(self, grid: TimeGrid) -> TimeSeries:
        own = self.ts.grid
        if (own.t_i, own.t_f, own.n) != (grid.t_i, grid.t_f, grid.n):
            raise GridError("sampled waveform cannot be rendered on a different grid")
        return self.ts


DeterministicWaveform = Union[Sinusoid, GaussianPulse, SampledWaveform]


def render(waveform: DeterministicWaveform, grid: TimeGrid) -> TimeSeries:
    out = waveform.render(grid)
    if not np.all(np.isfinite(np.asarray(out.values, dtype=float))):
        raise NumericsError("rendered waveform has non-finite samples")
    return out


def resonant_burst(
    grid: TimeGrid,
    amplitude: float,
    carrier: float,
    center: float,
    width: float,
    truncate: float = 4.0,
) -> TimeSeries:
    """Carrier tone under a truncated Gaussian envelope.

    Useful for probing a narrow resonance with a waveform of compact
    support: zero exactly beyond ``truncate`` envelope widths.
    """
    t = grid.times()
    u = (t - center) / width
    env = np.where(np.abs(u) <= truncate, np.exp(-0.5 * u**2), 0.0)
    return TimeSeries(grid, amplitude * env * np.cos(carrier * t))


@dataclass(frozen=True)
class LorentzianPrior:
    """Stationary prior with S_x(omega) = s0 * omega_c^2 / (omega^2 + omega_c^2)."""

    s0: float
    omega_c: float

    def __post_init__(self):
        if not (np.isfinite(self.s0) and self.s0 >= 0):
            raise ValidationError(f"s0 must be >= 0, got {self.s0}")
        if not (np.isfinite(self.omega_c) and self.omega_c > 0):
            raise ValidationError(f"omega_c must be positive, got {self.omega_c}")

    def psd(self, omega):
        w = np.asarray(omega, dtype=float)
        out = self.s0 * self.omega_c**2 / (w**2 + self.omega_c**2)
        return out if np.ndim(omega) else float(out)

    def check_grid(self, grid: TimeGrid) -> None:
        if self.omega_c >= grid.nyquist:
            raise ValidationError(
                f"prior corner omega_c={self.omega_c} is not resolved "
                f"(Nyquist {grid.nyquist:.6g})"
            )


@dataclass(frozen=True)
class FlatBandPrior:
    """Stationary prior flat at s0 for omega_lo <= |omega| <= omega_hi, else 0."""

    s0: float
    omega_lo: float
    omega_hi: float

    def __post_init__(self):
        if not (np.isfinite(self.s0) and self.s0 >= 0):
            raise ValidationError(f"s0 must be >= 0, got {self.s0}")
        if not (0 <= self.omega_lo < self.omega_hi) or not np.isfinite(self.omega_hi):
            raise ValidationError(
                f"need 0 <= omega_lo < omega_hi, got [{self.omega_lo}, {self.omega_hi}]"
            )

    def psd(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        out = np.where((w >= self.omega_lo) & (w <= self.omega_hi), self.s0, 0.0)
        return out if np.ndim(omega) else float(out)

    def check_grid(self, grid: TimeGrid) -> None:
        if self.omega_hi >= grid.nyquist:
            raise ValidationError(
                f"prior band edge omega_hi={self.omega_hi} is not resolved "
                f"(Nyquist {grid.nyquist:.6g})"
            )


StochasticPrior = Union[LorentzianPrior, FlatBandPrior]


def covariance_row(prior: StochasticPrior, grid: TimeGrid) -> np.ndarray:
    """First row of the prior's circulant covariance on the grid.

    Built as the inverse transform of the sampled PSD, so row[0] is the
    in-band variance and the circulant eigenvalues are S_x(omega_k)/dt, which
    are non-negative by construction; a defensive check still rejects rows
    whose eigenvalues dip below -1e-9 * row[0].
    """
    prior.check_grid(grid)
    row = psd_to_covariance_row(prior.psd(grid.omegas()), grid)
    if row[0] > 0.0:
        eigs = circulant_eigenvalues(row).real
        if eigs.min() < -1e-9 * row[0]:
            raise NumericsError(
                f"prior covariance row is not positive semidefinite on this grid "
                f"(min eigenvalue {eigs.min():.3e})"
            )
    return row


def sample_gp(prior: StochasticPrior, grid: TimeGrid, seed: int) -> TimeSeries:
    """One reproducible sample path of the prior on the grid.

    Spectral synthesis: conjugate-symmetric Gaussian frequency coefficients
    scaled so the sample covariance converges to the circulant target of
    :func:`covariance_row`.  Equal seeds give bit-identical paths.
    """
    prior.check_grid(grid)
    seed = _rng.check_seed(seed)
    psd_nat = np.fft.ifftshift(prior.psd(grid.omegas()))
    rng = _rng.block_generator(seed, _rng.stream_tag("sample_gp"), 0)
    coeffs = _rng.gaussian_spectrum_coeffs(psd_nat, grid.duration, rng, 1)
    return TimeSeries(grid, _rng.coeffs_to_paths(coeffs, grid.duration)[0])
