"""Time grids, Fourier conventions and small dense linear algebra helpers.

Every frequency-domain quantity in this package lives on the discrete grid
defined here, with one fixed convention:

    forward:   x(omega_k) = dt * sum_n x(t_n) exp(+i omega_k t_n)
    inverse:   x(t_n)     = (1/T) * sum_k x(omega_k) exp(-i omega_k t_n)
    integral:  int domega/2pi f(omega)  ->  (1/T) * sum_k f(omega_k)

with t_n = t_i + n*dt, T = n*dt and omega_k the DFT angular frequencies.
Under these conventions Parseval's identity holds exactly:

    dt * sum |x(t_n)|^2 = (1/T) * sum |x(omega_k)|^2
"""

from __future__ import annotations

import contextlib
import contextvars
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BandwidthWarning, GridError, NumericsError, ValidationError

# Default numerical tolerances.  Callers may override per call.
ROUNDTRIP_TOL = 1e-10
SYMMETRY_TOL = 1e-10
BANDWIDTH_EDGE_FRACTION = 0.05
BANDWIDTH_RATIO = 1e-6

_EDGE_FRACTION_OVERRIDE: contextvars.ContextVar = contextvars.ContextVar(
    "qdetlim_edge_fraction", default=None
)
_WARN_RATIO_OVERRIDE: contextvars.ContextVar = contextvars.ContextVar(
    "qdetlim_warn_ratio", default=None
)


@contextlib.contextmanager
def bandwidth_overrides(edge_fraction: float | None = None, warn_ratio: float | None = None):
    """Temporarily change the default bandwidth-check tolerances.

    Used by scenario runners so per-scenario tolerance overrides reach every
    frequency integral without changing call signatures.  Context-local, so
    concurrent runs do not interfere.
    """
    tokens = []
    if edge_fraction is not None:
        if not (0.0 < edge_fraction <= 0.5):
            raise ValidationError(f"edge_fraction must lie in (0, 0.5], got {edge_fraction}")
        tokens.append((_EDGE_FRACTION_OVERRIDE, _EDGE_FRACTION_OVERRIDE.set(float(edge_fraction))))
    if warn_ratio is not None:
        if not (np.isfinite(warn_ratio) and warn_ratio > 0.0):
            raise ValidationError(f"warn_ratio must be positive, got {warn_ratio}")
        tokens.append((_WARN_RATIO_OVERRIDE, _WARN_RATIO_OVERRIDE.set(float(warn_ratio))))
    try:
        yield
    finally:
        for var, token in reversed(tokens):
            var.reset(token)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid t_k = t_i + k*dt for k = 0..n-1, with T = n*dt.

    The duration T is the full periodic window; t_f is exclusive, so
    dt = (t_f - t_i)/n and the last sample sits at t_f - dt.
    """

    t_i: float
    t_f: float
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise GridError("n must be an integer")
        if self.n < 2:
            raise GridError(f"need at least 2 samples, got n={self.n}")
        if not (np.isfinite(self.t_i) and np.isfinite(self.t_f)):
            raise GridError("grid endpoints must be finite")
        if not self.t_f > self.t_i:
            raise GridError(f"t_f={self.t_f} must exceed t_i={self.t_i}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def duration(self) -> float:
        return self.t_f - self.t_i

    @property
    def dt(self) -> float:
        return self.duration / self.n

    @property
    def nyquist(self) -> float:
        return np.pi / self.dt

    def times(self) -> np.ndarray:
        return self.t_i + self.dt * np.arange(self.n)

    def omegas(self) -> np.ndarray:
        """Angular frequency grid, ascending, symmetric about zero."""
        return np.fft.fftshift(self.natural_omegas())

    def natural_omegas(self) -> np.ndarray:
        """Angular frequencies in raw DFT (unshifted) order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.dt)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Samples of a function of time on a :class:`TimeGrid`."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.grid.n,):
            raise GridError(
                f"values shape {vals.shape} does not match grid length {self.grid.n}"
            )
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Samples of a function of angular frequency on a grid's omega axis.

    Values are aligned with ``grid.omegas()`` (ascending order).
    """

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.grid.n,):
            raise GridError(
                f"values shape {vals.shape} does not match grid length {self.grid.n}"
            )
        object.__setattr__(self, "values", vals)

    @property
    def omegas(self) -> np.ndarray:
        return self.grid.omegas()


def forward_transform(x: TimeSeries) -> Spectrum:
    """Discrete version of x(omega) = int dt x(t) exp(+i omega t).

    The +i omega t sign convention is load-bearing everywhere downstream;
    the t_i-dependent phase is kept so the transform of a shifted grid is
    the analytically shifted spectrum.
    """
    vals = np.asarray(x.values)
    if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
        raise NumericsError("non-finite samples in time series")
    grid = x.grid
    raw = grid.n * np.fft.ifft(vals)
    shifted = np.fft.fftshift(raw)
    phase = np.exp(1j * grid.omegas() * grid.t_i)
    return Spectrum(grid, grid.dt * shifted * phase)


def inverse_transform(s: Spectrum) -> TimeSeries:
    """Inverse of :func:`forward_transform`; exact round trip up to rounding."""
    grid = s.grid
    vals = np.asarray(s.values)
    if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
        raise NumericsError("non-finite samples in spectrum")
    natural = np.fft.ifftshift(vals * np.exp(-1j * grid.omegas() * grid.t_i))
    return TimeSeries(grid, np.fft.fft(natural) / grid.duration)


def natural_order(s: Spectrum) -> np.ndarray:
    """Spectrum values in raw DFT order with the t_i phase removed.

    This is the lag-convention representation used by the circulant and
    Monte Carlo machinery, where only t - t_i matters.
    """
    grid = s.grid
    return np.fft.ifftshift(np.asarray(s.values) * np.exp(-1j * grid.omegas() * grid.t_i))


def freq_integral(
    values,
    grid: TimeGrid,
    *,
    edge_fraction: float | None = None,
    warn_ratio: float | None = None,
    strict: bool = False,
) -> float:
    """Evaluate int domega/2pi f(omega) as (1/T) sum_k f(omega_k).

    ``values`` must be sampled on ``grid.omegas()`` (any order; the sum does
    not care).  If the outermost ``edge_fraction`` of bins (ranked by |omega|)
    carry more than ``warn_ratio`` of the maximum magnitude, the integrand has
    not decayed inside the band: a :class:`BandwidthWarning` is emitted, or a
    :class:`NumericsError` raised when ``strict`` is set.  Tolerances left at
    ``None`` take any :func:`bandwidth_overrides` in effect, then the module
    defaults.
    """
    if edge_fraction is None:
        override = _EDGE_FRACTION_OVERRIDE.get()
        edge_fraction = BANDWIDTH_EDGE_FRACTION if override is None else override
    if warn_ratio is None:
        override = _WARN_RATIO_OVERRIDE.get()
        warn_ratio = BANDWIDTH_RATIO if override is None else override
    f = np.asarray(values)
    if f.shape != (grid.n,):
        raise GridError(f"integrand shape {f.shape} does not match grid length {grid.n}")
    if not np.all(np.isfinite(f)):
        raise NumericsError("non-finite integrand in frequency integral")
    mags = np.abs(f)
    fmax = mags.max()
    if fmax > 0.0:
        k = max(1, int(np.ceil(edge_fraction * grid.n)))
        order = np.argsort(np.abs(grid.omegas()))
        edge_max = mags[order[-k:]].max()
        if edge_max > warn_ratio * fmax:
            msg = (
                "integrand has not decayed at the frequency grid edge "
                f"(edge/max = {edge_max / fmax:.3e}); increase the sampling rate"
            )
            if strict:
                raise NumericsError(msg)
            warnings.warn(msg, BandwidthWarning, stacklevel=2)
    return float(np.real_if_close(f.sum() / grid.duration))


def circulant_eigenvalues(first_row, *, symmetric: bool = True, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """Eigenvalues of the circulant matrix with the given first row.

    Computed as the DFT of the row, returned in raw DFT order.  When
    ``symmetric`` is asserted the row must satisfy row[k] == row[n-k]; the
    eigenvalues are then real and the (round-off) imaginary parts are zeroed
    after an explicit check.
    """
    row = np.asarray(first_row, dtype=float)
    if row.ndim != 1 or row.size < 1:
        raise ValidationError("first_row must be a non-empty vector")
    if not np.all(np.isfinite(row)):
        raise NumericsError("non-finite circulant row")
    eig = np.fft.fft(row)
    if symmetric:
        scale = max(np.abs(row).max(), np.finfo(float).tiny)
        mirrored = np.roll(row[::-1], 1)
        asym = np.abs(row - mirrored).max()
        if asym > tol * scale:
            raise NumericsError(
                f"circulant row asserted symmetric but asymmetry {asym:.3e} "
                f"exceeds {tol:.1e} * {scale:.3e}"
            )
        eig = eig.real.astype(complex)
    return eig


def psd_to_covariance_row(psd_values, grid: TimeGrid) -> np.ndarray:
    """First row of the circulant covariance whose eigenvalues sample a PSD.

    ``psd_values`` are S(omega) on ``grid.omegas()``.  The row is
    sigma(tau_j) = (1/T) sum_k S(omega_k) exp(-i omega_k tau_j) with
    tau_j = j*dt, symmetrized so row[j] == row[n-j] holds exactly.  By
    construction ``circulant_eigenvalues(row) * dt`` reproduces the PSD
    samples, so row[0] equals the in-band variance int domega/2pi S.
    """
    s = np.asarray(psd_values, dtype=float)
    if s.shape != (grid.n,):
        raise GridError(f"PSD shape {s.shape} does not match grid length {grid.n}")
    if np.any(s < 0.0):
        raise ValidationError("PSD values must be non-negative")
    natural = np.fft.ifftshift(s)
    row = np.real(np.fft.fft(natural)) / grid.duration
    mirrored = np.roll(row[::-1], 1)
    return 0.5 * (row + mirrored)


def matrix_exponential(m, t: float = 1.0) -> np.ndarray:
    """exp(m*t) for a square matrix, via scaling-and-squaring (scipy).

    exp(0) is returned as the exact identity.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or not np.isfinite(t):
        raise NumericsError("non-finite input to matrix exponential")
    if t == 0.0 or not np.any(a):
        return np.eye(a.shape[0])
    return scipy.linalg.expm(a * t)
