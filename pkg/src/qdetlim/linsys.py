"""Linear Gaussian dynamics and the time-domain fidelity quadratic form.

A detector whose canonical operators Z evolve as dZ/dt = G Z + J(t), prepared
in a Gaussian state with Weyl-ordered covariance Sigma, responds to a force
waveform x(t) coupled to the position row q.  Any deterministic source J only
displaces the state by a phase that cancels from every overlap, so it never
appears here; the fidelity between the two output states is

    F_x = exp( - kappa^T Sigma kappa ),
    kappa = (dt/hbar) * sum_n x(t_n) V_q(t_n, t_i),

with V_q(t, t_i) the position row of the propagator exp(G (t - t_i)).  This
is the double time integral of x(t) Sigma_q(t,t') x(t') assembled through the
rank-one structure of Sigma_q(t,t') = V_q(t) Sigma V_q(t')^T.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, NumericsError, ValidationError
from .spectral import TimeGrid, TimeSeries, matrix_exponential

NEGATIVE_FORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Constant-coefficient linear dynamics dZ/dt = G Z (+ irrelevant source).

    ``q_index`` selects which component of Z is the position the force
    waveform couples to.
    """

    g: np.ndarray
    q_index: int = 0
    hbar: float = 1.0

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValidationError(f"G must be square, got shape {g.shape}")
        if g.shape[0] % 2 != 0:
            raise ValidationError("Z must hold canonical pairs; G dimension must be even")
        if not np.all(np.isfinite(g)):
            raise ValidationError("G must be finite")
        if not (0 <= self.q_index < g.shape[0]):
            raise ValidationError(f"q_index {self.q_index} out of range for dim {g.shape[0]}")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValidationError("hbar must be positive")
        object.__setattr__(self, "g", g)

    @property
    def dim(self) -> int:
        return self.g.shape[0]


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Gaussian state: mean vector and symmetric PSD covariance (Weyl order)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValidationError(f"covariance must be square, got shape {cov.shape}")
        if mean.shape != (cov.shape[0],):
            raise ValidationError("mean length must match covariance dimension")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValidationError("state moments must be finite")
        scale = max(np.abs(cov).max(), np.finfo(float).tiny)
        if np.abs(cov - cov.T).max() > 1e-12 * scale:
            raise ValidationError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        min_eig = np.linalg.eigvalsh(cov).min()
        if min_eig < -1e-12 * max(np.trace(cov), np.finfo(float).tiny):
            raise ValidationError(f"covariance not positive semidefinite (min eig {min_eig:.3e})")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def satisfies_heisenberg(self, hbar: float = 1.0) -> bool:
        """Check Sigma + i*hbar*Omega/2 >= 0 for the standard symplectic form.

        Advisory only: fidelities are well defined for any PSD Sigma, so this
        is not enforced at construction.
        """
        dim = self.cov.shape[0]
        omega = np.zeros((dim, dim))
        for j in range(0, dim, 2):
            omega[j, j + 1] = 1.0
            omega[j + 1, j] = -1.0
        m = self.cov + 0.5j * hbar * omega
        eigs = np.linalg.eigvalsh(m)
        return bool(eigs.min() >= -1e-10 * max(np.trace(self.cov), 1.0))


def propagator_row(sys: LinearSystem, t: float, t_i: float) -> np.ndarray:
    """Position row V_q(t, t_i) of exp(G (t - t_i))."""
    if t < t_i:
        raise ValidationError(f"t={t} precedes initial time t_i={t_i}")
    return matrix_exponential(sys.g, t - t_i)[sys.q_index]


def position_autocovariance(
    sys: LinearSystem, state: GaussianState, t: float, t2: float, t_i: float = 0.0
) -> float:
    """Two-time position covariance V_q(t) Sigma V_q(t2)^T.

    Evaluated with sorted times so the result is exactly symmetric in
    (t, t2).
    """
    ta, tb = (t, t2) if t >= t2 else (t2, t)
    va = propagator_row(sys, ta, t_i)
    vb = propagator_row(sys, tb, t_i)
    return float(va @ state.cov @ vb)


def autocovariance_row(sys: LinearSystem, state: GaussianState, grid: TimeGrid) -> np.ndarray:
    """Periodic covariance row built from the one-sided kernel k(tau).

    k(tau_j) = V_q(tau_j) Sigma e_q is the system's position autocovariance
    against the initial time; row[j] = k(min(j, n-j) * dt) even-extends it
    into a circulant row suitable for the stochastic fidelity determinant.
    The window should cover several decay times so the wrap-around seam is
    negligible.
    """
    n, dt = grid.n, grid.dt
    w = state.cov[:, sys.q_index]
    step = matrix_exponential(sys.g, dt)
    one_sided = np.empty(n)
    row_vec = np.zeros(sys.dim)
    row_vec[sys.q_index] = 1.0
    for j in range(n):
        one_sided[j] = row_vec @ w
        row_vec = row_vec @ step
    idx = np.minimum(np.arange(n), n - np.arange(n))
    idx[0] = 0
    return one_sided[idx]


def log_fidelity_deterministic_timedomain(
    sys: LinearSystem,
    state: GaussianState,
    x: TimeSeries,
    t_i: float | None = None,
    *,
    negative_tol: float = NEGATIVE_FORM_TOL,
) -> float:
    """ln F for a deterministic waveform via the time-domain quadratic form.

    Returns -kappa^T Sigma kappa (always <= 0).  A quadratic form more
    negative than ``-negative_tol`` (relative to its natural scale) signals a
    broken covariance and raises :class:`NumericsError`.
    """
    if state.cov.shape[0] != sys.dim:
        raise ValidationError("state dimension does not match system dimension")
    grid = x.grid
    if t_i is None:
        t_i = grid.t_i
    if grid.t_i < t_i - 1e-12 * max(1.0, abs(t_i)):
        raise GridError(f"grid starts at {grid.t_i}, before system initial time {t_i}")
    vals = np.asarray(x.values, dtype=float)
    nonzero = np.nonzero(vals)[0]
    if nonzero.size == 0:
        return 0.0
    last = nonzero[-1]

    step = matrix_exponential(sys.g, grid.dt)
    row = matrix_exponential(sys.g, grid.t_i - t_i)[sys.q_index]
    kappa = np.zeros(sys.dim)
    for j in range(last + 1):
        if vals[j] != 0.0:
            kappa += vals[j] * row
        row = row @ step
    kappa *= grid.dt / sys.hbar

    form = float(kappa @ state.cov @ kappa)
    scale = max(np.abs(kappa).max() ** 2 * max(np.abs(state.cov).max(), 1.0), 1.0)
    if form < -negative_tol * scale:
        raise NumericsError(f"fidelity quadratic form is negative ({form:.3e}): broken covariance")
    return -max(form, 0.0)


def fidelity_deterministic_timedomain(
    sys: LinearSystem,
    state: GaussianState,
    x: TimeSeries,
    t_i: float | None = None,
) -> float:
    """F between the two output states for waveform x, time-domain route."""
    return float(np.exp(log_fidelity_deterministic_timedomain(sys, state, x, t_i)))
