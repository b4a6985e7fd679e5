"""Cavity optomechanical force detector: transfer functions and noise budget.

The detector model is a driven cavity (linewidth gamma, resonance omega0,
length L, mean intracavity field amplitude A) whose radiation pressure reads
out a mechanical oscillator (mass m, frequency omega_m, damping rate Gamma_m).
In the resolved working regime Gamma_m << omega_m << gamma the input-output
chain is captured by four frequency responses:

    K1(omega) = (i omega + gamma) / (-i omega + gamma)     cavity reflection
    K2(omega) = (2 omega0 / L) / (-i omega + gamma)        position -> phase
    K3(omega) = 1 / [m (omega_m^2 - omega^2 - i Gamma_m omega)]
                                                           force -> position
    K4 = K3 * K2                                           force -> phase

K3 is the standard damped-oscillator susceptibility.  The coherent drive sets
white measurement shot noise S_xi = |A|^2, and the conjugate phase noise
S_eta = s_eta_excess / (4 S_xi), saturating the uncertainty product
S_xi S_eta >= 1/4 when the excess factor is 1.  The force-referred position
noise spectrum is S_q = hbar^2 |K4|^2 S_xi.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import ValidationError
from .linsys import GaussianState, LinearSystem

_TRANSFER_NAMES = ("K1", "K2", "K3", "K4")


@dataclass(frozen=True)
class OptomechDetector:
    """Parameters of the optomechanical readout chain.

    All rates are angular frequencies; ``mean_field`` is the complex mean
    cavity field amplitude whose squared magnitude is the shot-noise level.
    """

    gamma: float
    omega0: float
    cav_length: float
    mean_field: complex
    mass: float
    omega_m: float
    gamma_m: float
    hbar: float = 1.0
    s_eta_excess: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "omega0", "cav_length", "mass", "omega_m"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be positive and finite, got {v}")
        if not (np.isfinite(self.gamma_m) and self.gamma_m >= 0):
            raise ValidationError(f"gamma_m must be non-negative, got {self.gamma_m}")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ValidationError("hbar must be positive")
        if not (np.isfinite(self.s_eta_excess) and self.s_eta_excess >= 1.0):
            raise ValidationError(
                f"s_eta_excess below the uncertainty limit: {self.s_eta_excess} < 1"
            )
        mf = complex(self.mean_field)
        if not (np.isfinite(mf.real) and np.isfinite(mf.imag)):
            raise ValidationError("mean_field must be finite")
        if abs(mf) == 0.0:
            raise ValidationError("mean_field must be non-zero (no readout otherwise)")
        object.__setattr__(self, "mean_field", mf)

    # -- frequency responses -------------------------------------------------

    def transfer(self, which: str, omega):
        """Evaluate one of K1..K4 at angular frequency omega (vectorized)."""
        if which not in _TRANSFER_NAMES:
            raise ValidationError(f"unknown transfer function {which!r}; expected one of {_TRANSFER_NAMES}")
        w = np.asarray(omega, dtype=float)
        if which == "K1":
            out = (1j * w + self.gamma) / (-1j * w + self.gamma)
        elif which == "K2":
            out = (2.0 * self.omega0 / self.cav_length) / (-1j * w + self.gamma)
        elif which == "K3":
            out = 1.0 / (self.mass * (self.omega_m**2 - w**2 - 1j * self.gamma_m * w))
        else:
            out = self.transfer("K3", w) * self.transfer("K2", w)
        return out if np.ndim(omega) else complex(out)

    def k4(self, omega):
        return self.transfer("K4", omega)

    # -- noise budget ---------------------------------------------------------

    @property
    def s_xi(self) -> float:
        """White measurement (shot) noise PSD, |A|^2."""
        return abs(self.mean_field) ** 2

    @property
    def s_eta(self) -> float:
        """White phase-quadrature readout noise PSD."""
        return self.s_eta_excess / (4.0 * self.s_xi)

    def noise_psds(self, omega):
        """(S_xi, S_eta) broadcast over the requested frequencies."""
        w = np.asarray(omega, dtype=float)
        s_xi = np.full_like(w, self.s_xi, dtype=float)
        s_eta = np.full_like(w, self.s_eta, dtype=float)
        if np.ndim(omega) == 0:
            return float(s_xi), float(s_eta)
        return s_xi, s_eta

    def position_psd(self, omega):
        """Force-referred position noise S_q = hbar^2 |K4|^2 S_xi."""
        k4 = self.transfer("K4", np.asarray(omega, dtype=float))
        out = self.hbar**2 * np.abs(k4) ** 2 * self.s_xi
        return out if np.ndim(omega) else float(out)

    # -- time-domain impulse responses ---------------------------------------

    def k2_impulse(self, t):
        """Causal impulse response of K2: (2 omega0/L) exp(-gamma t)."""
        tt = np.asarray(t, dtype=float)
        g0 = 2.0 * self.omega0 / self.cav_length
        return np.where(tt >= 0.0, g0 * np.exp(-self.gamma * np.clip(tt, 0.0, None)), 0.0)

    def k3_impulse(self, t):
        """Causal impulse response of K3: the damped-oscillator Green function."""
        tt = np.asarray(t, dtype=float)
        wd = np.sqrt(self.omega_m**2 - 0.25 * self.gamma_m**2)
        tp = np.clip(tt, 0.0, None)
        resp = np.exp(-0.5 * self.gamma_m * tp) * np.sin(wd * tp) / (self.mass * wd)
        return np.where(tt >= 0.0, resp, 0.0)

    # -- stationary surrogate --------------------------------------------------

    def stationary_equivalent_linsys(self) -> tuple[LinearSystem, GaussianState]:
        """Two-dimensional (q, p) oscillator heated to its stationary state.

        The backaction force noise is approximated as white with the PSD the
        cavity presents at the mechanical resonance, S_F = hbar^2
        |K2(omega_m)|^2 S_xi, and Sigma solves the stationary Lyapunov
        equation G Sigma + Sigma G^T + diag(0, S_F) = 0.  Against the initial
        time the resulting position kernel V_q(tau) Sigma e_q is exactly the
        stationary autocovariance, whose spectrum matches position_psd over
        the resonance band when gamma >> omega_m.
        """
        if self.gamma_m <= 0.0:
            raise ValidationError("stationary state requires gamma_m > 0")
        s_force = self.hbar**2 * abs(self.transfer("K2", self.omega_m)) ** 2 * self.s_xi
        g = np.array([[0.0, 1.0 / self.mass], [-self.mass * self.omega_m**2, -self.gamma_m]])
        d = np.array([[0.0, 0.0], [0.0, s_force]])
        sigma = scipy.linalg.solve_continuous_lyapunov(g, -d)
        sigma = 0.5 * (sigma + sigma.T)
        sys = LinearSystem(g=g, q_index=0, hbar=self.hbar)
        state = GaussianState(mean=np.zeros(2), cov=sigma)
        return sys, state


def natural_units_detector(**overrides) -> OptomechDetector:
    """Detector preset in natural units (hbar = m = omega_m = 1).

    Defaults put the cavity linewidth a factor 5 above the mechanical
    frequency and the damping 20 below it, with unit shot noise.  Any field
    can be overridden by keyword.
    """
    det = OptomechDetector(
        gamma=5.0,
        omega0=2.5,
        cav_length=1.0,
        mean_field=1.0 + 0.0j,
        mass=1.0,
        omega_m=1.0,
        gamma_m=0.05,
        hbar=1.0,
        s_eta_excess=1.0,
    )
    return replace(det, **overrides) if overrides else det
