"""Single-resonance Lorentz dielectric used for the cavity wall.

All frequencies are in units of the transverse resonance frequency, so the
default ``omega_t`` is 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class LorentzMedium:
    """Lorentz oscillator parameters of the wall material.

    Parameters
    ----------
    omega_p : float
        Plasma (coupling) frequency.
    gamma : float
        Absorption linewidth.
    omega_t : float
        Transverse resonance frequency, 1 in the natural unit system.
    """

    omega_p: float
    gamma: float
    omega_t: float = 1.0

    def __post_init__(self):
        if not self.omega_t > 0:
            raise DomainError(f"omega_t must be positive, got {self.omega_t}")
        if not self.omega_p >= 0:
            raise DomainError(f"omega_p must be non-negative, got {self.omega_p}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")

    @property
    def omega_l(self) -> float:
        """Longitudinal frequency, upper edge of the band gap."""
        return float(np.hypot(self.omega_t, self.omega_p))

    def with_gamma(self, gamma: float) -> "LorentzMedium":
        return LorentzMedium(self.omega_p, gamma, self.omega_t)


def _check_omega(omega):
    w = np.asarray(omega, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("frequency must be strictly positive")
    return w


def permittivity(medium: LorentzMedium, omega):
    """Complex permittivity ``1 + wp^2 / (wt^2 - w^2 - i w gamma)``.

    Accepts scalars or arrays; returns the same shape.
    """
    w = _check_omega(omega)
    eps = 1.0 + medium.omega_p**2 / (medium.omega_t**2 - w**2 - 1j * w * medium.gamma)
    return eps if eps.ndim else complex(eps)


def refractive_index(medium: LorentzMedium, omega):
    """Principal square root of the permittivity.

    With ``gamma > 0`` the permittivity lies in the upper half plane, so both
    real and imaginary parts of the result are positive.
    """
    n = np.sqrt(np.asarray(permittivity(medium, omega)))
    return n if n.ndim else complex(n)


def band_gap(medium: LorentzMedium) -> tuple[float, float]:
    """Return ``(omega_t, omega_l)``, the edges of the anomalous-dispersion gap."""
    return medium.omega_t, medium.omega_l


def refractive_index_derivative(medium: LorentzMedium, omega):
    """``dn/domega = (deps/domega) / (2 n)``.

    A positive real part marks normal dispersion.
    """
    w = _check_omega(omega)
    den = medium.omega_t**2 - w**2 - 1j * w * medium.gamma
    deps = medium.omega_p**2 * (2.0 * w + 1j * medium.gamma) / den**2
    out = deps / (2.0 * np.asarray(refractive_index(medium, w)))
    return out if out.ndim else complex(out)
