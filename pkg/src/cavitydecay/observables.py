"""Far-field emission pattern, emitted-light spectrum and escaping energy.

Intensities and spectra are normalized: the constant ``(k_A^2 mu / 4 pi)^2``
is divided out, and distances enter through ``rho_hat = rho / lambda_T``.
Lengths are given in units of ``c / omega_T`` like everywhere else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import AtomConfig, lamb_shift
from .errors import CavityError, DomainError
from .green import CavityGeometry, abar, farfield_transmission
from .medium import LorentzMedium

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FieldPoint:
    """Observation point; ``phi`` is carried for completeness, the pattern is axially symmetric."""

    rho: float
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not (0.0 <= self.theta <= math.pi):
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def rho_hat(self) -> float:
        return self.rho / TWO_PI


@dataclass(frozen=True)
class SpectrumRequest:
    omega_s: float
    t_window: float

    def __post_init__(self):
        if not self.t_window > 0:
            raise DomainError(f"t_window must be positive, got {self.t_window}")


def _angular(point: FieldPoint) -> float:
    return math.sin(point.theta) ** 2 / point.rho_hat**2


def pattern_factor(point: FieldPoint, atom: AtomConfig, geometry: CavityGeometry,
                   medium: LorentzMedium) -> float:
    """``|F|^2 = sin^2(theta) |A13_N(omega_A)|^2 / rho_hat^2``."""
    if point.rho <= geometry.r1:
        raise DomainError(f"field point rho={point.rho} must lie outside the cavity (r1={geometry.r1})")
    a13 = farfield_transmission(atom.omega_a, geometry, medium)
    return _angular(point) * abs(a13) ** 2


def emission_pattern_markov(point: FieldPoint, t, atom: AtomConfig, geometry: CavityGeometry,
                            medium: LorentzMedium):
    """Normalized far-field intensity ``|F|^2 exp(-A t)`` with ``A = abar(omega_A) A0``."""
    rate = abar(atom.omega_a, geometry, medium) * atom.a0
    return pattern_factor(point, atom, geometry, medium) * np.exp(-rate * np.asarray(t))


def emission_pattern_freespace(point: FieldPoint, t, atom: AtomConfig):
    """Retarded free-space intensity ``sin^2(theta)/rho_hat^2 exp(-A0 (t - rho)) step(t - rho)``."""
    t = np.asarray(t, dtype=float)
    lag = t - point.rho
    out = np.where(lag >= 0, _angular(point) * np.exp(-atom.a0 * np.maximum(lag, 0.0)), 0.0)
    return out if out.ndim else float(out)


def _lorentz_window(omega_s, center, rate, t_window):
    det = np.asarray(omega_s, dtype=float) - center
    z = (-0.5 * rate + 1j * det) * t_window
    return np.abs(np.expm1(z) / (det + 0.5j * rate)) ** 2


def spectrum_markov(req: SpectrumRequest, point: FieldPoint, atom: AtomConfig,
                    geometry: CavityGeometry, medium: LorentzMedium,
                    delta_omega: float | None = None):
    """Time-dependent spectrum for operating time ``T`` in the Markov regime.

    ``S = |F|^2 |(exp{[-A/2 + i(omega_S - omega_A + dw/2)] T} - 1) / (omega_S - omega_A + dw/2 + i A/2)|^2``.
    ``req.omega_s`` may be an array. The line shift ``dw`` is computed from
    the cavity response unless given.
    """
    if delta_omega is None:
        delta_omega = 0.0 if medium.omega_p == 0 else lamb_shift(atom, geometry, medium)
    rate = abar(atom.omega_a, geometry, medium) * atom.a0
    f2 = pattern_factor(point, atom, geometry, medium)
    return f2 * _lorentz_window(req.omega_s, atom.omega_a - 0.5 * delta_omega, rate, req.t_window)


def spectrum_freespace_limit(omega_s, point: FieldPoint, atom: AtomConfig,
                             delta_omega: float = 0.0):
    """Long-time free-space Lorentzian ``(sin^2 theta / rho_hat^2) / [(omega_S - omega_A + dw/2)^2 + A0^2/4]``."""
    det = np.asarray(omega_s, dtype=float) - (atom.omega_a - 0.5 * delta_omega)
    return _angular(point) / (det**2 + 0.25 * atom.a0**2)


def energy_ratio(omega_a, geometry: CavityGeometry, medium: LorentzMedium):
    """Fraction of the emitted energy observed outside, ``|A13_N|^2 / abar``.

    Raises
    ------
    CavityError
        If ``abar`` is not positive, which would signal a numerical failure.
    """
    a13 = np.asarray(farfield_transmission(omega_a, geometry, medium))
    ab = np.asarray(abar(omega_a, geometry, medium))
    if np.any(ab <= 0):
        raise CavityError(f"non-positive relative decay rate {ab.min()}; inconsistent cavity response")
    out = np.abs(a13) ** 2 / ab
    return out if out.ndim else float(out)
