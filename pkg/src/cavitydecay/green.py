"""Scattering coefficients of the three-layer sphere and the center Green tensor.

Layer 1 is the outer vacuum (r > R1), layer 2 the Lorentz wall, layer 3 the
inner vacuum (r < R2). Interface f = 1 sits at R1 between layers 1 and 2,
interface f = 2 at R2 between layers 2 and 3.

Inside an absorbing wall the Bessel functions grow like exp(|Im k2 R|) and the
Hankel functions decay like exp(-Im k2 R). Each layer-matching quotient is
homogeneous in these factors, so it is evaluated from scaled mantissas and the
exponent is carried separately (:class:`Scaled`). Only the final coefficients
are converted back to plain complex numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import CavityPoleError, DomainError
from .medium import LorentzMedium, refractive_index

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class CavityGeometry:
    """Outer and inner wall radii in units of c / omega_T."""

    r1: float
    r2: float

    def __post_init__(self):
        if not (self.r1 > self.r2 > 0):
            raise DomainError(f"need r1 > r2 > 0, got r1={self.r1}, r2={self.r2}")

    @property
    def d(self) -> float:
        return self.r1 - self.r2

    @classmethod
    def from_lambda(cls, r2_lambda: float, d_lambda: float) -> "CavityGeometry":
        """Build from inner radius and wall thickness given in units of lambda_T."""
        r2 = TWO_PI * r2_lambda
        return cls(r1=r2 + TWO_PI * d_lambda, r2=r2)


@dataclass(frozen=True)
class LayerWavenumbers:
    k1: complex
    k2: complex
    k3: complex


def layer_wavenumbers(omega, medium: LorentzMedium) -> LayerWavenumbers:
    w = np.asarray(omega, dtype=float)
    k0 = w.astype(complex)
    return LayerWavenumbers(k0, np.asarray(refractive_index(medium, w)) * w, k0)


class Scaled:
    """Complex array stored as ``mant * exp(expo)`` with real ``expo``."""

    __slots__ = ("mant", "expo")
    # keep numpy from broadcasting over a Scaled operand
    __array_ufunc__ = None

    def __init__(self, mant, expo=0.0):
        self.mant = np.asarray(mant, dtype=complex)
        self.expo = np.broadcast_to(np.asarray(expo, dtype=float), self.mant.shape)

    def __mul__(self, other):
        if not isinstance(other, Scaled):
            return Scaled(self.mant * other, self.expo)
        return Scaled(self.mant * other.mant, self.expo + other.expo)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scaled(self.mant / other.mant, self.expo - other.expo)

    def __add__(self, other):
        e = np.maximum(self.expo, other.expo)
        return Scaled(
            self.mant * np.exp(self.expo - e) + other.mant * np.exp(other.expo - e), e
        )

    def __neg__(self):
        return Scaled(-self.mant, self.expo)

    def __sub__(self, other):
        return self + (-other)

    def value(self):
        with np.errstate(over="ignore"):
            v = self.mant * np.exp(self.expo)
        return v if v.ndim else complex(v)


def _j(n, z):
    return Scaled(specfun.spherical_j_scaled(n, z), np.abs(np.imag(z)))


def _h(n, z):
    return Scaled(specfun.spherical_h1_scaled(n, z), -np.imag(z))


def _jp(n, z):
    return Scaled(specfun.riccati_derivative_scaled(n, "first", z), np.abs(np.imag(z)))


def _hp(n, z):
    return Scaled(specfun.riccati_derivative_scaled(n, "hankel", z), -np.imag(z))


def _quotient(num: Scaled, den: Scaled, omega, where) -> Scaled:
    bad = (den.mant == 0) | ~np.isfinite(den.mant)
    if np.any(bad):
        w = np.broadcast_to(np.asarray(omega), bad.shape)[bad]
        raise CavityPoleError(w.tolist() if w.size > 1 else float(w[0]), where)
    return num / den


def _interface_scaled(n, pol, f, omega, geometry, medium):
    if pol not in ("M", "N"):
        raise DomainError(f"polarization must be 'M' or 'N', got {pol!r}")
    if f not in (1, 2):
        raise DomainError(f"interface index must be 1 or 2, got {f!r}")
    k = layer_wavenumbers(omega, medium)
    kf, kf1 = (k.k1, k.k2) if f == 1 else (k.k2, k.k3)
    radius = geometry.r1 if f == 1 else geometry.r2
    zf, zf1 = kf * radius, kf1 * radius

    # X_ff: argument k_f R_f;  X_(f+1)f: argument k_{f+1} R_f
    J_ff, J_1f = _j(n, zf), _j(n, zf1)
    H_ff, H_1f = _h(n, zf), _h(n, zf1)
    Jp_ff, Jp_1f = _jp(n, zf), _jp(n, zf1)
    Hp_ff, Hp_1f = _hp(n, zf), _hp(n, zf1)

    q = lambda num, den, name: _quotient(num, den, omega, f"in {name}{f}")  # noqa: E731
    if pol == "M":
        r_p = q(kf1 * Hp_1f * H_ff - kf * Hp_ff * H_1f,
                kf1 * J_ff * Hp_1f - kf * Jp_ff * H_1f, "R^M_P")
        r_f = q(kf1 * Jp_1f * J_ff - kf * Jp_ff * J_1f,
                kf1 * Jp_1f * H_ff - kf * J_1f * Hp_ff, "R^M_F")
        t_p = q(kf1 * (J_1f * Hp_1f - Jp_1f * H_1f),
                kf1 * J_ff * Hp_1f - kf * Jp_ff * H_1f, "T^M_P")
        t_f = q(kf1 * (Jp_1f * H_1f - J_1f * Hp_1f),
                kf1 * Jp_1f * H_ff - kf * J_1f * Hp_ff, "T^M_F")
    else:
        r_p = q(kf1 * H_1f * Hp_ff - kf * H_ff * Hp_1f,
                kf1 * Jp_ff * H_1f - kf * J_ff * Hp_1f, "R^N_P")
        r_f = q(kf1 * J_1f * Jp_ff - kf * J_ff * Jp_1f,
                kf1 * J_1f * Hp_ff - kf * Jp_1f * H_ff, "R^N_F")
        t_p = q(kf1 * (Jp_1f * H_1f - J_1f * Hp_1f),
                kf1 * Jp_ff * H_1f - kf * J_ff * Hp_1f, "T^N_P")
        t_f = q(kf1 * (J_1f * Hp_1f - Jp_1f * H_1f),
                kf1 * J_1f * Hp_ff - kf * Jp_1f * H_ff, "T^N_F")
    return r_p, r_f, t_p, t_f


@dataclass(frozen=True)
class InterfaceCoefficients:
    r_p: complex
    r_f: complex
    t_p: complex
    t_f: complex


def interface_coefficients(n: int, pol: str, f: int, omega, geometry: CavityGeometry,
                           medium: LorentzMedium) -> InterfaceCoefficients:
    """Reflection and transmission coefficients of one spherical interface.

    Values can be exponentially large or small inside the band gap; they may
    overflow to ``inf`` for very opaque walls even though the combined
    scattering coefficients stay finite.
    """
    parts = _interface_scaled(n, pol, f, omega, geometry, medium)
    return InterfaceCoefficients(*(p.value() for p in parts))


def _scattering_scaled(n, pol, omega, geometry, medium):
    r_p1, r_f1, t_p1, t_f1 = _interface_scaled(n, pol, 1, omega, geometry, medium)
    r_p2, r_f2, t_p2, t_f2 = _interface_scaled(n, pol, 2, omega, geometry, medium)
    for coeff, name in ((t_p1, "T_P1"), (t_f1, "T_F1"), (t_p2, "T_P2")):
        _quotient(coeff, coeff, omega, f"({name})")
    a13 = _quotient(t_f1 * t_f2 * t_p1, t_p1 + t_f1 * r_p1 * r_f2, omega, "of A13")
    c33 = a13 / t_p2 * (r_p2 / t_f1 + r_p1 / t_p1)
    return a13, c33


def scattering_coefficients(n: int, pol: str, omega, geometry: CavityGeometry,
                            medium: LorentzMedium):
    """Return ``(A13, C33)`` for order ``n`` and polarization ``pol``.

    ``A13`` carries a wave from the inner vacuum to the outside; ``C33`` is the
    multiple-reflection amplitude back into the inner vacuum.
    """
    a13, c33 = _scattering_scaled(n, pol, omega, geometry, medium)
    return a13.value(), c33.value()


def abar(omega, geometry: CavityGeometry, medium: LorentzMedium):
    """Decay rate at the cavity center relative to free space, ``1 + Re C33_N``."""
    _, c33 = scattering_coefficients(1, "N", omega, geometry, medium)
    out = 1.0 + np.real(c33)
    return out if np.ndim(out) else float(out)


def abar_thick_wall(omega, geometry: CavityGeometry, medium: LorentzMedium):
    """Opaque-wall approximation ``Re[(n - i tan x) / (1 - i n tan x)]``, x = R2 omega.

    Where ``|tan x| > 1`` the equivalent cotangent form is used, so the pole of
    the tangent never enters.
    """
    w = np.asarray(omega, dtype=float)
    nn = np.asarray(refractive_index(medium, w))
    x = geometry.r2 * w
    s, c = np.sin(x), np.cos(x)
    use_cot = np.abs(s) > np.abs(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(use_cot, 0.0, s / c)
        u = np.where(use_cot, c / s, 0.0)
        tan_form = (nn - 1j * t) / (1 - 1j * nn * t)
        cot_form = (nn * u - 1j) / (u - 1j * nn)
    out = np.real(np.where(use_cot, cot_form, tan_form))
    return out if out.ndim else float(out)


def reflected_green_center(omega, geometry: CavityGeometry, medium: LorentzMedium):
    """Scalar G^R with ``G^R_ij = G^R delta_ij`` at the center: ``i omega C33_N / 6 pi``."""
    _, c33 = scattering_coefficients(1, "N", omega, geometry, medium)
    return 1j * np.asarray(omega) * c33 / (6 * np.pi)


def farfield_transmission(omega, geometry: CavityGeometry, medium: LorentzMedium):
    """``A13_N`` at n = 1, the only coefficient in the far field of a center atom."""
    a13, _ = scattering_coefficients(1, "N", omega, geometry, medium)
    return a13
