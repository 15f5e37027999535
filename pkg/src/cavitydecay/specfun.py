"""Spherical Bessel and Hankel functions of complex argument, orders 0..3.

Closed forms are used away from the origin and an ascending series near it.
Besides the plain values, every function has an exponentially scaled twin:

    j_n(z)      = spherical_j_scaled(n, z)  * exp(|Im z|)
    h_n^(1)(z)  = spherical_h1_scaled(n, z) * exp(-Im z)

The scaled forms never overflow, which matters inside an absorbing wall where
``|Im z|`` reaches several hundred.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import DomainError, SingularityError

MAX_ORDER = 3
# exp() of larger arguments overflows a double
_IM_LIMIT = 700.0
_SERIES_RADIUS = 2.0
_SERIES_TERMS = 30


def _coeffs(n):
    return [factorial(n + k) / (factorial(k) * factorial(n - k)) for k in range(n + 1)]


_POLY = {n: _coeffs(n) for n in range(MAX_ORDER + 1)}


def _check_order(n, top=MAX_ORDER):
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= top):
        raise DomainError(f"order n must be an integer in [0, {top}], got {n!r}")


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _out(a):
    return a if a.ndim else complex(a)


def _series_j(n, z):
    # j_n(z) = z^n sum_k (-z^2/2)^k / (k! (2n+2k+1)!!)
    z2 = -0.5 * z * z
    dfact = 1.0
    for m in range(1, 2 * n + 2, 2):
        dfact *= m
    term = np.ones_like(z) / dfact
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * z2 / (k * (2 * n + 2 * k + 1))
        total = total + term
    return z**n * total


def _poly(n, z, sign):
    # sum_k a_nk (sign*i/(2z))^k
    u = sign * 0.5j / z
    acc = np.zeros_like(z)
    for a in reversed(_POLY[n]):
        acc = acc * u + a
    return acc


def _h1_closed_scaled(n, z):
    # h1 * exp(Im z) = (-i)^(n+1) exp(i Re z) P(z) / z
    return (-1j) ** (n + 1) * np.exp(1j * z.real) * _poly(n, z, 1) / z


def _y_closed(n, z):
    h1 = (-1j) ** (n + 1) * np.exp(1j * z) * _poly(n, z, 1) / z
    h2 = (1j) ** (n + 1) * np.exp(-1j * z) * _poly(n, z, -1) / z
    return (h1 - h2) / 2j


def _j_closed_scaled(n, z):
    a = np.abs(z.imag)
    t1 = (-1j) ** (n + 1) * np.exp(1j * z - a) * _poly(n, z, 1)
    t2 = (1j) ** (n + 1) * np.exp(-1j * z - a) * _poly(n, z, -1)
    return 0.5 * (t1 + t2) / z


def _j_scaled(n, z):
    small = np.abs(z) < _SERIES_RADIUS
    out = np.empty_like(z)
    if np.any(small):
        zs = z[small]
        out[small] = _series_j(n, zs) * np.exp(-np.abs(zs.imag))
    if np.any(~small):
        out[~small] = _j_closed_scaled(n, z[~small])
    return out


def _h1_scaled(n, z):
    if np.any(z == 0):
        raise SingularityError("spherical Hankel function is singular at z = 0")
    small = np.abs(z) < _SERIES_RADIUS
    out = np.empty_like(z)
    if np.any(small):
        zs = z[small]
        out[small] = (_series_j(n, zs) + 1j * _y_closed(n, zs)) * np.exp(zs.imag)
    if np.any(~small):
        out[~small] = _h1_closed_scaled(n, z[~small])
    return out


def _guard(z):
    if np.any(np.abs(z.imag) > _IM_LIMIT):
        raise DomainError(
            f"|Im z| > {_IM_LIMIT:g} overflows; use the *_scaled variants instead"
        )


def spherical_j_scaled(n: int, z):
    """``j_n(z) * exp(-|Im z|)``."""
    _check_order(n)
    z = _as_complex(z)
    return _out(_j_scaled(n, np.atleast_1d(z)).reshape(z.shape))


def spherical_h1_scaled(n: int, z):
    """``h_n^(1)(z) * exp(Im z)``."""
    _check_order(n)
    z = _as_complex(z)
    return _out(_h1_scaled(n, np.atleast_1d(z)).reshape(z.shape))


def spherical_j(n: int, z):
    """Spherical Bessel function of the first kind, ``j_n(z)``.

    Parameters
    ----------
    n : int
        Order, 0 to 3.
    z : complex or array_like
        Argument. ``z = 0`` is allowed (removable point).
    """
    z = _as_complex(z)
    _guard(z)
    return _out(np.asarray(spherical_j_scaled(n, z)) * np.exp(np.abs(z.imag)))


def spherical_h1(n: int, z):
    """First-kind spherical Hankel function ``h_n^(1)(z) = j_n + i y_n``."""
    z = _as_complex(z)
    _guard(z)
    return _out(np.asarray(spherical_h1_scaled(n, z)) * np.exp(-z.imag))


def spherical_y(n: int, z):
    """Spherical Bessel function of the second kind, from ``(h1 - j) / i``."""
    return _out((np.asarray(spherical_h1(n, z)) - np.asarray(spherical_j(n, z))) / 1j)


def _riccati_scaled(n, kind, z):
    f = _j_scaled if kind == "first" else _h1_scaled
    if kind == "hankel" and np.any(z == 0):
        raise SingularityError("riccati derivative of h1 is singular at z = 0")
    if n == 0:
        # (1/z) d[z z_0]/dz = z_0/z - z_1
        return f(0, z) / z - f(1, z)
    return f(n - 1, z) - n * f(n, z) / z


def riccati_derivative_scaled(n: int, kind: str, z):
    """Scaled ``(1/z) d[z z_n(z)]/dz``; same exponential factor as the function."""
    _check_order(n)
    if kind not in ("first", "hankel"):
        raise DomainError(f"kind must be 'first' or 'hankel', got {kind!r}")
    z = _as_complex(z)
    if np.any(z == 0):
        raise SingularityError("riccati derivative requested at z = 0")
    return _out(_riccati_scaled(n, kind, np.atleast_1d(z)).reshape(z.shape))


def riccati_derivative(n: int, kind: str, z):
    """Return ``(1/rho) d[rho z_n(rho)]/drho`` at ``rho = z``.

    ``kind`` selects ``j_n`` (``"first"``) or ``h_n^(1)`` (``"hankel"``). For
    ``n = 1`` and the first kind this is ``(sin z + cos z / z - sin z / z^2) / z``.
    """
    z = _as_complex(z)
    _guard(z)
    scale = np.exp(np.abs(z.imag)) if kind == "first" else np.exp(-z.imag)
    return _out(np.asarray(riccati_derivative_scaled(n, kind, z)) * scale)


@dataclass(frozen=True)
class SphericalFunctionValue:
    value: complex
    derivative_combo: complex


def spherical_value(n: int, kind: str, z: complex) -> SphericalFunctionValue:
    func = spherical_j if kind == "first" else spherical_h1
    return SphericalFunctionValue(complex(func(n, z)), complex(riccati_derivative(n, kind, z)))
