"""Cavity resonance lines of the relative decay rate.

Lines are located by a grid scan of ``abar`` followed by golden-section
refinement; widths are measured against the free-space baseline ``abar = 1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, ConvergenceWarning, DomainError, OverlapError
from .green import CavityGeometry, abar
from .medium import LorentzMedium, refractive_index

# scan points per unit frequency below which a grid warning is emitted
DEFAULT_SCAN_DENSITY = 20_000
INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ResonanceLine:
    omega_m: float
    abar_peak: float
    hwhm: float
    rabi: float = 0.0
    in_gap: bool = False
    strong_coupling: bool = False

    def __post_init__(self):
        if not self.hwhm > 0:
            raise DomainError(f"hwhm must be positive, got {self.hwhm}")
        if self.rabi < 0:
            raise DomainError(f"rabi frequency must be non-negative, got {self.rabi}")


def golden_max(func, a, b, tol=1e-10):
    """Maximize a unimodal ``func`` on ``[a, b]`` by golden-section search."""
    x1 = b - INV_GOLDEN * (b - a)
    x2 = a + INV_GOLDEN * (b - a)
    f1, f2 = func(x1), func(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_GOLDEN * (b - a)
            f2 = func(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_GOLDEN * (b - a)
            f1 = func(x1)
    x = 0.5 * (a + b)
    return x, func(x)


def rabi_frequency(abar_peak: float, hwhm: float, a0: float) -> float:
    """Vacuum Rabi frequency ``sqrt(2 A0 abar(omega_m) delta_omega_m)`` of a single line."""
    if abar_peak < 0 or hwhm < 0 or a0 < 0:
        raise DomainError("rabi_frequency needs non-negative inputs")
    return math.sqrt(2.0 * a0 * abar_peak * hwhm)


def is_strong(rabi: float, hwhm: float, strictness: float = 3.0) -> bool:
    return bool(rabi > strictness * hwhm)


def measure_hwhm(omega_m: float, geometry: CavityGeometry, medium: LorentzMedium,
                 peak: float | None = None, max_offset: float = 0.2) -> float:
    """Half width at half maximum of the resonant excess ``abar - 1``.

    Each side is walked outward with doubling steps until ``abar`` drops
    below ``1 + (peak - 1) / 2``, then the crossing is polished with Brent's
    method. The mean of the two half-widths is returned.

    Raises
    ------
    OverlapError
        If ``abar`` starts rising again before half height is reached.
    """
    f = lambda w: abar(w, geometry, medium)  # noqa: E731
    top = f(omega_m) if peak is None else peak
    if top <= 1.0:
        raise DomainError(f"no resonant excess at omega={omega_m} (abar={top})")
    half = 1.0 + 0.5 * (top - 1.0)

    widths = []
    for side in (-1.0, 1.0):
        step, prev_x, prev_v = 1e-8, omega_m, top
        while True:
            x = omega_m + side * step
            if step > max_offset or x <= 0:
                raise OverlapError(f"half height not reached within {max_offset} of {omega_m}")
            v = f(x)
            if v < half:
                break
            if v > prev_v:
                raise OverlapError(f"neighbouring line before half height near {omega_m}")
            prev_x, prev_v, step = x, v, 2.0 * step
        cross = brentq(lambda w: f(w) - half, min(prev_x, x), max(prev_x, x), xtol=1e-14)
        widths.append(abs(cross - omega_m))
    return 0.5 * (widths[0] + widths[1])


def find_resonances(omega_range, geometry: CavityGeometry, medium: LorentzMedium,
                    scan_points: int | None = None, a0: float | None = None,
                    strictness: float = 3.0, tol: float = 1e-10) -> list[ResonanceLine]:
    """Locate the resonance lines of ``abar`` inside ``omega_range``.

    Parameters
    ----------
    omega_range : (float, float)
        Frequency interval to scan.
    scan_points : int, optional
        Grid size, at least 1000. Defaults to 20 000 points per unit frequency.
    a0 : float, optional
        Free-space decay rate; when given, each line carries its Rabi frequency
        and strong-coupling flag.
    strictness : float
        Strong coupling means ``rabi > strictness * hwhm``.

    Returns
    -------
    list of ResonanceLine
        Sorted by frequency; empty when ``abar`` has no maximum above 1.
        Maxima whose half height merges into a neighbouring line are skipped
        with a warning.
    """
    lo, hi = map(float, omega_range)
    if not (0 < lo < hi):
        raise DomainError(f"invalid frequency range ({lo}, {hi})")
    width = hi - lo
    if scan_points is None:
        scan_points = max(1000, int(math.ceil(DEFAULT_SCAN_DENSITY * width)) + 1)
    if scan_points < 1000:
        raise DomainError("scan_points must be at least 1000")
    if scan_points < DEFAULT_SCAN_DENSITY * width:
        warnings.warn(f"scan grid coarser than {DEFAULT_SCAN_DENSITY} points per unit "
                      "frequency; narrow lines may be missed", ConvergenceWarning, stacklevel=2)

    grid = np.linspace(lo, hi, scan_points)
    vals = np.asarray(abar(grid, geometry, medium))
    idx = np.flatnonzero((vals[1:-1] > vals[:-2]) & (vals[1:-1] > vals[2:]) & (vals[1:-1] > 1.0)) + 1

    gap_lo, gap_hi = medium.omega_t, medium.omega_l
    f = lambda w: abar(w, geometry, medium)  # noqa: E731
    lines = []
    for i in idx:
        a, b = grid[i - 1], grid[i + 1]
        w_m, peak = golden_max(f, a, b, tol)
        if min(w_m - a, b - w_m) < 2 * tol:
            warnings.warn(f"refined peak near {w_m:.9f} hit the bracket edge; grid too coarse",
                          ConvergenceWarning, stacklevel=2)
        try:
            hw = measure_hwhm(w_m, geometry, medium, peak)
        except OverlapError as exc:
            warnings.warn(f"skipping line at {w_m:.9f}: {exc}", ConvergenceWarning, stacklevel=2)
            continue
        rabi = rabi_frequency(peak, hw, a0) if a0 else 0.0
        lines.append(ResonanceLine(
            omega_m=float(w_m), abar_peak=float(peak), hwhm=float(hw), rabi=rabi,
            in_gap=bool(gap_lo < w_m < gap_hi),
            strong_coupling=is_strong(rabi, hw, strictness)))
    return sorted(lines, key=lambda ln: ln.omega_m)


def estimate_gap_line(omega_m: float, medium: LorentzMedium, geometry: CavityGeometry):
    """Analytic height and half-width of an in-gap line for small ``gamma``.

    Returns ``(abar_peak, hwhm)`` with
    ``abar_peak = 2 sqrt((wL^2 - w^2)(w^2 - wT^2)) / (gamma w)`` and
    ``hwhm = 1 / (R2 abar_peak)``.
    """
    wt, wl = medium.omega_t, medium.omega_l
    if not (wt < omega_m < wl):
        raise DomainError(f"omega_m={omega_m} outside the band gap ({wt}, {wl})")
    height = 2.0 * math.sqrt((wl**2 - omega_m**2) * (omega_m**2 - wt**2)) / (medium.gamma * omega_m)
    return height, 1.0 / (geometry.r2 * height)


def estimate_dispersive_line(omega_m: float, medium: LorentzMedium, geometry: CavityGeometry):
    """Height ``~ n_R`` and half-width of a line below the gap (normal dispersion)."""
    wt, wl = medium.omega_t, medium.omega_l
    if not (0 < omega_m < wt):
        raise DomainError(f"omega_m={omega_m} is not below omega_t={wt}")
    height = math.sqrt((wl**2 - omega_m**2) / (wt**2 - omega_m**2))
    return height, 1.0 / (geometry.r2 * height)


@dataclass(frozen=True)
class RadiusTuning:
    """Inner radii (units of c/omega_T) that put a line at the target frequency.

    ``r2_condition`` solves the opaque-wall resonance condition exactly;
    ``r2_full`` maximizes the full ``abar(omega_target)`` over R2.
    """

    omega_target: float
    r2_condition: float
    r2_full: float
    abar_full: float


def _condition_angle(n: complex) -> float:
    # tan(R2 w) = [(|n|^2-1) - sqrt((|n|^2-1)^2 + 4 nI^2)] / (2 nI), cancellation-free
    a = abs(n) ** 2 - 1.0
    b = n.imag
    return math.atan2(-2.0 * b, a + math.hypot(a, 2.0 * b))


def solve_radius_for_resonance(omega_target: float, medium: LorentzMedium, r2_hint: float,
                               d: float, scan_points: int = 2001) -> RadiusTuning:
    """Tune the inner radius so that a cavity line sits at ``omega_target``.

    The wall thickness ``d`` is held fixed. The condition root is bracketed by
    one full period of ``tan(R2 omega)`` centered on ``r2_hint``.
    """
    w = float(omega_target)
    n = complex(refractive_index(medium, w))
    theta = _condition_angle(n)
    # sin(x - theta) = 0 is the pole-free form of tan x = tan theta
    g = lambda r2: math.sin(r2 * w - theta)  # noqa: E731
    period = math.pi / w
    a, b = r2_hint - 0.5 * period, r2_hint + 0.5 * period
    if g(a) * g(b) > 0:
        raise BracketError(f"no sign change for R2 in [{a}, {b}]")
    r2c = brentq(g, a, b, xtol=1e-13)

    f = lambda r2: abar(w, CavityGeometry(r2 + d, r2), medium)  # noqa: E731
    half = 0.25 * period
    grid = np.linspace(r2c - half, r2c + half, scan_points)
    vals = np.array([f(x) for x in grid])
    i = int(np.clip(np.argmax(vals), 1, scan_points - 2))
    r2f, top = golden_max(f, grid[i - 1], grid[i + 1], tol=1e-10)
    return RadiusTuning(w, r2c, float(r2f), float(top))
