"""Upper-state amplitude of an atom at the cavity center.

The amplitude obeys the Volterra equation

    C(t) = 1 + int_0^t Kbar(t - t') C(t') dt'

with the memory kernel

    Kbar(tau) = -A0/2 + (A0 / 2 pi) int dw (w / wA) Re C33_N(w) phi(w - wA, tau),
    phi(D, tau) = (exp(-i D tau) - 1) / (i D).

The frequency integral runs over a finite window around the atomic frequency.
It is discretized on a uniform grid, and the time dependence of the discrete
sum is obtained for all tau at once by FFT, integrated exactly over each time
step so the removable point D = 0 never appears.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .errors import ConvergenceWarning, DomainError, KernelResolutionError
from .green import CavityGeometry, abar, scattering_coefficients
from .medium import LorentzMedium
from .resonances import ResonanceLine, find_resonances

MIN_OMEGA = 1e-6
MAX_OMEGA = 5.0
DEFAULT_HALF_WINDOW = 0.05
# FFT length guard, about 1 GB of complex128 workspace
MAX_FFT_LEN = 1 << 26


@dataclass(frozen=True)
class AtomConfig:
    """Two-level atom at the cavity center with a z-oriented dipole."""

    omega_a: float
    a0: float

    def __post_init__(self):
        if not self.omega_a > 0:
            raise DomainError(f"omega_a must be positive, got {self.omega_a}")
        if not self.a0 > 0:
            raise DomainError(f"a0 must be positive, got {self.a0}")

    @classmethod
    def from_hat(cls, omega_a: float, a0_hat: float) -> "AtomConfig":
        """Build from the dimensionless rate ``A0 lambda_T / (2c)``."""
        return cls(omega_a, a0_hat / math.pi)


@dataclass
class KernelTable:
    tau: np.ndarray
    values: np.ndarray
    window: tuple[float, float]
    quadrature_tol: float
    omega_step: float = 0.0
    lines: list = field(default_factory=list)

    @property
    def dtau(self) -> float:
        return float(self.tau[1] - self.tau[0])


@dataclass
class DecayTrace:
    t: np.ndarray
    cu: np.ndarray

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.cu) ** 2


def phi(delta, tau):
    """``(exp(-i delta tau) - 1) / (i delta)`` in the form ``-tau e^{-i delta tau/2} sinc``."""
    x = 0.5 * np.asarray(delta) * np.asarray(tau)
    # np.sinc(u) = sin(pi u)/(pi u) and is exact at u = 0
    return -np.asarray(tau) * np.exp(-1j * x) * np.sinc(x / np.pi)


def spectral_weight(omega, atom: AtomConfig, geometry: CavityGeometry,
                    medium: LorentzMedium, prefactor_flat: bool = False):
    """``(w / wA) Re C33_N(w)``, the reflected part of the local density of states."""
    _, c33 = scattering_coefficients(1, "N", omega, geometry, medium)
    pre = 1.0 if prefactor_flat else np.asarray(omega) / atom.omega_a
    return pre * np.real(c33)


def _nearest(lines, omega_a):
    return min(lines, key=lambda ln: abs(ln.omega_m - omega_a)) if lines else None


def default_window(atom: AtomConfig, geometry: CavityGeometry, medium: LorentzMedium,
                   lines: list[ResonanceLine] | None = None) -> tuple[float, float]:
    """Window ``wA +- max(0.05, 300 hwhm)`` around the atom, hwhm of the nearest line."""
    wa = atom.omega_a
    if lines is None:
        lines = _window_lines((max(MIN_OMEGA, wa - DEFAULT_HALF_WINDOW), wa + DEFAULT_HALF_WINDOW),
                              geometry, medium)
    near = _nearest(lines, wa)
    half = DEFAULT_HALF_WINDOW if near is None else max(DEFAULT_HALF_WINDOW, 300 * near.hwhm)
    return max(MIN_OMEGA, wa - half), min(MAX_OMEGA, wa + half)


def _window_lines(window, geometry, medium):
    lo, hi = window
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        return find_resonances((lo, hi), geometry, medium)


def tabulate_kernel(atom: AtomConfig, geometry: CavityGeometry, medium: LorentzMedium,
                    tau_max: float, dtau: float, window: tuple[float, float] | None = None,
                    quadrature_tol: float = 1e-6, prefactor_flat: bool = False,
                    omega_step: float | None = None,
                    lines: list[ResonanceLine] | None = None) -> KernelTable:
    """Tabulate the memory kernel on ``tau = 0, dtau, ..., >= tau_max``.

    The frequency step is chosen from the resonance lines found in the window:
    the line nearest the atom is resolved so that the periodic-image error of
    its Lorentzian is below ``quadrature_tol``; every other line at least to a
    period of eight times ``tau_max``. Lines narrower than the final step are
    removed from the sampled integrand as Lorentzians and added back in
    closed form, which keeps their periodic images out of the kernel.

    ``omega_step`` forces the frequency step (mainly for convergence checks).
    ``lines`` may pass the resonances of the window when already known.

    Raises
    ------
    KernelResolutionError
        If ``dtau > 1 / (4 * window_halfwidth)``.
    """
    wa, a0 = atom.omega_a, atom.a0
    if window is None:
        window = default_window(atom, geometry, medium)
        lines = None
    lo, hi = float(window[0]), float(window[1])
    if not (lo < wa < hi):
        raise DomainError(f"window ({lo}, {hi}) does not contain omega_a={wa}")
    half = max(wa - lo, hi - wa)
    if dtau > 1.0 / (4.0 * half):
        raise KernelResolutionError(
            f"dtau={dtau} too coarse for window half-width {half}; need dtau <= {1 / (4 * half):.6g}")
    if tau_max <= 0:
        raise DomainError("tau_max must be positive")

    if lines is None:
        lines = _window_lines((lo, hi), geometry, medium)
    near = _nearest(lines, wa)
    log_tol = math.log(1.0 / quadrature_tol)
    h = min(half / 1000.0, medium.gamma / 4.0)
    floor_h = 2.0 * math.pi / (8.0 * tau_max)
    for ln in lines:
        h_line = 2.0 * math.pi * ln.hwhm / log_tol
        h = min(h, h_line if ln is near else max(h_line, floor_h))
    if near is not None and not (lo < near.omega_m < hi) and abs(near.omega_m - wa) < 10 * near.hwhm:
        warnings.warn("a resonance within 10 hwhm of omega_a lies outside the kernel window",
                      ConvergenceWarning, stacklevel=2)

    if omega_step is not None:
        h = float(omega_step)
    n_tau = int(math.ceil(tau_max / dtau)) + 1
    size = max(int(math.ceil(2.0 * math.pi / (h * dtau))), 2 * n_tau)
    size = sfft.next_fast_len(size)
    if size > MAX_FFT_LEN:
        warnings.warn(f"FFT length capped at {MAX_FFT_LEN}; kernel may be under-resolved",
                      ConvergenceWarning, stacklevel=2)
        size = MAX_FFT_LEN
    h = 2.0 * math.pi / (size * dtau)

    k_lo = int(math.ceil((lo - wa) / h))
    k_hi = int(math.floor((hi - wa) / h))
    ks = np.arange(k_lo, k_hi + 1)
    delta = ks * h
    # trapezoid weights on the grid; the partial cells next to lo and hi are
    # completed by the window end points themselves, evaluated directly below
    edge_lo, edge_hi = k_lo * h - (lo - wa), (hi - wa) - k_hi * h
    weights = np.full(ks.size, h)
    weights[0] = 0.5 * (h + edge_lo)
    weights[-1] = 0.5 * (h + edge_hi)

    tau = dtau * np.arange(n_tau)
    analytic = np.zeros(n_tau, dtype=complex)
    removed = []
    for ln in lines:
        if ln is near or 2.0 * math.pi * ln.hwhm / log_tol >= h:
            continue
        height = (ln.abar_peak - 1.0) * (1.0 if prefactor_flat else ln.omega_m / wa)
        removed.append((height, ln.omega_m - wa, ln.hwhm))
        # the Lorentzian integrated against phi over the whole axis
        z = 1j * (ln.omega_m - wa) + ln.hwhm
        analytic -= math.pi * height * ln.hwhm * (-np.expm1(-z * tau)) / z

    def residual(d):
        out = spectral_weight(wa + d, atom, geometry, medium, prefactor_flat)
        for height, center, width in removed:
            out = out - height / (1.0 + ((d - center) / width) ** 2)
        return out

    f = residual(delta)
    for d_end, edge in ((lo - wa, edge_lo), (hi - wa, edge_hi)):
        if edge > 0:
            analytic += 0.5 * edge * residual(d_end) * phi(d_end, tau)

    buf = np.zeros(size, dtype=complex)
    buf[ks % size] = weights * f * phi(delta, dtau)
    # steps[l] = sum_k a_k exp(-i delta_k l dtau)
    steps = sfft.fft(buf)[: n_tau - 1]
    values = np.empty(n_tau, dtype=complex)
    values[0] = 0.0
    np.cumsum(steps, out=values[1:])
    values = -0.5 * a0 + (a0 / (2.0 * math.pi)) * (values + analytic)
    values[0] = -0.5 * a0
    return KernelTable(tau, values, (lo, hi), quadrature_tol, h, lines)


def kernel_direct(tau: float, atom: AtomConfig, geometry: CavityGeometry, medium: LorentzMedium,
                  window: tuple[float, float], prefactor_flat: bool = False,
                  points=(), limit: int = 2000) -> complex:
    """Kernel at one ``tau`` by adaptive quadrature; slow reference path."""
    lo, hi = window
    wa = atom.omega_a

    def integrand(w, part):
        v = spectral_weight(w, atom, geometry, medium, prefactor_flat) * phi(w - wa, tau)
        return float(v.real if part == 0 else v.imag)

    brk = sorted({p for p in points if lo < p < hi} | {wa})
    edges = [lo, *brk, hi]
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        re = quad(integrand, a, b, args=(0,), limit=limit, epsabs=0, epsrel=1e-10)[0]
        im = quad(integrand, a, b, args=(1,), limit=limit, epsabs=0, epsrel=1e-10)[0]
        total += re + 1j * im
    return -0.5 * atom.a0 + atom.a0 / (2.0 * math.pi) * total


def volterra_solve(kernel: KernelTable, t_max: float, dt: float | None = None) -> DecayTrace:
    """March the Volterra equation with the trapezoidal rule.

    The time grid is the kernel's tau grid. Each step solves the implicit
    diagonal term ``(1 - dt/2 Kbar(0)) C_j = 1 + dt [Kbar_j C_0 / 2 + sum_i Kbar_{j-i} C_i]``.
    """
    step = kernel.dtau
    if dt is not None and not math.isclose(dt, step, rel_tol=1e-9):
        raise DomainError(f"dt={dt} must equal the kernel step {step}")
    n = int(round(t_max / step))
    if n + 1 > kernel.values.size:
        raise DomainError(f"t_max={t_max} exceeds the tabulated kernel range {kernel.tau[-1]}")
    kb = kernel.values[: n + 1]
    diag = 1.0 - 0.5 * step * kb[0]
    if abs(diag) < 1e-8:
        raise DomainError("step size makes the implicit diagonal term singular")

    krev = np.ascontiguousarray(kb[::-1])
    cu = np.zeros(n + 1, dtype=complex)
    cu[0] = 1.0
    for j in range(1, n + 1):
        # sum_{i=1}^{j-1} Kbar_{j-i} C_i ; krev[n - m] = Kbar_m
        acc = np.dot(krev[n - j + 1: n], cu[1:j]) if j > 1 else 0.0
        cu[j] = (1.0 + step * (0.5 * kb[j] + acc)) / diag
    return DecayTrace(step * np.arange(n + 1), cu)


def lamb_shift(atom: AtomConfig, geometry: CavityGeometry, medium: LorentzMedium,
               window: tuple[float, float] | None = None, prefactor_flat: bool = False,
               lines: list[ResonanceLine] | None = None) -> float:
    """Cavity line shift ``(A0/pi) PV int (w/wA) Re C33_N / (w - wA) dw`` over the window.

    The principal value is taken by subtracting the value at the pole and
    adding back its logarithmic integral.
    """
    wa = atom.omega_a
    if window is None:
        window = default_window(atom, geometry, medium, lines)
    lo, hi = window
    if not (lo < wa < hi):
        raise DomainError(f"omega_a={wa} must lie strictly inside the window ({lo}, {hi})")
    if lines is None:
        lines = _window_lines(window, geometry, medium)
    fa = float(spectral_weight(wa, atom, geometry, medium, prefactor_flat))

    def g(w):
        return (float(spectral_weight(w, atom, geometry, medium, prefactor_flat)) - fa) / (w - wa)

    pts = {wa}
    for ln in lines:
        for m in (0.0, 3.0, 30.0, 300.0):
            pts.update((ln.omega_m - m * ln.hwhm, ln.omega_m + m * ln.hwhm))
    edges = [lo, *sorted(p for p in pts if lo < p < hi), hi]
    total = sum(quad(g, a, b, limit=200, epsabs=1e-12, epsrel=1e-9)[0]
                for a, b in zip(edges[:-1], edges[1:]))
    total += fa * math.log((hi - wa) / (wa - lo))
    return atom.a0 / math.pi * total


def markov_amplitude(atom: AtomConfig, geometry: CavityGeometry, medium: LorentzMedium, t,
                     delta_omega: float | None = None, window=None):
    """Exponential amplitude ``exp[-(A - i dw) t / 2]`` with ``A = abar(wA) A0``."""
    rate = abar(atom.omega_a, geometry, medium) * atom.a0
    if delta_omega is None:
        delta_omega = 0.0 if medium.omega_p == 0 else lamb_shift(atom, geometry, medium, window)
    return np.exp(-0.5 * (rate - 1j * delta_omega) * np.asarray(t))


def single_resonance_kernel(line: ResonanceLine, atom: AtomConfig, tau):
    """Differential kernel of one Lorentzian line (not the integrated kernel)."""
    tau = np.asarray(tau)
    det = line.omega_m - atom.omega_a
    return (-0.5 * atom.a0 * line.abar_peak * line.hwhm
            * np.exp(-1j * det * tau) * np.exp(-line.hwhm * np.abs(tau)))


def single_resonance_amplitude(line: ResonanceLine, atom: AtomConfig, t):
    """Closed-form solution of the damped-oscillator amplitude equation.

    ``C'' + (i (wm - wA) + hwhm) C' + (Omega/2)^2 C = 0`` with ``C(0) = 1``,
    ``C'(0) = 0`` and ``Omega^2 = 2 A0 abar_peak hwhm``.
    """
    t = np.asarray(t, dtype=float)
    b = 1j * (line.omega_m - atom.omega_a) + line.hwhm
    w2 = 2.0 * atom.a0 * line.abar_peak * line.hwhm
    root = np.sqrt(complex(b * b - w2))
    sp, sm = 0.5 * (-b + root), 0.5 * (-b - root)
    if abs(sp - sm) < 1e-12 * max(abs(sp), abs(sm), 1e-300):
        s = 0.5 * (sp + sm)
        return (1.0 - s * t) * np.exp(s * t)
    return (sp * np.exp(sm * t) - sm * np.exp(sp * t)) / (sp - sm)


def fit_time_shift(trace: DecayTrace, line: ResonanceLine, atom: AtomConfig,
                   t_end: float | None = None, max_shift: float | None = None):
    """Least-squares delay of the single-resonance population against ``trace``.

    The model is ``|C(t - shift)|^2`` for ``t >= shift`` and 1 before.
    Returns ``(shift, max_abs_deviation)`` over ``t <= t_end``.
    """
    t = trace.t if t_end is None else trace.t[trace.t <= t_end]
    pop = trace.population[: t.size]
    if max_shift is None:
        max_shift = 0.25 * t[-1]

    def model(s):
        return np.abs(single_resonance_amplitude(line, atom, np.maximum(t - s, 0.0))) ** 2

    res = minimize_scalar(lambda s: float(np.sum((model(s) - pop) ** 2)),
                          bounds=(-max_shift, max_shift), method="bounded",
                          options={"xatol": 1e-6 * max_shift})
    return float(res.x), float(np.max(np.abs(model(res.x) - pop)))


def default_time_step(window: tuple[float, float], atom: AtomConfig,
                      rabi_estimate: float = 0.0) -> float:
    half = max(atom.omega_a - window[0], window[1] - atom.omega_a)
    dt = 0.1 / half
    if rabi_estimate > 0:
        dt = min(dt, 0.02 * 2.0 * math.pi / rabi_estimate)
    return dt


def default_t_max(atom: AtomConfig, line: ResonanceLine | None, abar_a: float,
                  strictness: float = 3.0) -> float:
    """``5 / max(hwhm, A0 abar / 2)``; in strong coupling at most four Rabi periods."""
    rate = atom.a0 * abar_a / 2.0
    if line is None:
        return 5.0 / rate
    rabi = math.sqrt(2.0 * atom.a0 * line.abar_peak * line.hwhm)
    if rabi > strictness * line.hwhm:
        return min(5.0 / line.hwhm, 4.0 * 2.0 * math.pi / rabi)
    return 5.0 / max(rate, line.hwhm)


def decay(atom: AtomConfig, geometry: CavityGeometry, medium: LorentzMedium,
          t_max: float | None = None, dt: float | None = None, window=None,
          quadrature_tol: float = 1e-6, prefactor_flat: bool = False) -> DecayTrace:
    """Kernel tabulation plus Volterra march with the default numerical controls."""
    if window is None:
        window = default_window(atom, geometry, medium)
    lines = _window_lines(window, geometry, medium)
    near = _nearest(lines, atom.omega_a)
    rabi = 0.0
    if near is not None:
        rabi = math.sqrt(2 * atom.a0 * near.abar_peak * near.hwhm)
        # a line counts only if the atom sits within its coupling bandwidth
        if abs(near.omega_m - atom.omega_a) > 10 * near.hwhm + rabi:
            near, rabi = None, 0.0
    if dt is None:
        dt = default_time_step(window, atom, rabi)
    if t_max is None:
        t_max = default_t_max(atom, near, abar(atom.omega_a, geometry, medium))
    kern = tabulate_kernel(atom, geometry, medium, t_max, dt, window, quadrature_tol,
                           prefactor_flat, lines=lines)
    return volterra_solve(kern, t_max)
