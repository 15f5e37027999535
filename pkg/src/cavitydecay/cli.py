"""Command-line front end: key=value configuration in, CSV out.

Usage::

    cavitydecay SUBCOMMAND [--config FILE] [--out PATH] [--strict] [--KEY VALUE ...]

Configuration keys can come from a file (one ``key = value`` per line, ``#``
starts a comment) and be overridden on the command line as ``--key value``.
An empty configuration reproduces the Fig. 3 cavity.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import math
import sys
import warnings
from dataclasses import dataclass, fields

import numpy as np

from .dynamics import (AtomConfig, decay, default_t_max, default_window, lamb_shift,
                       markov_amplitude)
from .errors import CavityError, ConvergenceWarning, DomainError
from .green import CavityGeometry, abar
from .medium import LorentzMedium, permittivity, refractive_index
from .observables import (FieldPoint, SpectrumRequest, emission_pattern_markov,
                          energy_ratio, spectrum_markov)
from .resonances import find_resonances, solve_radius_for_resonance

TWO_PI = 2.0 * math.pi

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_STRICT = 4

SUBCOMMANDS = ("epsilon", "abar", "resonances", "decay", "markov", "spectrum", "pattern",
               "energy", "solve-radius")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # medium and geometry (lengths in units of lambda_T)
    omega_p: float = 0.5
    gamma: float = 1e-2
    r2_lambda: float = 30.0
    d_lambda: float = 1.0
    # atom
    omega_a: float = 1.046448
    a0_hat: float = 1e-6
    # frequency sweeps and resonance scan
    omega_min: float = 0.9
    omega_max: float = 1.2
    omega_points: int = 3001
    scan_points: int = 0
    strictness: float = 3.0
    # dynamics; zero selects the automatic value
    window_lo: float = 0.0
    window_hi: float = 0.0
    dtau: float = 0.0
    dt: float = 0.0
    t_max: float = 0.0
    quadrature_tol: float = 1e-6
    prefactor_flat: bool = False
    max_rows: int = 5000
    # observables
    rho_lambda: float = 100.0
    theta_points: int = 19
    a0t_max: float = 5.0
    t_points: int = 6
    t_window_a0: float = 50.0
    spectrum_halfwidth: float = 10.0
    # radius tuning
    omega_target: float = 0.9999
    r2_hint_lambda: float = 30.0

    def validate(self) -> None:
        positive = ("gamma", "r2_lambda", "d_lambda", "omega_a", "a0_hat", "omega_min",
                    "omega_max", "quadrature_tol", "rho_lambda", "a0t_max", "t_window_a0",
                    "spectrum_halfwidth", "omega_target", "r2_hint_lambda", "strictness")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        nonneg = ("omega_p", "window_lo", "window_hi", "dtau", "dt", "t_max", "scan_points")
        for name in nonneg:
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.omega_min >= self.omega_max:
            raise ConfigError("omega_min must be below omega_max")
        for name in ("omega_points", "theta_points", "t_points", "max_rows"):
            if getattr(self, name) < 2:
                raise ConfigError(f"{name} must be at least 2")
        if (self.window_lo > 0) != (self.window_hi > 0):
            raise ConfigError("window_lo and window_hi must be given together")
        if self.dtau and self.dt and not math.isclose(self.dtau, self.dt):
            raise ConfigError("dtau and dt share one grid and must be equal")

    # physical objects
    def medium(self) -> LorentzMedium:
        return LorentzMedium(self.omega_p, self.gamma)

    def geometry(self) -> CavityGeometry:
        return CavityGeometry.from_lambda(self.r2_lambda, self.d_lambda)

    def atom(self) -> AtomConfig:
        return AtomConfig.from_hat(self.omega_a, self.a0_hat)

    def window(self):
        return (self.window_lo, self.window_hi) if self.window_hi > 0 else None

    def step(self):
        return self.dt or self.dtau or None


def _convert(field_type, raw: str, key: str):
    text = raw.strip()
    try:
        if field_type in (bool, "bool"):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if field_type in (int, "int"):
            return int(float(text)) if float(text).is_integer() else int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None


def _valid_keys() -> list[str]:
    return [f.name for f in fields(RunConfig)]


def _apply(values: dict, key: str, raw: str, where: str = "") -> None:
    types = {f.name: f.type for f in fields(RunConfig)}
    if key not in types:
        raise ConfigError(f"unknown key {key!r}{where}; valid keys: {', '.join(_valid_keys())}")
    values[key] = _convert(types[key], raw, key)


def parse_config(text: str = "", overrides: dict | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from ``key = value`` text plus overrides.

    Raises
    ------
    ConfigError
        On malformed lines (with line number), unknown keys or invalid values.
    """
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if not key or not raw:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        _apply(values, key, raw, f" on line {lineno}")
    for key, raw in (overrides or {}).items():
        _apply(values, key, str(raw))
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return format(float(v), ".12g")


def _write_csv(stream, header, rows) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _sweep(cfg):
    return np.linspace(cfg.omega_min, cfg.omega_max, cfg.omega_points)


def _cmd_epsilon(cfg):
    w = _sweep(cfg)
    eps = permittivity(cfg.medium(), w)
    n = refractive_index(cfg.medium(), w)
    return ("omega", "eps_re", "eps_im", "n_re", "n_im"), zip(w, eps.real, eps.imag, n.real, n.imag)


def _cmd_abar(cfg):
    w = _sweep(cfg)
    return ("omega", "abar"), zip(w, abar(w, cfg.geometry(), cfg.medium()))


def _cmd_energy(cfg):
    w = _sweep(cfg)
    return ("omega_a", "w_ratio"), zip(w, energy_ratio(w, cfg.geometry(), cfg.medium()))


def _cmd_resonances(cfg):
    lines = find_resonances((cfg.omega_min, cfg.omega_max), cfg.geometry(), cfg.medium(),
                            scan_points=cfg.scan_points or None, a0=cfg.atom().a0,
                            strictness=cfg.strictness)
    header = ("omega_m", "abar_peak", "hwhm", "rabi", "in_gap", "strong")
    return header, ((ln.omega_m, ln.abar_peak, ln.hwhm, ln.rabi, ln.in_gap, ln.strong_coupling)
                    for ln in lines)


def _thin(t, cu, max_rows):
    stride = max(1, math.ceil((t.size - 1) / (max_rows - 1)))
    idx = np.arange(0, t.size, stride)
    if idx[-1] != t.size - 1:
        idx = np.append(idx, t.size - 1)
    return t[idx], cu[idx]


def _amplitude_rows(t, cu, a0):
    return zip(t, a0 * t, cu.real, cu.imag, np.abs(cu) ** 2)


def _cmd_decay(cfg):
    atom = cfg.atom()
    trace = decay(atom, cfg.geometry(), cfg.medium(), t_max=cfg.t_max or None, dt=cfg.step(),
                  window=cfg.window(), quadrature_tol=cfg.quadrature_tol,
                  prefactor_flat=cfg.prefactor_flat)
    t, cu = _thin(trace.t, trace.cu, cfg.max_rows)
    return ("t", "a0t", "re_cu", "im_cu", "pop"), _amplitude_rows(t, cu, atom.a0)


def _cmd_markov(cfg):
    atom, geo, med = cfg.atom(), cfg.geometry(), cfg.medium()
    window = cfg.window() or default_window(atom, geo, med)
    shift = 0.0 if med.omega_p == 0 else lamb_shift(atom, geo, med, window)
    t_max = cfg.t_max or default_t_max(atom, None, abar(atom.omega_a, geo, med))
    t = np.linspace(0.0, t_max, cfg.max_rows)
    cu = markov_amplitude(atom, geo, med, t, delta_omega=shift)
    return ("t", "a0t", "re_cu", "im_cu", "pop"), _amplitude_rows(t, cu, atom.a0)


def _cmd_spectrum(cfg):
    atom, geo, med = cfg.atom(), cfg.geometry(), cfg.medium()
    rate = abar(atom.omega_a, geo, med) * atom.a0
    shift = 0.0 if med.omega_p == 0 else lamb_shift(atom, geo, med, cfg.window())
    center = atom.omega_a - 0.5 * shift
    ws = center + np.linspace(-1.0, 1.0, cfg.omega_points) * cfg.spectrum_halfwidth * rate
    req = SpectrumRequest(ws, cfg.t_window_a0 / atom.a0)
    point = FieldPoint(TWO_PI * cfg.rho_lambda, 0.5 * math.pi)
    s = spectrum_markov(req, point, atom, geo, med, delta_omega=shift)
    return ("omega_s", "s"), zip(ws, s)


def _cmd_pattern(cfg):
    atom, geo, med = cfg.atom(), cfg.geometry(), cfg.medium()
    thetas = np.linspace(0.0, math.pi, cfg.theta_points)
    times = np.linspace(0.0, cfg.a0t_max / atom.a0, cfg.t_points)
    rows = []
    for th in thetas:
        point = FieldPoint(TWO_PI * cfg.rho_lambda, float(th))
        vals = emission_pattern_markov(point, times, atom, geo, med)
        rows.extend(zip(np.full(times.size, th), times, vals))
    return ("theta", "t", "intensity"), rows


def _cmd_solve_radius(cfg):
    res = solve_radius_for_resonance(cfg.omega_target, cfg.medium(), TWO_PI * cfg.r2_hint_lambda,
                                     TWO_PI * cfg.d_lambda)
    row = (res.omega_target, res.r2_condition / TWO_PI, res.r2_full / TWO_PI)
    return ("omega_target", "r2_condition", "r2_full"), [row]


_COMMANDS = {
    "epsilon": _cmd_epsilon,
    "abar": _cmd_abar,
    "resonances": _cmd_resonances,
    "decay": _cmd_decay,
    "markov": _cmd_markov,
    "spectrum": _cmd_spectrum,
    "pattern": _cmd_pattern,
    "energy": _cmd_energy,
    "solve-radius": _cmd_solve_radius,
}


def run_subcommand(name: str, cfg: RunConfig, stream) -> None:
    """Run one subcommand and write its CSV to ``stream``."""
    if name not in _COMMANDS:
        raise ConfigError(f"unknown subcommand {name!r}; choose from {', '.join(SUBCOMMANDS)}")
    header, rows = _COMMANDS[name](cfg)
    _write_csv(stream, header, rows)


def _parse_overrides(tokens: list[str]) -> dict:
    out = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:].replace("-", "_")
        if "=" in key:
            key, raw = key.split("=", 1)
        else:
            raw = next(it, None)
            if raw is None:
                raise ConfigError(f"missing value for --{key}")
        out[key] = raw
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cavitydecay",
        description="Spontaneous decay of an atom in a dispersive, absorbing spherical cavity.",
        epilog="Any configuration key can be overridden as --key value. "
               "Keys: " + ", ".join(_valid_keys()))
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--strict", action="store_true", help="treat convergence warnings as errors")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        cfg = parse_config(text, _parse_overrides(rest))
        cfg.medium(), cfg.geometry(), cfg.atom()
    except (ConfigError, DomainError, OSError) as exc:
        print(f"cavitydecay: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    buf = io.StringIO()
    try:
        with warnings.catch_warnings():
            if args.strict:
                warnings.simplefilter("error", ConvergenceWarning)
            run_subcommand(args.subcommand, cfg, buf)
    except ConvergenceWarning as exc:
        print(f"cavitydecay: convergence warning (strict): {exc}", file=sys.stderr)
        return EXIT_STRICT
    except (CavityError, ValueError, ZeroDivisionError, FloatingPointError) as exc:
        print(f"cavitydecay: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def config_as_text(cfg: RunConfig) -> str:
    """Render a configuration back to ``key = value`` lines."""
    return "".join(f"{k} = {v}\n" for k, v in dataclasses.asdict(cfg).items())


if __name__ == "__main__":
    sys.exit(main())
