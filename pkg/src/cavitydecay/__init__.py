"""Spontaneous decay of a two-level atom at the center of a dispersive, absorbing spherical cavity.

Units: hbar = eps0 = c = 1 and omega_T = 1, so lengths are in c / omega_T.
"""
from .dynamics import (AtomConfig, DecayTrace, KernelTable, decay, fit_time_shift, lamb_shift,
                       markov_amplitude, single_resonance_amplitude, single_resonance_kernel,
                       tabulate_kernel, volterra_solve)
from .errors import (BracketError, CavityError, CavityPoleError, ConvergenceWarning,
                     DomainError, KernelResolutionError, OverlapError, SingularityError)
from .green import CavityGeometry, abar, abar_thick_wall, scattering_coefficients
from .medium import LorentzMedium, permittivity, refractive_index
from .observables import (FieldPoint, SpectrumRequest, emission_pattern_freespace,
                          emission_pattern_markov, energy_ratio, spectrum_freespace_limit,
                          spectrum_markov)
from .resonances import ResonanceLine, find_resonances, solve_radius_for_resonance

__version__ = "0.1.0"
