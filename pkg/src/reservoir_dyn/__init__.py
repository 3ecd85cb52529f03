"""Transient dynamics of two-level atoms coupled to structured plasmonic reservoirs.

The package solves the memory-kernel Volterra integral equations for the
population amplitudes of excited-state and ground-state atoms above a
(optionally magnetized) plasma half-space, evaluates the exact transient
vertical force and its Markov-approximation ladder, and performs the
Laplace-domain pole/residue analysis of the ground-state amplitude.

All internal computation uses normalized units: frequencies in units of the
plasma frequency omega_p, lengths in c/omega_p, times in 1/omega_p. SI values
appear only at the configuration and output boundaries.
"""

from .config import (
    AtomConfig,
    ConfigError,
    Scenario,
    UnitSystem,
    compute_coupling_g,
    invert_g_for_dipole,
    parse_scenario,
    render_scenario,
    scenario_digest,
)
from .material import MaterialConfig, PermittivityTensor, permittivity
from .spectral import SpectralDensity, build_spectral_density, kernel_at, make_kernel
from .volterra import AmplitudeTrace, convergence_order, solve_vie
from .markov import MarkovSummary, decay_rate, lamb_shift_excited, lamb_shift_ground
from .laplace import PoleSummary, branch_cut_check, find_pole, gamma_of_s

__all__ = [
    "AtomConfig",
    "AmplitudeTrace",
    "ConfigError",
    "MarkovSummary",
    "MaterialConfig",
    "PermittivityTensor",
    "PoleSummary",
    "Scenario",
    "SpectralDensity",
    "UnitSystem",
    "branch_cut_check",
    "build_spectral_density",
    "compute_coupling_g",
    "convergence_order",
    "decay_rate",
    "find_pole",
    "gamma_of_s",
    "invert_g_for_dipole",
    "kernel_at",
    "lamb_shift_excited",
    "lamb_shift_ground",
    "make_kernel",
    "parse_scenario",
    "permittivity",
    "render_scenario",
    "scenario_digest",
    "solve_vie",
]

__version__ = "0.1.0"
