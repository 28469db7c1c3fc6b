"""Oscillating-wall rarefied gas flow: Neumann-series solution of the BGK half-space problem."""

from .asymptotics import AsymptoticProfile, asymptotic_profile, figure_data, hf_velocity
from .errors import (ConditioningError, ConfigError, DegeneracyError, DomainError, NumericalError,
                     QuadratureError, ResolutionError, SeriesDivergenceWarning, Stokes2Error)
from .grid import GridSpec, KGrid, fourier_weights, make_grid
from .inversion import (DistributionSlice, VelocityProfile, boundary_residual, distribution_slice,
                        gauss_hermite_mu, maxwell_mu_rule, residue_check, slice_velocity,
                        total_velocity, velocity_term)
from .kernels import (DEFAULT_QUAD, ProblemParams, QuadratureSpec, coupling_matrix, eval_J, eval_L,
                      eval_lambda, eval_T, eval_T1_abs)
from .neumann import (SeriesSolution, SpectralDensity, build_series, next_term, phi_term,
                      source_coefficient, zeroth_term)
from .oracle import NystromSystem, oracle_velocity, solve_fredholm

__version__ = "0.1.0"

__all__ = [
    "AsymptoticProfile", "ConditioningError", "ConfigError", "DEFAULT_QUAD", "DegeneracyError",
    "DistributionSlice", "DomainError", "GridSpec", "KGrid", "NumericalError", "NystromSystem",
    "ProblemParams", "QuadratureError", "QuadratureSpec", "ResolutionError", "SeriesDivergenceWarning",
    "SeriesSolution", "SpectralDensity", "Stokes2Error", "VelocityProfile", "asymptotic_profile",
    "boundary_residual", "build_series", "coupling_matrix", "distribution_slice", "eval_J", "eval_L",
    "eval_T", "eval_T1_abs", "eval_lambda", "figure_data", "fourier_weights", "gauss_hermite_mu",
    "hf_velocity", "make_grid", "maxwell_mu_rule", "next_term", "oracle_velocity", "phi_term",
    "residue_check", "slice_velocity", "solve_fredholm", "source_coefficient", "total_velocity",
    "velocity_term", "zeroth_term",
]
