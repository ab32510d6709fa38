"""Relaxation and thermalization of Turing-machine Hamiltonians.

Thin wrapper over the compiled ``_thermo`` extension.
"""

from ._thermo import (  # noqa: F401
    Polynomial,
    ThermoError,
    closed_form_halting,
    corpus,
    cycle_spectrum,
    estimate_long_time_average,
    gaussian_poly,
    gibbs_weights,
    microcanonical_weights,
    min_gap_path,
    orbit_summary,
    path_spectrum,
    prepare_microcanonical,
    relax,
    solve_beta,
    sqrt_poly,
    therm,
    tune_p,
)

__all__ = [name for name in dir() if not name.startswith("_")]
