"""P-polarized transmittance, reflectance and absorptance of a thin metal
film (degenerate electron plasma, specular boundaries) between two dielectrics."""

__version__ = "0.1.0"

from .dielectric import SODIUM, PlasmaParams, drude, eps_l, eps_tr
from .errors import ConfigError, ConvergenceError, DomainError, FilmError
from .impedance import ImpedancePair, SeriesControl, StackConfig, impedances
from .optics import (
    CONSISTENT,
    VACUUM,
    AmplitudePair,
    Flag,
    TRAResult,
    amplitudes,
    evaluate_point,
    reflectance,
    transmittance,
)
from .sweep import SweepResult, SweepSpec, find_local_extrema, run_sweep

__all__ = [
    "SODIUM", "PlasmaParams", "drude", "eps_l", "eps_tr",
    "ConfigError", "ConvergenceError", "DomainError", "FilmError",
    "ImpedancePair", "SeriesControl", "StackConfig", "impedances",
    "CONSISTENT", "VACUUM", "AmplitudePair", "Flag", "TRAResult", "amplitudes",
    "evaluate_point", "reflectance", "transmittance",
    "SweepResult", "SweepSpec", "find_local_extrema", "run_sweep",
]
