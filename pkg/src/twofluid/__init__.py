"""Entropy-stable, divergence-preserving ideal two-fluid plasma solver on 2D structured grids."""
from .grid import BoundaryKind, ConfigError, Grid2D, fill_ghosts
from .maxwell_flux import Mode
from .problems import ProblemSpec, get_problem, init
from .state import AdmissibilityError, GasParams
from .timeint import Discretization, Integrator, SchemeConfig, compute_dt, step

__all__ = [
    "AdmissibilityError", "BoundaryKind", "ConfigError", "Discretization", "GasParams",
    "Grid2D", "Integrator", "Mode", "ProblemSpec", "SchemeConfig", "compute_dt",
    "fill_ghosts", "get_problem", "init", "step",
]
__version__ = "0.1.0"
