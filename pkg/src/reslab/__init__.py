"""Engineered-reservoir simulation lab for driven ion-cavity systems."""

from .errors import (
    ConfigError,
    DimensionMismatchError,
    IllConditionedPathError,
    IntegrationDivergenceError,
    NotHermitianError,
    RegimeError,
    SimulationError,
    SteadyStateError,
)
from .lindblad import LindbladTerm, MasterEquation, Trajectory, evolve, steady_state
from .model import ModelParams

__all__ = [
    "ConfigError",
    "DimensionMismatchError",
    "IllConditionedPathError",
    "IntegrationDivergenceError",
    "NotHermitianError",
    "RegimeError",
    "SimulationError",
    "SteadyStateError",
    "LindbladTerm",
    "MasterEquation",
    "Trajectory",
    "evolve",
    "steady_state",
    "ModelParams",
]

__version__ = "0.1.0"
