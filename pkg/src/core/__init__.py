"""
Core package - Lie algebra numerics, E-models and the model catalogue.

Submodules are imported directly (core.algebra, core.dynamics, ...); only the
exception hierarchy is re-exported here.
"""
from .errors import (
    EModelError,
    DimensionMismatchError,
    DomainError,
    ChartDomainError,
    PoleError,
    SingularOperatorError,
    NumericalAbortError,
    ConfigError,
)

__all__ = [
    "EModelError",
    "DimensionMismatchError",
    "DomainError",
    "ChartDomainError",
    "PoleError",
    "SingularOperatorError",
    "NumericalAbortError",
    "ConfigError",
]
