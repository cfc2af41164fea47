"""Numerical toolkit for L-functions in the Selberg-class style: local data, evaluation,
Rankin-Selberg and symmetric-power constructions, explicit bounds at the edge of the
critical strip, and explicit-formula verification."""

from __future__ import annotations

from .core import (
    ConvergenceError,
    DataGapError,
    DomainError,
    GammaShift,
    LFunctionError,
    LFunctionSpec,
    LocalFactor,
    ResourceError,
    SpecParseError,
    SpecValidationError,
    conductor,
    log_conductor,
)

__all__ = [
    "ConvergenceError", "DataGapError", "DomainError", "GammaShift", "LFunctionError",
    "LFunctionSpec", "LocalFactor", "ResourceError", "SpecParseError", "SpecValidationError",
    "conductor", "log_conductor",
]
__version__ = "0.1.0"
