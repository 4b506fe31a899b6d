"""Tensor-product spectral-element and Hermite solvers for Schrodinger-type problems."""
from .errors import (
    BreakdownError,
    CapabilityError,
    ConfigError,
    DivergenceError,
    NumericalError,
    ParameterError,
    SchrodError,
    ShiftError,
    SingularShiftError,
)

__version__ = "0.1.0"
