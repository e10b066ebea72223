"""Casimir energy and forces for two plates across a layered medium."""
from .errors import (
    CasimirError,
    DegenerateError,
    DomainError,
    NonConvergence,
    ParseError,
    ValidationError,
)
from .fresnel import (
    CoatedHalfSpace,
    Layer,
    PhaseReflector,
    StackCoefficients,
    compose,
    plate_reflection,
    single_interface,
    stack_coefficients,
)
from .kernel import SystemConfig
from .materials import Constant, Oscillator, OscillatorSum, SpectralPoint, Vacuum
from .quadrature import (
    CasimirResult,
    QuadratureSpec,
    casimir_energy,
    casimir_forces,
    effective_energy,
    integrate_spectrum,
    two_stack_energy,
)

__all__ = [
    "CasimirError", "DegenerateError", "DomainError", "NonConvergence", "ParseError", "ValidationError",
    "CoatedHalfSpace", "Layer", "PhaseReflector", "StackCoefficients", "compose", "plate_reflection",
    "single_interface", "stack_coefficients", "SystemConfig", "Constant", "Oscillator", "OscillatorSum",
    "SpectralPoint", "Vacuum", "CasimirResult", "QuadratureSpec", "casimir_energy", "casimir_forces",
    "effective_energy", "integrate_spectrum", "two_stack_energy",
]

__version__ = "0.1.0"
