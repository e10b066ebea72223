"""Exception types shared across the package."""


class CasimirError(Exception):
    """Base class for all errors raised by layercasimir."""


class DomainError(CasimirError, ValueError):
    """A material response was requested outside its domain (e.g. Drude at xi = 0)."""


class DegenerateError(CasimirError, ArithmeticError):
    """A multiple-scattering denominator fell below its floor."""


class NonConvergence(CasimirError, RuntimeError):
    """Quadrature did not reach the requested tolerance within max_levels."""


class ParseError(CasimirError, ValueError):
    """A configuration file is not well-formed."""


class ValidationError(CasimirError, ValueError):
    """A configuration value violates an invariant."""
