"""Material response at imaginary frequency.

All models are evaluated on the imaginary axis, omega = i*xi, where a causal
passive medium has a real response >= 1.  The oscillator model reads

    eps(i xi) = 1 + sum_j  wp2_j / (w0_j**2 + xi**2 + gamma_j * xi)

and likewise for mu with ``mu_terms``.  A term with ``w0 = 0`` is a Drude
term; it diverges as xi -> 0+ and is rejected at xi = 0.

Every function accepts scalars or numpy arrays for ``xi`` and ``k`` and
broadcasts them.  SI units throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.constants import c as C

from .errors import DomainError

__all__ = [
    "C",
    "Vacuum",
    "Constant",
    "Oscillator",
    "OscillatorSum",
    "MaterialModel",
    "SpectralPoint",
    "POLARIZATIONS",
    "eps_at",
    "mu_at",
    "refractive_index",
    "kappa",
]

POLARIZATIONS = ("p", "s")


@dataclass(frozen=True)
class Vacuum:
    """Empty space, eps = mu = 1."""


@dataclass(frozen=True)
class Constant:
    """Non-dispersive medium."""

    eps_inf: float
    mu_inf: float = 1.0

    def __post_init__(self):
        for name in ("eps_inf", "mu_inf"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 1.0:
                raise ValueError(f"{name} must be finite and >= 1, got {v!r}")


@dataclass(frozen=True)
class Oscillator:
    """One Lorentz (or Drude, when ``w0 == 0``) term.

    Parameters
    ----------
    wp2 : float
        Oscillator strength omega_p**2 in (rad/s)**2.
    w0 : float
        Resonance frequency in rad/s.
    gamma : float
        Damping rate in rad/s.
    """

    wp2: float
    w0: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("wp2", "w0", "gamma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"oscillator {name} must be finite and >= 0, got {v!r}")

    @property
    def is_drude(self) -> bool:
        return self.w0 == 0.0 and self.wp2 > 0.0


@dataclass(frozen=True)
class OscillatorSum:
    """Sum of oscillator terms for eps and (optionally) mu."""

    terms: tuple[Oscillator, ...] = ()
    mu_terms: tuple[Oscillator, ...] = ()

    def __post_init__(self):
        # accept lists from callers; keep the instance hashable
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "mu_terms", tuple(self.mu_terms))


MaterialModel = Union[Vacuum, Constant, OscillatorSum]


@dataclass(frozen=True)
class SpectralPoint:
    """Imaginary frequency ``xi`` (rad/s), transverse wavenumber ``k`` (1/m)
    and polarization ``q``.  ``xi`` and ``k`` may be arrays."""

    xi: object
    k: object
    q: str = "p"

    def __post_init__(self):
        if self.q not in POLARIZATIONS:
            raise ValueError(f"polarization must be 'p' or 's', got {self.q!r}")


def _oscillator_response(terms, xi, what):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0) or not np.all(np.isfinite(xi)):
        raise DomainError(f"{what}: xi must be finite and >= 0")
    out = np.ones_like(xi)
    for t in terms:
        if t.wp2 == 0.0:
            continue
        if t.is_drude and np.any(xi == 0):
            raise DomainError(f"{what}: Drude term (w0 = 0) is singular at xi = 0")
        out = out + t.wp2 / (t.w0 * t.w0 + xi * xi + t.gamma * xi)
    return out


def eps_at(m: MaterialModel, xi):
    """Permittivity eps(i xi) of ``m``; real and >= 1."""
    if isinstance(m, Vacuum):
        return np.ones_like(np.asarray(xi, dtype=float))
    if isinstance(m, Constant):
        return np.full_like(np.asarray(xi, dtype=float), m.eps_inf)
    if isinstance(m, OscillatorSum):
        return _oscillator_response(m.terms, xi, "eps")
    raise TypeError(f"unknown material model {m!r}")


def mu_at(m: MaterialModel, xi):
    """Permeability mu(i xi) of ``m``; real and >= 1."""
    if isinstance(m, Vacuum):
        return np.ones_like(np.asarray(xi, dtype=float))
    if isinstance(m, Constant):
        return np.full_like(np.asarray(xi, dtype=float), m.mu_inf)
    if isinstance(m, OscillatorSum):
        return _oscillator_response(m.mu_terms, xi, "mu")
    raise TypeError(f"unknown material model {m!r}")


def refractive_index(m: MaterialModel, xi):
    return np.sqrt(eps_at(m, xi) * mu_at(m, xi))


def kappa(m: MaterialModel, xi, k):
    """Perpendicular wave vector sqrt(eps mu xi**2 / c**2 + k**2) in 1/m."""
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    em = eps_at(m, xi) * mu_at(m, xi)
    x = xi / C
    return np.sqrt(em * x * x + k * k)
