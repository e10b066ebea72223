"""Fresnel coefficients of interfaces, layer stacks and plates at imaginary frequency.

Conventions
-----------
A stack ``1/n`` is everything strictly between bounding media 1 and n.
``r_fwd`` (r_{1/n}) is the reflection seen from medium 1, ``r_bwd`` (r_{n/1})
the one seen from medium n; ``t_fwd``/``t_bwd`` transmit 1 -> n and n -> 1.
Reflection amplitudes are referenced to the outermost interfaces of the
stack, so only decaying factors exp(-kappa d) ever appear.

The invariant ``a = t_fwd*t_bwd - r_fwd*r_bwd`` is symmetric under stack
reversal and is carried through composition in closed form rather than
rebuilt from the four amplitudes (t underflows for opaque stacks, a does not).

Coatings of a plate are ordered from the gap outward.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import DegenerateError
from .materials import (
    MaterialModel,
    SpectralPoint,
    Vacuum,
    eps_at,
    kappa,
    mu_at,
)

__all__ = [
    "Layer",
    "StackCoefficients",
    "CoatedHalfSpace",
    "PhaseReflector",
    "PlateModel",
    "single_interface",
    "compose",
    "stack_coefficients",
    "plate_reflection",
    "identity_stack",
    "DENOMINATOR_FLOOR",
    "UNDERFLOW_CLAMP",
]

DENOMINATOR_FLOOR = 1e-30
UNDERFLOW_CLAMP = 1e-300


@dataclass(frozen=True)
class Layer:
    """Homogeneous layer of thickness ``d`` (m)."""

    material: MaterialModel
    d: float

    def __post_init__(self):
        if not np.isfinite(self.d) or self.d < 0:
            raise ValueError(f"layer thickness must be finite and >= 0, got {self.d!r}")


@dataclass(frozen=True)
class StackCoefficients:
    """Reflection/transmission amplitudes of a stack for one polarization."""

    r_fwd: np.ndarray
    r_bwd: np.ndarray
    t_fwd: np.ndarray
    t_bwd: np.ndarray
    a: np.ndarray

    def reversed(self) -> "StackCoefficients":
        return StackCoefficients(self.r_bwd, self.r_fwd, self.t_bwd, self.t_fwd, self.a)


@dataclass(frozen=True)
class CoatedHalfSpace:
    """Semi-infinite ``substrate`` behind ``coatings`` (gap-facing layer first)."""

    coatings: tuple[Layer, ...] = ()
    substrate: MaterialModel = Vacuum()

    def __post_init__(self):
        object.__setattr__(self, "coatings", tuple(self.coatings))


@dataclass(frozen=True)
class PhaseReflector:
    """Idealized mirror with constant reflection amplitudes per polarization.

    ``PhaseReflector(1, -1)`` is the infinite-permittivity limit of a metal;
    ``(-1, -1)`` and ``(1, 1)`` are the other conventions found in the
    literature for perfect mirrors.
    """

    Rp: float
    Rs: float

    def __post_init__(self):
        for name in ("Rp", "Rs"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1], got {v!r}")

    def value(self, q: str) -> float:
        return self.Rp if q == "p" else self.Rs


PlateModel = Union[CoatedHalfSpace, PhaseReflector]


class Response(NamedTuple):
    """eps, mu and kappa of one medium at a set of spectral points."""

    eps: np.ndarray
    mu: np.ndarray
    kappa: np.ndarray


def response(m: MaterialModel, xi, k) -> Response:
    return Response(eps_at(m, xi), mu_at(m, xi), kappa(m, xi, k))


def _gamma(m1: Response, m2: Response, q: str):
    if q == "p":
        return m1.eps / m2.eps
    return m1.mu / m2.mu


def _interface(m1: Response, m2: Response, q: str) -> StackCoefficients:
    g = _gamma(m1, m2, q)
    den = m1.kappa + g * m2.kappa
    if np.any(np.abs(den) <= DENOMINATOR_FLOOR):
        raise DegenerateError("single-interface denominator vanished")
    r = (m1.kappa - g * m2.kappa) / den
    # 1 + r and 1 - r without cancellation near |r| = 1
    one_plus = 2.0 * m1.kappa / den
    one_minus = 2.0 * g * m2.kappa / den
    if q == "p":
        # E-field amplitude normalization: sqrt(gamma_p / gamma_s)
        z = np.sqrt((m1.eps * m2.mu) / (m2.eps * m1.mu))
        t12 = z * one_plus
        t21 = one_minus / z
    else:
        t12 = one_plus
        t21 = one_minus
    return StackCoefficients(r, -r, t12, t21, t12 * t21 + r * r)


def identity_stack(shape=()) -> StackCoefficients:
    zero = np.zeros(shape)
    one = np.ones(shape)
    return StackCoefficients(zero, zero, one, one, one)


def _decay(kappa_l, d_l):
    """exp(-kappa d), flushed to zero below the underflow clamp."""
    e = np.exp(-np.asarray(kappa_l) * d_l)
    return np.where(e < UNDERFLOW_CLAMP, 0.0, e)


def single_interface(m1: MaterialModel, m2: MaterialModel, pt: SpectralPoint):
    """Reflection and transmission amplitudes (r12, t12) of the m1|m2 interface."""
    s = _interface(response(m1, pt.xi, pt.k), response(m2, pt.xi, pt.k), pt.q)
    return s.r_fwd, s.t_fwd


def interface_coefficients(m1: MaterialModel, m2: MaterialModel, pt: SpectralPoint) -> StackCoefficients:
    return _interface(response(m1, pt.xi, pt.k), response(m2, pt.xi, pt.k), pt.q)


def compose(left: StackCoefficients, spacer, right: StackCoefficients) -> StackCoefficients:
    """Concatenate stack ``1/l`` and stack ``l/n`` across spacer layer ``l``.

    Parameters
    ----------
    left : StackCoefficients
        Coefficients of the stack between medium 1 and the spacer medium l.
    spacer : (kappa_l, d_l)
        Perpendicular wave vector (1/m) and thickness (m) of layer l.
    right : StackCoefficients
        Coefficients of the stack between medium l and medium n.

    Returns
    -------
    StackCoefficients
        Coefficients of the stack ``1/n``.

    Raises
    ------
    DegenerateError
        If the multiple-reflection denominator ``1 - r_{l/1} r_{l/n} e^{-2 kappa_l d_l}``
        falls to ``DENOMINATOR_FLOOR`` or below.
    """
    kappa_l, d_l = spacer
    if d_l < 0:
        raise ValueError("spacer thickness must be >= 0")
    half = _decay(kappa_l, d_l)
    e2 = _decay(2.0 * np.asarray(kappa_l), d_l)
    D = 1.0 - left.r_bwd * right.r_fwd * e2
    if np.any(np.abs(D) <= DENOMINATOR_FLOOR):
        raise DegenerateError("stack composition denominator below floor")
    r_fwd = (left.r_fwd + left.a * right.r_fwd * e2) / D
    r_bwd = (right.r_bwd + right.a * left.r_bwd * e2) / D
    a = (left.a * right.a * e2 - left.r_fwd * right.r_bwd) / D
    t_fwd = left.t_fwd * right.t_fwd * half / D
    t_bwd = right.t_bwd * left.t_bwd * half / D
    return StackCoefficients(r_fwd, r_bwd, t_fwd, t_bwd, a)


def fold_responses(media: Sequence[Response], thicknesses: Sequence[float], q: str) -> StackCoefficients:
    """Left fold over ``media[0] | layers ... | media[-1]``.

    ``thicknesses[i]`` belongs to ``media[i + 1]``; the bounding media have
    no thickness.
    """
    if len(thicknesses) != len(media) - 2:
        raise ValueError("need one thickness per interior medium")
    acc = _interface(media[0], media[1], q)
    for i, d in enumerate(thicknesses, start=1):
        acc = compose(acc, (media[i].kappa, d), _interface(media[i], media[i + 1], q))
    return acc


def stack_coefficients(
    layers: Sequence[Layer],
    bounding_left: MaterialModel,
    bounding_right: MaterialModel,
    pt: SpectralPoint,
) -> StackCoefficients:
    """Coefficients of ``layers`` sandwiched between two semi-infinite media."""
    cache = {}

    def resp(m):
        if m not in cache:
            cache[m] = response(m, pt.xi, pt.k)
        return cache[m]

    media = [resp(bounding_left)] + [resp(L.material) for L in layers] + [resp(bounding_right)]
    return fold_responses(media, [L.d for L in layers], pt.q)


def plate_reflection(p: PlateModel, adjacent: MaterialModel, pt: SpectralPoint):
    """Reflection amplitude of plate ``p`` seen from the gap medium ``adjacent``."""
    if isinstance(p, PhaseReflector):
        shape = np.broadcast(np.asarray(pt.xi), np.asarray(pt.k)).shape
        return np.full(shape, p.value(pt.q))
    if isinstance(p, CoatedHalfSpace):
        return stack_coefficients(p.coatings, adjacent, p.substrate, pt).r_fwd
    raise TypeError(f"unknown plate model {p!r}")
