"""Double integrals over imaginary frequency and transverse wavenumber.

The measure ``dxi dk k`` over the quarter plane is written in polar form in
the (xi/c, k) plane,

    xi = c rho cos(theta),  k = rho sin(theta),
    dxi dk k = c rho**2 sin(theta) drho dtheta,

which does not depend on any material, so a system and its mirror image (or a
medium split into more layers) are integrated on identical nodes.  The radial
direction uses an exp-sinh rule, the angular one tanh-sinh; both are open
(no node at xi = 0 or k = 0) and nested under step halving, so each level only
evaluates the new nodes.  The error estimate is the change between levels.

Chunks of nodes may be evaluated on several threads; partial sums are reduced
in chunk order with ``math.fsum`` so the result is bit-identical for any
worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.constants import hbar

from .errors import NonConvergence
from .kernel import SystemConfig, effective_integrands, spectral_integrands
from .materials import C, POLARIZATIONS

__all__ = [
    "QuadratureSpec",
    "PolarizationParts",
    "CasimirResult",
    "integrate_spectrum",
    "casimir_energy",
    "casimir_forces",
    "effective_energy",
    "two_stack_energy",
    "FORCE_PREFACTOR",
    "ENERGY_PREFACTOR",
    "THREADS_ENV",
]

FORCE_PREFACTOR = hbar / (2.0 * math.pi**2)
ENERGY_PREFACTOR = hbar / (2.0 * math.pi) ** 2

THREADS_ENV = "LAYERCASIMIR_THREADS"

# t-ranges of the truncated rules; see module docstring
_RADIAL_T = (-3.0, 3.2)
_ANGULAR_T = 3.2
_CHUNK = 16384
_MIN_LEVELS = 4


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and scaling for :func:`integrate_spectrum`.

    ``xi_scale`` (rad/s) sets the radial unit: rho is measured in units of
    ``xi_scale / c``.  ``None`` means c / (total gap) for system integrals.
    """

    rel_tol: float = 1e-8
    abs_floor: float = 1e-20
    max_levels: int = 12
    xi_scale: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.rel_tol <= 1e-2:
            raise ValueError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol!r}")
        if self.abs_floor < 0:
            raise ValueError("abs_floor must be >= 0")
        if int(self.max_levels) != self.max_levels or self.max_levels < _MIN_LEVELS:
            raise ValueError(f"max_levels must be an integer >= {_MIN_LEVELS}")
        if self.xi_scale is not None and not (np.isfinite(self.xi_scale) and self.xi_scale > 0):
            raise ValueError("xi_scale must be positive and finite")


class PolarizationParts(NamedTuple):
    energy: float
    force_left: float
    force_right: float
    force_stack: float


@dataclass(frozen=True)
class CasimirResult:
    """Energy per area (J/m^2) and forces per area (N/m^2), +z to the right."""

    energy: float
    force_left: float
    force_right: float
    force_stack: float
    per_polarization: dict = field(default_factory=dict)
    est_error: float = 0.0
    evaluations: int = 0


class _Integral(NamedTuple):
    value: np.ndarray
    est_error: float
    evaluations: int


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _radial(level: int):
    h = 2.0 ** (1 - level)
    lo, hi = _RADIAL_T
    i = np.arange(math.ceil(lo / h), math.floor(hi / h) + 1)
    t = i * h
    x = np.exp(0.5 * np.pi * np.sinh(t))
    w = x * 0.5 * np.pi * np.cosh(t)
    return i, x, w


def _angular(level: int):
    """tanh-sinh nodes on (0, 1); returns u and 1 - u separately for accuracy."""
    h = 2.0 ** (1 - level)
    m = math.floor(_ANGULAR_T / h)
    i = np.arange(-m, m + 1)
    t = i * h
    s = np.pi * np.sinh(t)
    u = 1.0 / (1.0 + np.exp(-s))
    um = 1.0 / (1.0 + np.exp(s))
    w = np.pi * np.cosh(t) * u * um
    return i, u, um, w


def _level_points(level: int, rho_scale: float):
    """Physical (xi, k) and weights for the nodes new at ``level``."""
    ir, x, wx = _radial(level)
    ia, u, um, wu = _angular(level)
    if level == 1:
        new_r = np.ones(ir.shape, bool)
        new_a = np.ones(ia.shape, bool)
    else:
        new_r = ir % 2 != 0
        new_a = ia % 2 != 0
    sin_t = np.sin(0.5 * np.pi * u)
    cos_t = np.sin(0.5 * np.pi * um)
    gr = wx * x * x
    ga = wu * sin_t
    # new radial x all angular, then old radial x new angular
    r_idx = np.concatenate([np.repeat(np.flatnonzero(new_r), ia.size),
                            np.repeat(np.flatnonzero(~new_r), new_a.sum())])
    a_idx = np.concatenate([np.tile(np.arange(ia.size), new_r.sum()),
                            np.tile(np.flatnonzero(new_a), (~new_r).sum())])
    rho = x[r_idx] * rho_scale
    xi = C * rho * cos_t[a_idx]
    k = rho * sin_t[a_idx]
    w = gr[r_idx] * ga[a_idx]
    return xi, k, w


def _evaluate(f, xi, k, w):
    vals = np.asarray(f(xi, k), dtype=float)
    if vals.ndim == 0:
        vals = np.broadcast_to(vals, xi.shape)
    vals = vals.reshape(-1, xi.size)
    wv = vals * w
    return wv.sum(axis=1), np.abs(wv).sum(axis=1)


def _integrate(f, spec: QuadratureSpec, workers: Optional[int] = None) -> _Integral:
    if spec.xi_scale is None:
        raise ValueError("integrate_spectrum needs an explicit xi_scale")
    workers = default_workers() if workers is None else max(1, int(workers))
    rho_scale = spec.xi_scale / C
    jac = C * rho_scale**3 * 0.5 * np.pi
    eps = np.finfo(float).eps

    sums = None  # unscaled running sums, one per component
    abs_sums = None
    prev = None
    evaluations = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for level in range(1, spec.max_levels + 1):
            xi, k, w = _level_points(level, rho_scale)
            evaluations += xi.size
            bounds = range(0, xi.size, _CHUNK)
            jobs = [(xi[b:b + _CHUNK], k[b:b + _CHUNK], w[b:b + _CHUNK]) for b in bounds]
            if pool is None:
                parts = [_evaluate(f, *j) for j in jobs]
            else:
                parts = list(pool.map(lambda j: _evaluate(f, *j), jobs))
            m = parts[0][0].size
            if sums is None:
                sums = [[] for _ in range(m)]
                abs_sums = [[] for _ in range(m)]
            for s, a in parts:
                for c in range(m):
                    sums[c].append(s[c])
                    abs_sums[c].append(a[c])
            h = 2.0 ** (1 - level)
            value = np.array([math.fsum(s) for s in sums]) * (jac * h * h)
            magnitude = np.array([math.fsum(a) for a in abs_sums]) * (jac * h * h)
            if prev is not None and level >= _MIN_LEVELS:
                diff = np.abs(value - prev)
                scale = np.max(np.abs(value))
                floor = np.maximum(spec.abs_floor * scale, 64 * eps * magnitude)
                tol = np.maximum(spec.rel_tol * np.abs(value), floor)
                if np.all(diff <= tol):
                    big = np.abs(value) > floor
                    rel = np.where(big, diff / np.where(big, np.abs(value), 1.0), 0.0)
                    err = float(np.max(rel)) if rel.size else 0.0
                    return _Integral(value, err, evaluations)
            prev = value
    finally:
        if pool is not None:
            pool.shutdown()
    raise NonConvergence(
        f"no convergence to rel_tol={spec.rel_tol:g} after {spec.max_levels} levels"
    )


def integrate_spectrum(f: Callable, spec: QuadratureSpec, workers: Optional[int] = None):
    """Integrate ``f(xi, k)`` against ``dxi dk k`` over the positive quarter plane.

    Parameters
    ----------
    f : callable
        Vectorized integrand taking arrays ``xi`` (rad/s) and ``k`` (1/m) of
        equal shape.  It may return extra leading axes for several
        components; the points axis must be last.
    spec : QuadratureSpec
        Tolerances; ``xi_scale`` must be set.
    workers : int, optional
        Thread count, default from the ``LAYERCASIMIR_THREADS`` variable.

    Returns
    -------
    value : float or ndarray
        The integral (component-wise for vector integrands).
    est_error : float
        Relative error estimate from the last level change.
    """
    res = _integrate(f, spec, workers)
    value = res.value[0] if res.value.size == 1 else res.value
    return value, res.est_error


def _resolve(sys: SystemConfig, spec: Optional[QuadratureSpec]) -> QuadratureSpec:
    spec = spec or QuadratureSpec()
    if spec.xi_scale is None:
        spec = replace(spec, xi_scale=C / sys.total_gap)
    return spec


def casimir_energy(sys: SystemConfig, spec: Optional[QuadratureSpec] = None, workers=None) -> float:
    """Casimir energy per unit area in J/m^2."""
    spec = _resolve(sys, spec)

    def f(xi, k):
        return spectral_integrands(sys, xi, k)[:, 0]

    res = _integrate(f, spec, workers)
    return float(ENERGY_PREFACTOR * math.fsum(res.value))


def casimir_forces(sys: SystemConfig, spec: Optional[QuadratureSpec] = None, workers=None) -> CasimirResult:
    """Energy and the forces on both plates and on the central stack."""
    spec = _resolve(sys, spec)
    d = sys.total_gap

    def f(xi, k):
        return spectral_integrands(sys, xi, k, scale=d)

    res = _integrate(f, spec, workers)
    vals = res.value.reshape(len(POLARIZATIONS), 4)
    parts = {}
    for q, row in zip(POLARIZATIONS, vals):
        parts[q] = PolarizationParts(
            float(ENERGY_PREFACTOR * row[0]),
            float(FORCE_PREFACTOR * row[1] / d),
            float(FORCE_PREFACTOR * row[2] / d),
            float(FORCE_PREFACTOR * row[3] / d),
        )
    totals = [math.fsum(p[i] for p in parts.values()) for i in range(4)]
    return CasimirResult(*totals, per_polarization=parts,
                         est_error=res.est_error, evaluations=res.evaluations)


def _effective(sys, l, spec, workers, column):
    spec = _resolve(sys, spec)

    def f(xi, k):
        return effective_integrands(sys, l, xi, k)[:, column]

    res = _integrate(f, spec, workers)
    return float(ENERGY_PREFACTOR * math.fsum(res.value))


def effective_energy(sys: SystemConfig, l: int, spec: Optional[QuadratureSpec] = None, workers=None) -> float:
    """Gap-dependent part of the energy relative to intermediate layer ``l`` (1-based)."""
    return _effective(sys, l, spec, workers, 0)


def two_stack_energy(sys: SystemConfig, l: int, spec: Optional[QuadratureSpec] = None, workers=None) -> float:
    """Interaction energy of the stacks on either side of layer ``l``, plates ignored."""
    return _effective(sys, l, spec, workers, 1)
