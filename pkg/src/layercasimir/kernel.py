"""Spectral integrands for two plates across an n-layer medium.

The medium is ``medium[0] ... medium[n-1]`` from the left plate to the right
plate; layers 1 and n are the gaps touching the plates.  The z-axis points
from the left plate to the right one and a positive force is along +z, so a
mutually attracting pair has F_L > 0 and F_R < 0.

Integrands are returned without the hbar prefactors and without the
``dxi dk k`` measure.  They accept scalar or array ``xi``/``k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateError
from .fresnel import (
    CoatedHalfSpace,
    Layer,
    PhaseReflector,
    PlateModel,
    Response,
    StackCoefficients,
    _decay,
    _interface,
    fold_responses,
    identity_stack,
    response,
)
from .materials import POLARIZATIONS, MaterialModel, SpectralPoint

__all__ = [
    "SystemConfig",
    "n_denominator",
    "n2_denominator",
    "force_left_integrand",
    "force_right_integrand",
    "force_stack_integrand",
    "stress_zz_integrand",
    "energy_integrand",
    "effective_denominator",
    "two_stack_denominator",
    "spectral_integrands",
    "INTEGRAND_NAMES",
    "N_FLOOR",
]

N_FLOOR = 1e-15


@dataclass(frozen=True)
class SystemConfig:
    """Left plate | medium layers | right plate."""

    plate_left: PlateModel
    medium: tuple[Layer, ...]
    plate_right: PlateModel

    def __post_init__(self):
        object.__setattr__(self, "medium", tuple(self.medium))
        if len(self.medium) < 1:
            raise ValueError("the medium needs at least one layer")

    @property
    def n(self) -> int:
        return len(self.medium)

    @property
    def total_gap(self) -> float:
        return float(sum(L.d for L in self.medium))

    def mirrored(self) -> "SystemConfig":
        return SystemConfig(self.plate_right, tuple(reversed(self.medium)), self.plate_left)

    def with_thickness(self, index: int, d: float) -> "SystemConfig":
        """Copy with layer ``index`` (0-based) set to thickness ``d``."""
        medium = list(self.medium)
        medium[index] = Layer(medium[index].material, d)
        return SystemConfig(self.plate_left, tuple(medium), self.plate_right)


class _Responses:
    """Material responses at fixed (xi, k), computed once per distinct model."""

    def __init__(self, xi, k):
        self.xi = np.asarray(xi, dtype=float)
        self.k = np.asarray(k, dtype=float)
        self._cache: dict = {}

    def __call__(self, m: MaterialModel) -> Response:
        r = self._cache.get(m)
        if r is None:
            r = self._cache[m] = response(m, self.xi, self.k)
        return r


class Channel(NamedTuple):
    """Everything the closed forms need for one polarization."""

    kappa1: np.ndarray
    kappan: np.ndarray
    e1: np.ndarray  # exp(-2 kappa_1 d_1)
    en: np.ndarray  # exp(-2 kappa_n d_n)
    RL: np.ndarray
    RR: np.ndarray
    stack: StackCoefficients  # stack 1/n


def _plate_r(p: PlateModel, adjacent: Response, resp: _Responses, q: str):
    if isinstance(p, PhaseReflector):
        return np.full(np.shape(adjacent.kappa), p.value(q))
    if isinstance(p, CoatedHalfSpace):
        media = [adjacent] + [resp(L.material) for L in p.coatings] + [resp(p.substrate)]
        return fold_responses(media, [L.d for L in p.coatings], q).r_fwd
    raise TypeError(f"unknown plate model {p!r}")


def _substack(sys: SystemConfig, resp: _Responses, i0: int, i1: int, q: str) -> StackCoefficients:
    """Stack between medium[i0] and medium[i1] (0-based, bounds exclusive)."""
    if i0 == i1:
        return identity_stack(np.shape(resp(sys.medium[i0].material).kappa))
    media = [resp(L.material) for L in sys.medium[i0 : i1 + 1]]
    return fold_responses(media, [L.d for L in sys.medium[i0 + 1 : i1]], q)


def _gaps(sys: SystemConfig):
    d1, dn = sys.medium[0].d, sys.medium[-1].d
    if sys.n == 1:
        # single layer: split it so the general form reduces exactly
        d1 = dn = 0.5 * d1
    if not (d1 > 0 and dn > 0):
        raise DegenerateError("plates touch the central stack (d_1 or d_n is zero)")
    return d1, dn


def _channel(sys: SystemConfig, resp: _Responses, q: str) -> Channel:
    d1, dn = _gaps(sys)
    m1 = resp(sys.medium[0].material)
    mn = resp(sys.medium[-1].material)
    stack = _substack(sys, resp, 0, sys.n - 1, q)
    return Channel(
        m1.kappa,
        mn.kappa,
        _decay(2.0 * m1.kappa, d1),
        _decay(2.0 * mn.kappa, dn),
        _plate_r(sys.plate_left, m1, resp, q),
        _plate_r(sys.plate_right, mn, resp, q),
        stack,
    )


def _n_of(ch: Channel):
    s = ch.stack
    N = 1.0 - (s.r_fwd * ch.RL * ch.e1 + s.r_bwd * ch.RR * ch.en) - s.a * ch.RL * ch.RR * ch.e1 * ch.en
    if np.any(N <= N_FLOOR):
        raise DegenerateError(f"N_n fell to {np.min(N):.3e} (floor {N_FLOOR:g})")
    return N


def _force_left(ch: Channel, N):
    s = ch.stack
    return ch.kappa1 * (s.r_fwd + s.a * ch.RR * ch.en) * ch.RL * ch.e1 / N


def _force_right(ch: Channel, N):
    s = ch.stack
    return -ch.kappan * (s.r_bwd + s.a * ch.RL * ch.e1) * ch.RR * ch.en / N


def _force_stack(ch: Channel, N):
    s = ch.stack
    single = (ch.kappan * s.r_bwd * ch.RR * ch.en - ch.kappa1 * s.r_fwd * ch.RL * ch.e1) / N
    double = (ch.kappan - ch.kappa1) * (s.a / N) * ch.RL * ch.RR * ch.e1 * ch.en
    return single + double


def channel(sys: SystemConfig, pt: SpectralPoint) -> Channel:
    return _channel(sys, _Responses(pt.xi, pt.k), pt.q)


def n_denominator(sys: SystemConfig, pt: SpectralPoint):
    """Generalized multiple-scattering denominator N_n."""
    return _n_of(channel(sys, pt))


def n2_denominator(sys: SystemConfig, pt: SpectralPoint):
    """N_n of a two-layer medium written directly in single-interface terms.

    Debug path only; it bypasses the stack recursion.
    """
    if sys.n != 2:
        raise ValueError("n2_denominator needs exactly two medium layers")
    resp = _Responses(pt.xi, pt.k)
    m1 = resp(sys.medium[0].material)
    m2 = resp(sys.medium[1].material)
    r12 = _interface(m1, m2, pt.q).r_fwd
    e1 = np.exp(-2.0 * m1.kappa * sys.medium[0].d)
    e2 = np.exp(-2.0 * m2.kappa * sys.medium[1].d)
    RL = _plate_r(sys.plate_left, m1, resp, pt.q)
    RR = _plate_r(sys.plate_right, m2, resp, pt.q)
    return 1.0 - r12 * (RL * e1 - RR * e2) - RL * RR * e1 * e2


def force_left_integrand(sys: SystemConfig, pt: SpectralPoint):
    ch = channel(sys, pt)
    return _force_left(ch, _n_of(ch))


def force_right_integrand(sys: SystemConfig, pt: SpectralPoint):
    ch = channel(sys, pt)
    return _force_right(ch, _n_of(ch))


def force_stack_integrand(sys: SystemConfig, pt: SpectralPoint):
    """Force on the stack between layers 1 and n."""
    ch = channel(sys, pt)
    return _force_stack(ch, _n_of(ch))


def _dress(stack_r, stack_rr, stack_a, R, e):
    """Reflection of a stack backed by a plate R across a gap with decay e."""
    den = 1.0 - stack_rr * R * e
    if np.any(np.abs(den) <= N_FLOOR):
        raise DegenerateError("plate dressing denominator below floor")
    return (stack_r + stack_a * R * e) / den


def stress_zz_integrand(sys: SystemConfig, j: int, pt: SpectralPoint):
    """zz stress in layer ``j`` (1-based), before prefactor and measure."""
    n = sys.n
    if not 1 <= j <= n:
        raise IndexError(f"layer index {j} outside 1..{n}")
    dj = sys.medium[j - 1].d
    if not dj > 0:
        raise DegenerateError(f"layer {j} has zero thickness")
    resp = _Responses(pt.xi, pt.k)
    ch = _channel(sys, resp, pt.q)
    if j == 1:
        r_minus = ch.RL
    else:
        left = _substack(sys, resp, 0, j - 1, pt.q)
        r_minus = _dress(left.r_bwd, left.r_fwd, left.a, ch.RL, ch.e1)
    if j == n:
        r_plus = ch.RR
    else:
        right = _substack(sys, resp, j - 1, n - 1, pt.q)
        r_plus = _dress(right.r_fwd, right.r_bwd, right.a, ch.RR, ch.en)
    kj = resp(sys.medium[j - 1].material).kappa
    ej = _decay(2.0 * kj, dj)
    prod = r_minus * r_plus * ej
    den = 1.0 - prod
    if np.any(den <= N_FLOOR):
        raise DegenerateError("stress denominator below floor")
    return kj * prod / den


def energy_integrand(sys: SystemConfig, xi, k):
    """Sum over polarizations of ln N_n."""
    resp = _Responses(xi, k)
    return sum(np.log(_n_of(_channel(sys, resp, q))) for q in POLARIZATIONS)


def _split(sys: SystemConfig, l: int, resp: _Responses, q: str):
    if not 1 < l < sys.n:
        raise IndexError(f"intermediate layer index {l} must satisfy 1 < l < {sys.n}")
    ch = _channel(sys, resp, q)
    left = _substack(sys, resp, 0, l - 1, q)
    right = _substack(sys, resp, l - 1, sys.n - 1, q)
    el = _decay(2.0 * resp(sys.medium[l - 1].material).kappa, sys.medium[l - 1].d)
    return ch, left, right, el


def _effective_of(ch, left, right, el):
    a1 = 1.0 - left.r_fwd * ch.RL * ch.e1
    an = 1.0 - right.r_bwd * ch.RR * ch.en
    cross = (left.a * ch.RL * ch.e1 + left.r_bwd) * (right.a * ch.RR * ch.en + right.r_fwd)
    return a1 * an - el * cross


def _two_stack_of(left, right, el):
    return 1.0 - left.r_bwd * right.r_fwd * el


def effective_denominator(sys: SystemConfig, l: int, pt: SpectralPoint):
    """N_n^(l) = N_n * D_l, the part of N_n that carries the gap dependence."""
    return _effective_of(*_split(sys, l, _Responses(pt.xi, pt.k), pt.q))


def two_stack_denominator(sys: SystemConfig, l: int, pt: SpectralPoint):
    """D_l = 1 - r_{l/1} r_{l/n} exp(-2 kappa_l d_l)."""
    _, left, right, el = _split(sys, l, _Responses(pt.xi, pt.k), pt.q)
    return _two_stack_of(left, right, el)


INTEGRAND_NAMES = ("energy", "force_left", "force_right", "force_stack")


def spectral_integrands(sys: SystemConfig, xi, k, scale: float = 1.0):
    """All integrands for both polarizations, stacked.

    Returns an array of shape ``(2, 4) + shape(xi)``: polarization (p, s) by
    (ln N_n, F_L, F_R, F_S).  Force integrands are multiplied by ``scale``
    (a length) so every row is dimensionless.
    """
    resp = _Responses(xi, k)
    out = []
    for q in POLARIZATIONS:
        ch = _channel(sys, resp, q)
        N = _n_of(ch)
        out.append(
            [
                np.log(N),
                scale * _force_left(ch, N),
                scale * _force_right(ch, N),
                scale * _force_stack(ch, N),
            ]
        )
    return np.array(out)


def effective_integrands(sys: SystemConfig, l: int, xi, k):
    """ln N_n^(l) and ln D_l per polarization, shape ``(2, 2) + shape(xi)``."""
    resp = _Responses(xi, k)
    out = []
    for q in POLARIZATIONS:
        ch, left, right, el = _split(sys, l, resp, q)
        Nl = _effective_of(ch, left, right, el)
        if np.any(Nl <= N_FLOOR):
            raise DegenerateError("effective denominator below floor")
        out.append([np.log(Nl), np.log(_two_stack_of(left, right, el))])
    return np.array(out)
