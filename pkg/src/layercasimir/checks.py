"""Self-consistency checks run by ``layercasimir check``."""
from __future__ import annotations

import math
from dataclasses import replace
from typing import List, NamedTuple

import numpy as np
from scipy.constants import hbar

from . import quadrature as quad
from .fresnel import Layer, PhaseReflector, CoatedHalfSpace, interface_coefficients, stack_coefficients
from .kernel import (
    SystemConfig,
    effective_denominator,
    n_denominator,
    two_stack_denominator,
)
from .materials import C, POLARIZATIONS, Constant, SpectralPoint, Vacuum

FD_REL_TOL = 1e-5
FD_MAX_QUAD_TOL = 1e-7
FD_STEP = 1e-3


class CheckResult(NamedTuple):
    name: str
    status: str  # "pass" | "fail" | "skip"
    detail: str


def rel_diff(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b) / scale))


def sample_points(sys: SystemConfig, count: int = 64, seed: int = 0):
    """Log-uniform (xi, k) spanning two decades either side of the gap scale."""
    rng = np.random.default_rng(seed)
    d = sys.total_gap
    xi = C / d * 10.0 ** rng.uniform(-2, 1, count)
    k = 1.0 / d * 10.0 ** rng.uniform(-2, 1, count)
    return xi, k


def _verdict(name, err, tol, what=""):
    status = "pass" if err <= tol else "fail"
    return CheckResult(name, status, f"{what}max rel. deviation {err:.2e} (tol {tol:.0e})")


def check_a_identity(sys: SystemConfig) -> CheckResult:
    xi, k = sample_points(sys)
    mats = [L.material for L in sys.medium]
    pairs = list(zip(mats, mats[1:])) or [(mats[0], Vacuum())]
    worst = 0.0
    for m1, m2 in pairs:
        for q in POLARIZATIONS:
            a = interface_coefficients(m1, m2, SpectralPoint(xi, k, q)).a
            worst = max(worst, float(np.max(np.abs(a - 1.0))))
    return _verdict("a=1 identity", worst, 1e-14)


def check_a_symmetry(sys: SystemConfig) -> CheckResult:
    xi, k = sample_points(sys)
    m = sys.medium
    worst = 0.0
    for q in POLARIZATIONS:
        pt = SpectralPoint(xi, k, q)
        fwd = stack_coefficients(m[1:-1], m[0].material, m[-1].material, pt)
        bwd = stack_coefficients(m[-2:0:-1], m[-1].material, m[0].material, pt)
        worst = max(worst, rel_diff(fwd.a, bwd.a))
    return _verdict("a-symmetry", worst, 1e-12)


def check_factorization(sys: SystemConfig) -> CheckResult:
    if sys.n < 3:
        return CheckResult("factorization", "skip", "needs n >= 3 medium layers")
    xi, k = sample_points(sys)
    worst = 0.0
    for q in POLARIZATIONS:
        pt = SpectralPoint(xi, k, q)
        N = n_denominator(sys, pt)
        for l in range(2, sys.n):
            lhs = N * two_stack_denominator(sys, l, pt)
            worst = max(worst, rel_diff(lhs, effective_denominator(sys, l, pt)))
    return _verdict("factorization", worst, 1e-12, "N_n*D_l vs N_n^(l): ")


def _pinned(sys, spec):
    if spec.xi_scale is None:
        spec = replace(spec, xi_scale=C / sys.total_gap)
    return spec


def check_fd(sys: SystemConfig, spec: quad.QuadratureSpec) -> CheckResult:
    if spec.rel_tol > FD_MAX_QUAD_TOL:
        return CheckResult("force-energy FD", "skip",
                           f"rel_tol {spec.rel_tol:g} too loose (needs <= {FD_MAX_QUAD_TOL:g})")
    spec = _pinned(sys, spec)
    res = quad.casimir_forces(sys, spec)
    n = sys.n
    errs = []
    for idx, force, sign in ((0, res.force_left, 1.0), (n - 1, res.force_right, -1.0)):
        # step relative to the gap being varied; n = 1 varies the single layer twice
        d = sys.medium[idx].d
        h = FD_STEP * d
        e_plus = quad.casimir_energy(sys.with_thickness(idx, d + h), spec)
        e_minus = quad.casimir_energy(sys.with_thickness(idx, d - h), spec)
        fd = sign * (e_plus - e_minus) / (2.0 * h)
        if force == 0.0 and fd == 0.0:
            errs.append(0.0)
        else:
            errs.append(abs(fd - force) / max(abs(force), abs(fd)))
    return _verdict("force-energy FD", max(errs), FD_REL_TOL,
                    f"F_L {errs[0]:.2e}, F_R {errs[1]:.2e}; ")


def check_sum_rule(sys: SystemConfig, spec: quad.QuadratureSpec) -> CheckResult:
    res = quad.casimir_forces(sys, spec)
    scale = max(abs(res.force_left), abs(res.force_right))
    total = res.force_left + res.force_right + res.force_stack
    err = abs(total) / scale if scale > 0 else abs(total)
    return _verdict("sum rule", err, 1e-10)


def check_mirror(sys: SystemConfig, spec: quad.QuadratureSpec) -> CheckResult:
    a = quad.casimir_forces(sys, spec)
    b = quad.casimir_forces(sys.mirrored(), spec)
    e_err = rel_diff(a.energy, b.energy)
    f_err = rel_diff(b.force_left, -a.force_right)
    ok = e_err <= 1e-10 and f_err <= 1e-9
    return CheckResult("mirror identity", "pass" if ok else "fail",
                       f"energy {e_err:.2e} (tol 1e-10), F_L(mirror) vs -F_R {f_err:.2e} (tol 1e-9)")


def lifshitz_pair(d: float = 1e-6, eps: float = 2.25):
    """n = 4 all-vacuum medium and the equivalent single vacuum layer."""
    plate = CoatedHalfSpace((), Constant(eps))
    split = SystemConfig(plate, [Layer(Vacuum(), f * d) for f in (0.1, 0.3, 0.4, 0.2)], plate)
    whole = SystemConfig(plate, [Layer(Vacuum(), d)], plate)
    return split, whole


def check_lifshitz(spec: quad.QuadratureSpec) -> CheckResult:
    split, whole = lifshitz_pair()
    a = quad.casimir_forces(split, spec)
    b = quad.casimir_forces(whole, spec)
    err = max(rel_diff(a.energy, b.energy), rel_diff(a.force_left, b.force_left),
              rel_diff(a.force_right, b.force_right))
    return _verdict("Lifshitz reduction", err, 1e-9, "n=4 vs n=1: ")


def ideal_casimir(d: float):
    """Energy and attractive force per area for perfect mirrors in vacuum."""
    from scipy.constants import c
    return -math.pi**2 * hbar * c / (720 * d**3), math.pi**2 * hbar * c / (240 * d**4)


def check_ideal(spec: quad.QuadratureSpec, d: float = 1e-6) -> CheckResult:
    mirror = PhaseReflector(1.0, -1.0)
    res = quad.casimir_forces(SystemConfig(mirror, [Layer(Vacuum(), d)], mirror), spec)
    e0, f0 = ideal_casimir(d)
    err = max(rel_diff(res.energy, e0), rel_diff(res.force_left, f0), rel_diff(res.force_right, -f0))
    return _verdict("ideal-Casimir oracle", err, 1e-3, f"d = {d:g} m: ")


def run_all(sys: SystemConfig, spec: quad.QuadratureSpec) -> List[CheckResult]:
    """Every check on ``sys`` plus the canned systems, in a fixed order."""
    canned_spec = replace(spec, xi_scale=None)
    return [
        check_a_identity(sys),
        check_a_symmetry(sys),
        check_factorization(sys),
        check_fd(sys, spec),
        check_sum_rule(sys, spec),
        check_mirror(sys, spec),
        check_lifshitz(canned_spec),
        check_ideal(canned_spec),
    ]
