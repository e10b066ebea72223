import numpy as np
import pytest

from conftest import GOLD, rel
from layercasimir.errors import DegenerateError
from layercasimir.fresnel import CoatedHalfSpace, Layer, PhaseReflector, single_interface
from layercasimir.kernel import (
    SystemConfig,
    effective_denominator,
    energy_integrand,
    force_left_integrand,
    force_right_integrand,
    force_stack_integrand,
    n2_denominator,
    n_denominator,
    stress_zz_integrand,
    two_stack_denominator,
)
from layercasimir.materials import C, Constant, SpectralPoint, Vacuum, kappa

IDEAL = PhaseReflector(1.0, -1.0)
NONE = PhaseReflector(0.0, 0.0)
GLASS = Constant(2.25)
rng = np.random.default_rng(7)
XI = C / 1e-6 * 10 ** rng.uniform(-2, 0.7, 50)
K = 1e6 * 10 ** rng.uniform(-2, 0.7, 50)


def pts():
    return [SpectralPoint(XI, K, q) for q in ("p", "s")]


def asym5():
    return SystemConfig(
        CoatedHalfSpace((Layer(Constant(3.9), 2e-8),), GOLD),
        [Layer(Vacuum(), 2e-7), Layer(GLASS, 1e-7), Layer(Constant(6.0, 1.3), 1.5e-7),
         Layer(Constant(4.0), 5e-8), Layer(Constant(1.77), 3e-7)],
        IDEAL,
    )


@pytest.mark.parametrize("plates", [(IDEAL, IDEAL), (IDEAL, CoatedHalfSpace((), GLASS))])
def test_homogeneous_reduction(plates):
    m = Constant(1.77)
    sys = SystemConfig(plates[0], [Layer(m, d) for d in (1e-7, 3e-7, 2e-7, 4e-7)], plates[1])
    for pt in pts():
        kap = kappa(m, pt.xi, pt.k)
        RR = single_interface(m, GLASS, pt)[0] if isinstance(plates[1], CoatedHalfSpace) else IDEAL.value(pt.q)
        RL = IDEAL.value(pt.q)
        want = 1 - RL * RR * np.exp(-2 * kap * 1e-6)
        assert rel(n_denominator(sys, pt), want) < 1e-12


def test_no_mirrors_gives_unity():
    sys = SystemConfig(NONE, [Layer(Vacuum(), 1e-7), Layer(GLASS, 2e-7), Layer(Vacuum(), 1e-7)], NONE)
    for pt in pts():
        assert np.all(n_denominator(sys, pt) == 1.0)
        assert np.all(force_left_integrand(sys, pt) == 0.0)
        assert np.all(force_right_integrand(sys, pt) == 0.0)
    assert np.all(energy_integrand(sys, XI, K) == 0.0)


def test_two_media_closed_form():
    sys = SystemConfig(CoatedHalfSpace((), Constant(11.7)), [Layer(Vacuum(), 4e-7), Layer(GLASS, 6e-7)], IDEAL)
    for pt in pts():
        r12 = single_interface(Vacuum(), GLASS, pt)[0]
        RL = single_interface(Vacuum(), Constant(11.7), pt)[0]
        RR = IDEAL.value(pt.q)
        e1 = np.exp(-2 * kappa(Vacuum(), pt.xi, pt.k) * 4e-7)
        e2 = np.exp(-2 * kappa(GLASS, pt.xi, pt.k) * 6e-7)
        want = 1 - r12 * (RL * e1 - RR * e2) - RL * RR * e1 * e2
        assert rel(n_denominator(sys, pt), want) < 1e-12
        assert rel(n2_denominator(sys, pt), want) < 1e-14


def test_force_integrands_homogeneous():
    R = 0.7
    plate = PhaseReflector(R, R)
    sys = SystemConfig(plate, [Layer(Vacuum(), 6e-7)], plate)
    pt = SpectralPoint(XI, K, "p")
    kap = kappa(Vacuum(), XI, K)
    e = np.exp(-2 * kap * 6e-7)
    want = kap * R * R * e / (1 - R * R * e)
    assert rel(force_left_integrand(sys, pt), want) < 1e-13
    assert rel(force_right_integrand(sys, pt), -want) < 1e-13
    assert np.all(force_stack_integrand(sys, pt) == 0.0)


def test_mirror_identity_pointwise():
    sys = asym5()
    for pt in pts():
        assert rel(n_denominator(sys.mirrored(), pt), n_denominator(sys, pt)) < 1e-12
        assert rel(force_left_integrand(sys.mirrored(), pt), -force_right_integrand(sys, pt)) < 1e-12


def test_symmetric_system():
    plate = CoatedHalfSpace((), GOLD)
    sys = SystemConfig(plate, [Layer(Vacuum(), 2e-7), Layer(GLASS, 1e-7), Layer(Vacuum(), 2e-7)], plate)
    for pt in pts():
        assert rel(force_right_integrand(sys, pt), -force_left_integrand(sys, pt)) < 1e-12


def test_stack_force_balance_pointwise():
    sys = asym5()
    for pt in pts():
        fl, fr, fs = (f(sys, pt) for f in (force_left_integrand, force_right_integrand, force_stack_integrand))
        scale = np.maximum(np.abs(fl), np.abs(fr))
        assert np.max(np.abs(fs + fl + fr) / scale) < 1e-12


def test_slab_in_cavity():
    # identical outer gaps: F_S from the Airy slab reflection
    slab, dslab, d1, d3 = Constant(4.0), 2e-7, 3e-7, 1e-7
    plates = (CoatedHalfSpace((), GOLD), IDEAL)
    sys = SystemConfig(plates[0], [Layer(Vacuum(), d1), Layer(slab, dslab), Layer(Vacuum(), d3)], plates[1])
    for pt in pts():
        r = single_interface(Vacuum(), slab, pt)[0]
        es = np.exp(-2 * kappa(slab, pt.xi, pt.k) * dslab)
        r_slab = r * (1 - es) / (1 - r * r * es)
        t2 = (1 - r * r) ** 2 * es / (1 - r * r * es) ** 2
        a = t2 - r_slab**2
        kap = kappa(Vacuum(), pt.xi, pt.k)
        RL = single_interface(Vacuum(), GOLD, pt)[0]
        RR = IDEAL.value(pt.q)
        e1, e3 = np.exp(-2 * kap * d1), np.exp(-2 * kap * d3)
        N = 1 - r_slab * (RL * e1 + RR * e3) - a * RL * RR * e1 * e3
        want = kap * r_slab * (RR * e3 - RL * e1) / N
        assert rel(force_stack_integrand(sys, pt), want) < 1e-10


def test_stress_at_plates():
    sys = asym5()
    for pt in pts():
        assert rel(stress_zz_integrand(sys, 1, pt), force_left_integrand(sys, pt)) < 1e-12
        assert rel(stress_zz_integrand(sys, sys.n, pt), -force_right_integrand(sys, pt)) < 1e-12


def test_stress_uniform_in_homogeneous_medium():
    m = Constant(1.77)
    sys = SystemConfig(IDEAL, [Layer(m, 1e-7), Layer(m, 3e-7), Layer(m, 2e-7)], CoatedHalfSpace((), GOLD))
    for pt in pts():
        t1 = stress_zz_integrand(sys, 1, pt)
        assert rel(stress_zz_integrand(sys, 2, pt), t1) < 1e-12
        assert rel(stress_zz_integrand(sys, 3, pt), t1) < 1e-12


def test_stress_vanishes_with_transparent_left_side():
    sys = SystemConfig(NONE, [Layer(Vacuum(), 1e-7), Layer(Vacuum(), 2e-7), Layer(GLASS, 1e-7)], IDEAL)
    assert np.all(stress_zz_integrand(sys, 2, SpectralPoint(XI, K, "p")) == 0.0)


def test_stress_index_checks():
    sys = asym5()
    with pytest.raises(IndexError):
        stress_zz_integrand(sys, 0, SpectralPoint(1e15, 1e6, "p"))


def test_ideal_energy_integrand():
    sys = SystemConfig(IDEAL, [Layer(Vacuum(), 1e-6)], IDEAL)
    kap = kappa(Vacuum(), XI, K)
    assert rel(energy_integrand(sys, XI, K), 2 * np.log(1 - np.exp(-2 * kap * 1e-6))) < 1e-12


def _n23(sys, pt):
    m1, m2, m3 = (L.material for L in sys.medium)
    r12 = single_interface(m1, m2, pt)[0]
    r32 = single_interface(m3, m2, pt)[0]
    RL, RR = sys.plate_left.value(pt.q), sys.plate_right.value(pt.q)
    e1 = np.exp(-2 * kappa(m1, pt.xi, pt.k) * sys.medium[0].d)
    e2 = np.exp(-2 * kappa(m2, pt.xi, pt.k) * sys.medium[1].d)
    e3 = np.exp(-2 * kappa(m3, pt.xi, pt.k) * sys.medium[2].d)
    return (1 - r12 * RL * e1) * (1 - r32 * RR * e3) - e2 * (RL * e1 - r12) * (RR * e3 - r32)


def three_layer(d1=2e-7, d3=4e-7, plates=(IDEAL, IDEAL)):
    return SystemConfig(plates[0], [Layer(Vacuum(), d1), Layer(GLASS, 3e-7), Layer(Constant(1.77), d3)], plates[1])


def test_three_layer_effective_denominator():
    sys = three_layer()
    for pt in pts():
        assert rel(effective_denominator(sys, 2, pt), _n23(sys, pt)) < 1e-12


def test_three_layer_log_difference_is_gap_independent():
    for pt in pts():
        diffs = []
        for d1, d3 in ((1e-7, 4e-7), (2e-7, 4e-7), (5e-7, 1e-7)):
            sys = three_layer(d1, d3)
            diffs.append(np.log(n_denominator(sys, pt)) - np.log(_n23(sys, pt)))
        assert np.max(np.abs(diffs[1] - diffs[0])) < 1e-12
        assert np.max(np.abs(diffs[2] - diffs[0])) < 1e-12


def test_factorization():
    sys = asym5()
    for pt in pts():
        N = n_denominator(sys, pt)
        for l in range(2, sys.n):
            assert rel(N * two_stack_denominator(sys, l, pt), effective_denominator(sys, l, pt)) < 1e-12


def test_plate_removal_limit():
    sys = asym5()
    far = SystemConfig(sys.plate_left, [Layer(sys.medium[0].material, 1.0)] + list(sys.medium[1:-1])
                       + [Layer(sys.medium[-1].material, 1.0)], sys.plate_right)
    bare = SystemConfig(NONE, sys.medium, NONE)
    for pt in pts():
        for l in range(2, sys.n):
            assert rel(effective_denominator(far, l, pt), two_stack_denominator(far, l, pt)) < 1e-12
            assert np.array_equal(effective_denominator(bare, l, pt), two_stack_denominator(bare, l, pt))


def test_effective_denominator_index_checks():
    with pytest.raises(IndexError):
        effective_denominator(asym5(), 1, SpectralPoint(1e15, 1e6, "p"))


def test_touching_plates_are_degenerate():
    sys = SystemConfig(IDEAL, [Layer(Vacuum(), 0.0), Layer(GLASS, 1e-7), Layer(Vacuum(), 1e-7)], IDEAL)
    with pytest.raises(DegenerateError):
        n_denominator(sys, SpectralPoint(1e15, 1e6, "p"))


def test_ideal_mirrors_at_tiny_wavevector_are_degenerate():
    sys = SystemConfig(IDEAL, [Layer(Vacuum(), 1e-6)], IDEAL)
    with pytest.raises(DegenerateError):
        n_denominator(sys, SpectralPoint(1e-9, 1e-12, "p"))


def test_empty_medium_rejected():
    with pytest.raises(ValueError):
        SystemConfig(IDEAL, [], IDEAL)
