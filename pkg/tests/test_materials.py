import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from layercasimir.errors import DomainError
from layercasimir.materials import (
    C,
    Constant,
    Oscillator,
    OscillatorSum,
    SpectralPoint,
    Vacuum,
    eps_at,
    kappa,
    mu_at,
    refractive_index,
)

GOLD = OscillatorSum([Oscillator(wp2=1.37e16**2, w0=0.0, gamma=5.32e13)])
LORENTZ = OscillatorSum([Oscillator(wp2=4e32, w0=2e16, gamma=1e14), Oscillator(wp2=1e30, w0=1e14, gamma=1e12)])


def test_vacuum_is_one():
    assert eps_at(Vacuum(), 3.0e15) == 1.0
    assert mu_at(Vacuum(), 0.0) == 1.0


def test_constant():
    assert eps_at(Constant(2.25, 1), 1e15) == 2.25
    assert mu_at(Constant(2.25, 1.5), 1e15) == 1.5


def test_single_oscillator_hand_value():
    m = OscillatorSum([Oscillator(wp2=1e32, w0=1e16, gamma=0.0)])
    assert eps_at(m, 1e16) == pytest.approx(1.5, rel=1e-15)


def test_drude_rejects_zero_frequency():
    with pytest.raises(DomainError):
        eps_at(GOLD, 0.0)
    with pytest.raises(DomainError):
        kappa(GOLD, np.array([1e14, 0.0]), 1e6)
    assert np.isfinite(eps_at(GOLD, 1e-3))


def test_negative_frequency_rejected():
    with pytest.raises(DomainError):
        eps_at(LORENTZ, -1.0)


def test_lorentz_allows_zero_frequency():
    assert eps_at(LORENTZ, 0.0) == pytest.approx(1 + 4e32 / 4e32 + 1e30 / 1e28)


@pytest.mark.parametrize("bad", [dict(eps_inf=0.5), dict(eps_inf=2.0, mu_inf=0.9), dict(eps_inf=float("inf"))])
def test_constant_validation(bad):
    with pytest.raises(ValueError):
        Constant(**bad)


def test_oscillator_validation():
    with pytest.raises(ValueError):
        Oscillator(wp2=-1.0)


def test_polarization_validation():
    with pytest.raises(ValueError):
        SpectralPoint(1.0, 1.0, "x")


def test_kappa_examples():
    assert kappa(Vacuum(), 0.0, 1e6) == 1e6
    assert kappa(Vacuum(), C * 1e6, 0.0) == pytest.approx(1e6, rel=1e-15)
    assert kappa(Constant(4, 1), C * 1e6, 1e6) == pytest.approx(2.2360680e6, rel=1e-7)


@pytest.mark.parametrize("m", [GOLD, LORENTZ])
def test_eps_non_increasing(m):
    xi = np.logspace(8, 19, 400)
    e = eps_at(m, xi)
    assert np.all(e >= 1.0)
    assert np.all(np.diff(e) <= 0)


def test_refractive_index():
    assert refractive_index(Constant(4.0, 2.25), 1e15) == pytest.approx(3.0)


materials = st.sampled_from([Vacuum(), Constant(2.25), Constant(11.7, 1.3), GOLD, LORENTZ])
xis = st.floats(1e10, 1e18)
ks = st.floats(0.0, 1e9)


@given(materials, xis, ks)
def test_kappa_definition(m, xi, k):
    kap = kappa(m, xi, k)
    target = eps_at(m, xi) * mu_at(m, xi) * (xi / C) ** 2
    assert kap * kap - k * k == pytest.approx(target, rel=1e-12, abs=1e-12 * k * k)
    assert kap >= k
    assert kap >= refractive_index(m, xi) * xi / C * (1 - 1e-15)


@given(materials, xis, xis, ks, ks)
def test_kappa_monotone(m, xa, xb, ka, kb):
    lo_x, hi_x = sorted((xa, xb))
    lo_k, hi_k = sorted((ka, kb))
    # eps*xi**2 grows with xi for every oscillator term, so kappa does too
    assert kappa(m, lo_x, hi_k) >= kappa(m, lo_x, lo_k)
    assert kappa(m, hi_x, lo_k) >= kappa(m, lo_x, lo_k) * (1 - 1e-14)


@given(xis, ks, st.floats(1.0, 20.0), st.floats(0.0, 20.0))
def test_kappa_ordering_with_eps(xi, k, e1, extra):
    assert kappa(Constant(e1), xi, k) <= kappa(Constant(e1 + extra), xi, k)
