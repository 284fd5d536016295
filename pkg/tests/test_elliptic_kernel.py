import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmatrix_cm import elliptic_kernel as ell

TAU = ell.ModularParam(1j)


def wp_lattice(z, tau, m_max=40):
    # independent oracle: sum over one lattice direction of the sin^-2 kernel
    s = 0
    for m in range(-m_max, m_max + 1):
        s += np.pi**2 / np.sin(np.pi * (z + m * tau)) ** 2
        if m:
            s -= np.pi**2 / np.sin(np.pi * m * tau) ** 2
    return s - np.pi**2 / 3


cell = st.complex_numbers(max_magnitude=0.45, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("z", [0.3 + 0.2j, 0.17, 0.41 - 0.3j, 0.05 + 0.01j, 1e-3])
def test_wp_matches_lattice_sum(z):
    assert abs(ell.weierstrass_p(z, TAU) - wp_lattice(z, 1j)) < 1e-9 * max(1, abs(wp_lattice(z, 1j)))


def test_wp_laurent_branch_is_continuous():
    tau = ell.ModularParam(0.3 + 1.1j)
    z = 0.15 * ell._shortest_period(tau.tau)
    inside = ell.wp_taylor(z * (1 - 1e-9), tau, 3)
    outside = ell.wp_taylor(z * (1 + 1e-9), tau, 3)
    assert np.allclose(inside, outside, rtol=1e-7)


def test_wp_near_zero_is_pole_dominated():
    for z in (1e-2, 2.7e-3, 6.7e-4):
        # wp - 1/z^2 = O(z^2) for the square lattice (G2 term only affects the constant)
        assert abs(ell.weierstrass_p(z, TAU) - 1 / z**2) < 1e-3


def test_theta_quasi_periodicity():
    z = 0.2 + 0.1j
    assert abs(ell.theta(z + 1, TAU) + ell.theta(z, TAU)) < 1e-13
    ratio = ell.theta(z + 1j, TAU) / ell.theta(z, TAU)
    assert abs(ratio + np.exp(-1j * np.pi * 1j - 2j * np.pi * z)) < 1e-10 * abs(ratio)


def test_theta_is_odd():
    for z in (0.1, 0.3 + 0.2j):
        assert abs(ell.theta(-z, TAU) + ell.theta(z, TAU)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(cell, cell, cell, cell)
def test_kronecker_fay_identity(z, zp, mu, mup):
    pts = [z, zp, z + zp, mu, mup, mu - mup]
    if min(ell.lattice_distance(p, TAU) for p in pts) < 0.05:
        return
    f = lambda a, b: ell.kronecker_phi(a, b, TAU)
    lhs = f(z, mu) * f(zp, mup)
    rhs = f(z + zp, mup) * f(z, mu - mup) + f(zp, mup - mu) * f(z + zp, mu)
    assert abs(lhs - rhs) < 1e-8 * max(1, abs(lhs))


@settings(max_examples=40, deadline=None)
@given(cell, cell)
def test_kronecker_product_gives_wp_difference(z, mu):
    if min(ell.lattice_distance(p, TAU) for p in (z, mu)) < 0.05:
        return
    lhs = ell.kronecker_phi(z, mu, TAU) * ell.kronecker_phi(-z, mu, TAU)
    rhs = ell.weierstrass_p(mu, TAU) - ell.weierstrass_p(z, TAU)
    assert abs(lhs - rhs) < 1e-8 * max(1, abs(lhs))


def test_kronecker_trig_degeneration():
    # Im tau -> infinity: phi -> pi (cot pi z + cot pi mu)
    val = ell.kronecker_phi(0.3, 0.4, ell.ModularParam(3j))
    assert abs(val - np.pi * (1 / np.tan(np.pi * 0.3) + 1 / np.tan(np.pi * 0.4))) < 1e-6


def test_trig_phi_and_wp():
    assert abs(ell.trig_phi(0.3, 0.4) - 0.5 * (1 / np.tan(0.15) + 1 / np.tan(0.2))) < 1e-14
    assert abs(ell.trig_wp(0.7) - 1 / (4 * np.sin(0.35) ** 2)) < 1e-14
    t = ell.trig_wp_taylor(0.7, 2)
    h = 1e-4
    fd = (ell.trig_wp(0.7 + h) - ell.trig_wp(0.7 - h)) / (2 * h)
    assert abs(t[1] - fd) < 1e-6


def test_im_tau_floor():
    with pytest.raises(ell.ConfigError):
        ell.ModularParam(0.05j)


def test_pole_error():
    with pytest.raises(ell.PoleError):
        ell.trig_phi(0.0, 0.3)


def test_lattice_distance():
    assert ell.lattice_distance(1 + 1j + 0.01, TAU) == pytest.approx(0.01)
    assert ell.trig_distance(2 * np.pi - 0.02) == pytest.approx(0.02)


def test_sample_cell_is_seeded():
    a = ell.sample_cell(np.random.default_rng(4), TAU, size=5)
    b = ell.sample_cell(np.random.default_rng(4), TAU, size=5)
    assert np.array_equal(a, b)
