"""Odd Jacobi theta, Kronecker function, Weierstrass p and trigonometric limits.

Conventions: periods 1 and tau, and

    theta(z|tau) = -sum_k exp(pi i tau (k+1/2)^2 + 2 pi i (k+1/2)(z+1/2)),

so that theta(z+1) = -theta(z) and theta(z+tau) = -exp(-pi i tau - 2 pi i z) theta(z).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .jet_calculus import Jet, lift

IM_TAU_FLOOR = 0.2
# |theta(z)/theta'(0)| below this is treated as sitting on a lattice point
EVAL_POLE_FLOOR = 1e-13


class PoleError(ArithmeticError):
    """Evaluation too close to a pole of an elliptic or trigonometric function."""


class ConfigError(ValueError):
    """Invalid numerical configuration (modular parameter, tolerances)."""


@dataclass(frozen=True)
class EllipticConfig:
    series_tol: float = 1e-18
    pole_guard: float = 1e-3

    def __post_init__(self):
        if not self.series_tol > 0 or not self.pole_guard > 0:
            raise ConfigError("series_tol and pole_guard must be positive")


DEFAULT_CONFIG = EllipticConfig()


@dataclass(frozen=True)
class ModularParam:
    tau: complex
    floor: float = IM_TAU_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "tau", complex(self.tau))
        if not self.tau.imag > 0:
            raise ConfigError(f"Im(tau) must be positive, got {self.tau}")
        if self.tau.imag < self.floor:
            raise ConfigError(
                f"Im(tau) = {self.tau.imag:g} is below the truncation floor {self.floor:g}")

    @property
    def nome(self) -> complex:
        return complex(np.exp(2j * np.pi * self.tau))


def as_tau(tau) -> ModularParam:
    return tau if isinstance(tau, ModularParam) else ModularParam(complex(tau))


def check_pole(magnitude: float, floor: float, what: str):
    if not magnitude >= floor:
        raise PoleError(f"{what}: evaluation point is within {floor:g} of a pole")


def _theta_derivs(z: complex, tau: complex, order: int, tol: float) -> np.ndarray:
    """theta^{(m)}(z)/m! for m = 0..order."""
    t, y = tau.imag, z.imag
    # term magnitude is exp(-pi t (k+1/2)^2 - 2 pi (k+1/2) y); peak at k+1/2 = -y/t
    center = -y / t - 0.5
    log_margin = -math.log(tol) + order * 3.0 + 10.0
    half_width = math.sqrt(log_margin / (math.pi * t)) + 2
    k = np.arange(math.floor(center - half_width), math.ceil(center + half_width) + 1)
    h = k + 0.5
    expo = 1j * np.pi * tau * h * h + 2j * np.pi * h * (z + 0.5)
    # normalize by the largest term to keep exp() in range for shifted arguments
    shift = expo.real.max()
    terms = np.exp(expo - shift)
    out = np.empty(order + 1, dtype=complex)
    w = 2j * np.pi * h
    fac = np.ones_like(terms)
    for m in range(order + 1):
        out[m] = -np.sum(terms * fac) / math.factorial(m)
        fac = fac * w
    return out * math.exp(shift)


def theta_values(zs, tau, tol: float = DEFAULT_CONFIG.series_tol) -> np.ndarray:
    """Vectorized theta(z|tau) over an array of arguments."""
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    zs = np.asarray(zs, dtype=complex)
    flat = zs.ravel()
    t = tau_c.imag
    centers = -flat.imag / t - 0.5
    half_width = math.sqrt((-math.log(tol) + 10.0) / (math.pi * t)) + 2
    lo = math.floor(centers.min() - half_width) if flat.size else 0
    hi = math.ceil(centers.max() + half_width) if flat.size else 0
    h = np.arange(lo, hi + 1) + 0.5
    expo = 1j * np.pi * tau_c * h[None, :] ** 2 + 2j * np.pi * h[None, :] * (flat[:, None] + 0.5)
    shift = expo.real.max(axis=1, keepdims=True)
    vals = -np.exp(expo - shift).sum(axis=1) * np.exp(shift[:, 0])
    return vals.reshape(zs.shape)


def theta_taylor(z, tau, order: int, config: EllipticConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Taylor coefficients of theta(.|tau) at z up to ``order``."""
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    return _theta_derivs(complex(z), tau_c, order, config.series_tol)


def theta(z, tau, config: EllipticConfig = DEFAULT_CONFIG) -> complex:
    tau = as_tau(tau)
    return complex(_theta_derivs(complex(z), tau.tau, 0, config.series_tol)[0])


def theta_jet(z, tau, order: int, config: EllipticConfig = DEFAULT_CONFIG) -> Jet:
    """Univariate jet of theta around z."""
    tau = as_tau(tau)
    if order < 0:
        raise ValueError("order must be non-negative")
    return Jet(theta_taylor(z, tau, order, config), 1, order)


@functools.lru_cache(maxsize=256)
def _theta_odd_constants(tau: complex) -> tuple[complex, complex]:
    c = _theta_derivs(0j, tau, 3, DEFAULT_CONFIG.series_tol)
    return complex(c[1]), complex(6 * c[3])


def theta_prime0(tau) -> complex:
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    return _theta_odd_constants(tau_c)[0]


def wp_constant(tau) -> complex:
    """The constant c(tau) in wp = -(log theta)'' + c, fixed by z^2 wp -> 1."""
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    t1, t3 = _theta_odd_constants(tau_c)
    return t3 / (3 * t1)


def _normalized_theta(z: complex, tau_c: complex) -> complex:
    return _theta_derivs(z, tau_c, 0, DEFAULT_CONFIG.series_tol)[0] / _theta_odd_constants(tau_c)[0]


def kronecker_phi(z, mu, tau, config: EllipticConfig = DEFAULT_CONFIG) -> complex:
    """phi(z, mu | tau) = theta'(0) theta(z+mu) / (theta(z) theta(mu))."""
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    z, mu = complex(z), complex(mu)
    tz = _normalized_theta(z, tau_c)
    tm = _normalized_theta(mu, tau_c)
    check_pole(abs(tz), EVAL_POLE_FLOOR, "kronecker_phi(z)")
    check_pole(abs(tm), EVAL_POLE_FLOOR, "kronecker_phi(mu)")
    return complex(_normalized_theta(z + mu, tau_c) / (tz * tm))


LAURENT_TERMS = 24


@functools.lru_cache(maxsize=64)
def wp_laurent(tau_c: complex, terms: int = LAURENT_TERMS) -> np.ndarray:
    """c_k with wp(z) = 1/z^2 + sum_{k>=1} c_k z^(2k), from the Eisenstein series G4, G6."""
    q = np.exp(2j * math.pi * tau_c)
    ns = np.arange(1, 200)
    sig = lambda p: np.array([sum(d ** p for d in range(1, n + 1) if n % d == 0) for n in ns], dtype=float)
    qn = q ** ns
    keep = np.abs(qn) > 1e-300
    e4 = 1 + 240 * np.sum(sig(3)[keep] * qn[keep])
    e6 = 1 - 504 * np.sum(sig(5)[keep] * qn[keep])
    c = np.zeros(terms + 1, dtype=complex)
    c[1] = 3 * (math.pi ** 4 / 45) * e4
    c[2] = 5 * (2 * math.pi ** 6 / 945) * e6
    for k in range(3, terms + 1):
        c[k] = 3 / ((2 * k + 3) * (k - 2)) * sum(c[m] * c[k - 1 - m] for m in range(1, k - 1))
    return c


def _shortest_period(tau_c: complex) -> float:
    return min(abs(m + n * tau_c) for m in range(-3, 4) for n in range(-3, 4) if (m, n) != (0, 0))


def _wp_taylor_laurent(z: complex, tau_c: complex, order: int) -> np.ndarray:
    c = wp_laurent(tau_c)
    out = np.zeros(order + 1, dtype=complex)
    for m in range(order + 1):
        out[m] = (-1) ** m * (m + 1) * z ** (-m - 2)
        for k in range(1, len(c)):
            if 2 * k >= m:
                out[m] += c[k] * math.comb(2 * k, m) * z ** (2 * k - m)
    return out


def wp_taylor(z, tau, order: int) -> np.ndarray:
    """Taylor coefficients of wp at z (z off the lattice).

    Near z = 0 the theta quotient loses absolute accuracy to the double pole,
    so there the Laurent expansion is summed instead.
    """
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    if 0 < abs(z) < 0.15 * _shortest_period(tau_c):
        return _wp_taylor_laurent(complex(z), tau_c, order)
    th = Jet(_theta_derivs(complex(z), tau_c, order + 2, DEFAULT_CONFIG.series_tol), 1, order + 2)
    check_pole(abs(th.coeffs[0] / _theta_odd_constants(tau_c)[0]), EVAL_POLE_FLOOR, "weierstrass_p")
    u = th.derivative((1,)) / th.truncate(order + 1)
    wp = -u.derivative((1,)) + wp_constant(tau_c)
    return wp.coeffs


def weierstrass_p(z, tau) -> complex:
    return complex(wp_taylor(z, as_tau(tau), 0)[0])


def trig_phi(z, mu) -> complex:
    """(cot(z/2) + cot(mu/2)) / 2."""
    z, mu = complex(z), complex(mu)
    sz, sm = np.sin(z / 2), np.sin(mu / 2)
    check_pole(abs(sz), EVAL_POLE_FLOOR, "trig_phi(z)")
    check_pole(abs(sm), EVAL_POLE_FLOOR, "trig_phi(mu)")
    return complex(0.5 * (np.cos(z / 2) / sz + np.cos(mu / 2) / sm))


def trig_wp(z) -> complex:
    s = np.sin(complex(z) / 2)
    check_pole(abs(s), EVAL_POLE_FLOOR, "trig_wp")
    return complex(1.0 / (4 * s * s))


def half_cot_taylor(z0, order: int) -> np.ndarray:
    """Taylor coefficients of cot(z/2)/2 at z0."""
    x = Jet.variable(0, complex(z0), 1, order) * 0.5
    return (lift("cot", [x]) * 0.5).coeffs


def trig_wp_taylor(z0, order: int) -> np.ndarray:
    x = Jet.variable(0, complex(z0) / 2, 1, order)
    s = lift("sin", [x])
    check_pole(abs(complex(s.value)), EVAL_POLE_FLOOR, "trig_wp")
    out = (s * s * 4.0).reciprocal().coeffs
    return out * np.array([0.5 ** k for k in range(order + 1)])


# -- pole geometry and sampling ------------------------------------------------

def lattice_distance(z, tau) -> float:
    """Distance from z to the lattice Z + tau Z."""
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    z = complex(z)
    b = round(z.imag / tau_c.imag)
    w = z - b * tau_c
    a = round(w.real)
    w = w - a
    best = math.inf
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            best = min(best, abs(w - i - j * tau_c))
    return best


def trig_distance(z) -> float:
    """Distance from z to 2 pi Z."""
    z = complex(z)
    return abs(z - 2 * math.pi * round(z.real / (2 * math.pi)))


def sample_cell(rng: np.random.Generator, tau=None, scale: float = 0.8, size=None):
    """Uniform points of the fundamental cell scaled by ``scale`` and centered at 0.

    For tau None the cell is the trigonometric strip [-pi, pi] x [-0.5, 0.5] scaled.
    """
    u = rng.uniform(-scale / 2, scale / 2, size=size)
    v = rng.uniform(-scale / 2, scale / 2, size=size)
    if tau is None:
        return 2 * math.pi * u + 1j * v
    tau_c = tau.tau if isinstance(tau, ModularParam) else complex(tau)
    return u + v * tau_c
