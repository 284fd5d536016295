"""R-matrix families solving the associative Yang-Baxter equation, and their checks.

Every family is stored as a list of scalar terms attached to matrix entries.
Elliptic terms have the shape

    weight * exp(c0 + cz z + cm mu) * phi(z + sz, alpha mu + sm | tau_eff),

trigonometric terms are ``weight * (cot(z/2) + cot(mu/2)) / 2``.  The same
term list drives point evaluation, jets in z and mu, and the pole split
at mu = 0 used to extract the classical data ``R = res/mu + r(z) + mu m(z) + ...``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import elliptic_kernel as ell
from .jet_calculus import Jet, compose, lift
from .tensor_space import (embed_legs, permutation_matrix_p, q_lambda_matrices,
                     SpinSpace)


class FamilyKind(enum.Enum):
    SCALAR_ELLIPTIC = "scalar"
    BAXTER_BELAVIN = "bb"
    EIGHT_VERTEX = "eight_vertex"
    KRONECKER_P = "kronp"
    SCALAR_TRIG = "trig"
    TRIG_P = "trigp"


TRIG_KINDS = (FamilyKind.SCALAR_TRIG, FamilyKind.TRIG_P)
P_RESIDUE_KINDS = (FamilyKind.KRONECKER_P, FamilyKind.TRIG_P)
# below this |mu| R is summed from its mu-Laurent series (truncation ~ |mu|^MU_SERIES_TERMS)
MU_SERIES_RADIUS = 2e-3
MU_SERIES_TERMS = 7
MAX_JET_ORDER = 10


@dataclass(frozen=True)
class _Term:
    row: int
    col: int
    weight: complex = 1.0
    c0: complex = 0.0
    cz: complex = 0.0
    cm: complex = 0.0
    sz: complex = 0.0
    alpha: float = 1.0
    sm: complex = 0.0

    @property
    def mu_pole(self) -> bool:
        # only terms whose second argument is alpha*mu have a pole at mu = 0
        return self.sm == 0


@dataclass(frozen=True)
class QuasiPeriod:
    """R(z + dz, mu + dmu) = factor(z, mu) * left @ R(z, mu) @ right."""
    name: str
    dz: complex
    dmu: complex
    factor: Callable[[complex, complex], complex]
    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True, eq=False)
class RFamily:
    kind: FamilyKind
    d: int
    tau: ell.ModularParam | None = None
    terms: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind in TRIG_KINDS:
            if self.tau is not None:
                object.__setattr__(self, "tau", None)
        elif self.tau is None:
            raise ell.ConfigError(f"{self.kind.value} family needs a modular parameter")
        elif not isinstance(self.tau, ell.ModularParam):
            object.__setattr__(self, "tau", ell.ModularParam(self.tau))
        if self.kind in (FamilyKind.SCALAR_ELLIPTIC, FamilyKind.SCALAR_TRIG) and self.d != 1:
            raise ell.ConfigError(f"{self.kind.value} family has d = 1")
        if self.kind is FamilyKind.EIGHT_VERTEX and self.d != 2:
            raise ell.ConfigError("the eight-vertex family has d = 2")
        if self.d < 1:
            raise ell.ConfigError("d must be positive")
        object.__setattr__(self, "terms", tuple(_build_terms(self)))

    # -- declared data -----------------------------------------------------
    @property
    def dim(self) -> int:
        return self.d * self.d

    @property
    def is_trig(self) -> bool:
        return self.kind in TRIG_KINDS

    @property
    def tau_eff(self) -> complex:
        if self.kind is FamilyKind.BAXTER_BELAVIN:
            return self.d * self.tau.tau
        return self.tau.tau

    @property
    def label(self) -> str:
        return f"{self.kind.value}(d={self.d})"

    def residue(self) -> np.ndarray:
        """The mu-residue at mu = 0."""
        if self.kind in P_RESIDUE_KINDS:
            return permutation_matrix_p(self.d)
        return np.eye(self.dim, dtype=complex)

    def symmetry_right(self) -> np.ndarray:
        """Matrix S with R(z, mu) = R(mu, z) S."""
        if self.kind in P_RESIDUE_KINDS:
            return np.eye(self.dim, dtype=complex)
        return permutation_matrix_p(self.d)

    def wp(self, z) -> complex:
        return ell.trig_wp(z) if self.is_trig else ell.weierstrass_p(z, self.tau)

    def wp_taylor(self, z0, order: int) -> np.ndarray:
        if self.is_trig:
            return ell.trig_wp_taylor(z0, order)
        return ell.wp_taylor(z0, self.tau, order)

    def unitarity_factor(self, z, mu) -> complex:
        return self.wp(mu) - self.wp(z)

    def pole_distance(self, z) -> float:
        return ell.trig_distance(z) if self.is_trig else ell.lattice_distance(z, self.tau)

    def sample_point(self, rng: np.random.Generator) -> complex:
        return complex(ell.sample_cell(rng, None if self.is_trig else self.tau))

    def periods(self) -> tuple[complex, ...]:
        return (2 * math.pi,) if self.is_trig else (1.0, self.tau.tau)

    def quasi_periods(self) -> list[QuasiPeriod]:
        d, D = self.d, self.dim
        eye_d = np.eye(d)
        one = lambda z, mu: 1.0  # noqa: E731
        if self.is_trig:
            ident = np.eye(D, dtype=complex)
            return [QuasiPeriod("mu+2pi", 0, 2 * math.pi, one, ident, ident),
                    QuasiPeriod("z+2pi", 2 * math.pi, 0, one, ident, ident)]
        tau = self.tau.tau
        if self.kind is FamilyKind.KRONECKER_P:
            ident = np.eye(D, dtype=complex)
            return [
                QuasiPeriod("mu+1", 0, 1, one, ident, ident),
                QuasiPeriod("mu+tau", 0, tau, lambda z, mu: np.exp(-2j * np.pi * z), ident, ident),
                QuasiPeriod("z+1", 1, 0, one, ident, ident),
                QuasiPeriod("z+tau", tau, 0, lambda z, mu: np.exp(-2j * np.pi * mu), ident, ident),
            ]
        q, lam = q_lambda_matrices(d)
        qi, li = np.linalg.inv(q), np.linalg.inv(lam)
        return [
            QuasiPeriod("mu+1", 0, 1, one, np.kron(qi, eye_d), np.kron(eye_d, q)),
            QuasiPeriod("mu+tau", 0, tau, lambda z, mu: np.exp(-2j * np.pi * z / d),
                        np.kron(li, eye_d), np.kron(eye_d, lam)),
            # the z-shifts follow from the mu-shifts through R(z, mu) = R(mu, z) P
            QuasiPeriod("z+1", 1, 0, one, np.kron(qi, eye_d), np.kron(q, eye_d)),
            QuasiPeriod("z+tau", tau, 0, lambda z, mu: np.exp(-2j * np.pi * mu / d),
                        np.kron(li, eye_d), np.kron(lam, eye_d)),
        ]

    # -- evaluation ----------------------------------------------------------
    def evaluate(self, z, mu) -> np.ndarray:
        z, mu = complex(z), complex(mu)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        if self.is_trig:
            val = ell.trig_phi(z, mu)
            for t in self.terms:
                out[t.row, t.col] += t.weight * val
            return out
        a = _term_arrays(self)
        a1 = z + a["sz"]
        a2 = a["alpha"] * mu + a["sm"]
        th = ell.theta_values(np.concatenate([a1 + a2, a1, a2]), self.tau_eff)
        t1 = ell.theta_prime0(self.tau_eff)
        m = len(a1)
        den = th[m:2 * m] * th[2 * m:]
        ell.check_pole(float(np.min(np.abs(den))) / abs(t1) ** 2, ell.EVAL_POLE_FLOOR ** 2, "R-matrix")
        vals = a["weight"] * np.exp(a["c0"] + a["cz"] * z + a["cm"] * mu) * t1 * th[:m] / den
        np.add.at(out, (a["row"], a["col"]), vals)
        return out

    def evaluate_jet(self, z0, mu0, order: int, vars: str = "z", pole_split: bool = False) -> Jet:
        """Matrix jet of R (or of mu*R when ``pole_split``) around (z0, mu0).

        ``vars`` selects the jet variables: "z", "mu" or "both" (z first).
        The pole split requires mu0 = 0 and a mu variable.
        """
        if vars not in ("z", "mu", "both"):
            raise ValueError(f"unknown jet variables {vars!r}")
        if pole_split and (vars == "z" or mu0 != 0):
            raise ValueError("the pole split needs a mu variable at mu0 = 0")
        nv = 2 if vars == "both" else 1
        z0, mu0 = complex(z0), complex(mu0)
        Z = Jet.variable(0, z0, nv, order) if vars in ("z", "both") else Jet.constant(z0, nv, order)
        if vars == "z":
            M = Jet.constant(mu0, nv, order)
        else:
            M = Jet.variable(nv - 1, mu0, nv, order)
        return Jet(_term_jets(self, Z, M, pole_split), nv, order)

    def z_taylor(self, z0, mu, order: int) -> np.ndarray:
        """Taylor coefficients of R(z, mu) in z at z0, shape (order+1, D, D).

        For tiny mu the direct quotient loses absolute accuracy to the 1/mu
        pole; there the mu-Laurent series res/mu + r + mu m + ... is summed.
        """
        mu = complex(mu)
        if 0 < abs(mu) < MU_SERIES_RADIUS and order + MU_SERIES_TERMS <= MAX_JET_ORDER:
            return _mu_series_taylor(self, complex(z0), mu, order)
        return _z_taylor_cached(self, complex(z0), mu, order)

    def classical_data(self) -> "ClassicalRData":
        return ClassicalRData(self)

    def embed(self, m: np.ndarray, i: int, j: int, space: SpinSpace) -> np.ndarray:
        return embed_legs(m, (i, j), space)


@functools.lru_cache(maxsize=None)
def _term_arrays(fam: RFamily) -> dict:
    ts = fam.terms
    out = {k: np.array([getattr(t, k) for t in ts], dtype=complex)
           for k in ("weight", "c0", "cz", "cm", "sz", "alpha", "sm")}
    out["row"] = np.array([t.row for t in ts], dtype=np.intp)
    out["col"] = np.array([t.col for t in ts], dtype=np.intp)
    return out


def _build_terms(fam: RFamily) -> list[_Term]:
    d = fam.d
    k = fam.kind
    if k in (FamilyKind.SCALAR_ELLIPTIC, FamilyKind.SCALAR_TRIG):
        return [_Term(0, 0)]
    if k in (FamilyKind.KRONECKER_P, FamilyKind.TRIG_P):
        return [_Term(a * d + b, b * d + a) for a in range(d) for b in range(d)]
    if k is FamilyKind.EIGHT_VERTEX:
        tau = fam.tau.tau
        h = 0.5
        iz = 1j * math.pi
        p00 = dict(alpha=0.5)
        p10 = dict(alpha=0.5, sm=0.5)
        p01 = dict(alpha=0.5, sm=tau / 2, cz=iz)
        p11 = dict(alpha=0.5, sm=(1 + tau) / 2, cz=iz)
        spec = [
            (0, 0, [(h, p00), (h, p10)]), (3, 3, [(h, p00), (h, p10)]),
            (1, 1, [(h, p00), (-h, p10)]), (2, 2, [(h, p00), (-h, p10)]),
            (0, 3, [(h, p01), (-h, p11)]), (3, 0, [(h, p01), (-h, p11)]),
            (1, 2, [(h, p01), (h, p11)]), (2, 1, [(h, p01), (h, p11)]),
        ]
        return [_Term(r, c, weight=w, **kw) for r, c, parts in spec for w, kw in parts]
    # Baxter-Belavin: entry (alpha beta, gamma delta) sits at row alpha*d+gamma, col beta*d+delta
    tau = fam.tau.tau
    terms = []
    for a in range(d):
        for b in range(d):
            for c in range(d):
                dd = (a + c - b) % d
                s = 2j * math.pi / d
                terms.append(_Term(
                    a * d + c, b * d + dd,
                    c0=s * (c - b) * (b - a) * tau, cz=s * (b - a), cm=s * (c - b),
                    sz=(c - b) * tau, sm=(b - a) * tau))
    return terms


def _theta_of(g: Jet, tau_e: complex) -> Jet:
    return compose(ell.theta_taylor(complex(g.value), tau_e, g.order), g)


def _mu_over_theta(M: Jet, alpha: float, tau_e: complex) -> Jet:
    """mu / theta(alpha mu) as a jet, for M with vanishing constant term."""
    t = ell.theta_taylor(0j, tau_e, M.order + 1)
    s = t[1:]  # theta(u)/u
    return compose(s, M * alpha).reciprocal() / alpha


def _sinc_over_two(M: Jet) -> Jet:
    """sin(mu/2)/(mu/2) as a jet for M with vanishing constant term."""
    ks = np.zeros(M.order + 1, dtype=complex)
    for k in range(0, M.order + 1, 2):
        ks[k] = (-1) ** (k // 2) / math.factorial(k + 1)
    return compose(ks, M * 0.5)


def _term_jets(fam: RFamily, Z: Jet, M: Jet, pole_split: bool) -> np.ndarray:
    D = fam.dim
    out = np.zeros((Z.coeffs.shape[0], D, D), dtype=complex)
    if fam.is_trig:
        half_cot_z = lift("cot", [Z * 0.5]) * 0.5
        if pole_split:
            val = M * half_cot_z + lift("cos", [M * 0.5]) / _sinc_over_two(M)
        else:
            val = half_cot_z + lift("cot", [M * 0.5]) * 0.5
        for t in fam.terms:
            out[:, t.row, t.col] += t.weight * val.coeffs
        return out
    tau_e = fam.tau_eff
    t1 = ell.theta_prime0(tau_e)
    phis: dict = {}
    prefs: dict = {}
    for t in fam.terms:
        key = (t.sz, t.alpha, t.sm)
        if key not in phis:
            a1 = Z + t.sz
            a2 = M * t.alpha + t.sm
            num = _theta_of(a1 + a2, tau_e) * t1 / _theta_of(a1, tau_e)
            if pole_split and t.mu_pole:
                phis[key] = num * _mu_over_theta(M, t.alpha, tau_e)
            elif pole_split:
                phis[key] = num / _theta_of(a2, tau_e) * M
            else:
                phis[key] = num / _theta_of(a2, tau_e)
        pk = (t.c0, t.cz, t.cm)
        if pk not in prefs:
            prefs[pk] = lift("exp", [Z * t.cz + M * t.cm + t.c0])
        out[:, t.row, t.col] += t.weight * (prefs[pk] * phis[key]).coeffs
    return out


@functools.lru_cache(maxsize=4096)
def _z_taylor_cached(fam: RFamily, z0: complex, mu: complex, order: int) -> np.ndarray:
    return fam.evaluate_jet(z0, mu, order, "z").coeffs


def _mu_series_taylor(fam: RFamily, z0: complex, mu: complex, order: int) -> np.ndarray:
    c = _split_cached(fam, z0, order + MU_SERIES_TERMS)[: order + 1, : MU_SERIES_TERMS + 1].copy()
    # the residue is constant in z
    c[0, 0] = fam.residue()
    c[1:, 0] = 0
    pw = mu ** (np.arange(MU_SERIES_TERMS + 1) - 1.0)
    return np.einsum("abij,b->aij", c, pw)


@functools.lru_cache(maxsize=4096)
def _split_cached(fam: RFamily, z0: complex, order: int) -> np.ndarray:
    """Coefficients c[a, b] of mu*R(z0 + s, mu) = sum c[a,b] s^a mu^b, a + b <= order."""
    jet = fam.evaluate_jet(z0, 0.0, order, "both", pole_split=True)
    out = np.zeros((order + 1, order + 1, fam.dim, fam.dim), dtype=complex)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            out[a, b] = jet.coefficient((a, b))
    return out


class ClassicalRData:
    """The expansion R(z, mu) = res/mu + r(z) + mu m(z) + O(mu^2) of a family."""

    def __init__(self, fam: RFamily):
        self.family = fam

    def mu_coefficients(self, z0, order: int) -> np.ndarray:
        return _split_cached(self.family, complex(z0), order)

    def r_taylor(self, z0, order: int) -> np.ndarray:
        """Taylor coefficients of r in z at z0 up to ``order``."""
        return self.mu_coefficients(z0, order + 1)[: order + 1, 1]

    def m_taylor(self, z0, order: int) -> np.ndarray:
        return self.mu_coefficients(z0, order + 2)[: order + 1, 2]

    def residue_taylor(self, z0, order: int) -> np.ndarray:
        return self.mu_coefficients(z0, order)[: order + 1, 0]

    def r(self, z) -> np.ndarray:
        return self.r_taylor(z, 0)[0]

    def m(self, z) -> np.ndarray:
        return self.m_taylor(z, 0)[0]

    def dr(self, z) -> np.ndarray:
        return self.r_taylor(z, 1)[1]

    def dm(self, z) -> np.ndarray:
        return self.m_taylor(z, 1)[1]


def make_family(name: str, d: int = 1, tau=1j) -> RFamily:
    kind = FamilyKind(name)
    if kind in (FamilyKind.SCALAR_ELLIPTIC, FamilyKind.SCALAR_TRIG):
        d = 1
    return RFamily(kind, d, None if kind in TRIG_KINDS else ell.as_tau(tau))


# -- verification --------------------------------------------------------------

def rel_residual(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """||lhs - rhs||_F / max(1, ||lhs||_F, ||rhs||_F)."""
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    scale = max(1.0, float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    return float(np.linalg.norm(lhs - rhs)) / scale


def contour_residue(f: Callable[[complex], np.ndarray], center: complex = 0.0,
                    radius: float = 0.05, points: int = 64) -> np.ndarray:
    """Residue of f at ``center`` by the trapezoid rule on a circle."""
    ang = 2 * np.pi * (np.arange(points) + 0.5) / points
    acc = 0
    for th in ang:
        w = radius * np.exp(1j * th)
        acc = acc + w * f(center + w)
    return acc / points


def sample_args(fam: RFamily, rng: np.random.Generator, guard: float,
                count: int = 4, combos=None) -> tuple[complex, ...]:
    """Rejection-sample ``count`` cell points with every derived argument off the poles.

    ``combos`` lists integer coefficient vectors; each linear combination of the
    sampled points must stay ``guard`` away from the pole set.
    """
    if combos is None:
        combos = [(1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0),
                  (0, 0, 1, 0), (0, 0, 0, 1), (0, 0, 1, -1)]
    for _ in range(10000):
        pts = [fam.sample_point(rng) for _ in range(count)]
        ok = True
        for c in combos:
            val = sum(ci * p for ci, p in zip(c, pts))
            if fam.pole_distance(val) < guard:
                ok = False
                break
        if ok:
            return tuple(pts)
    raise RuntimeError("pole-guarded sampling failed")


def _three_leg(fam: RFamily):
    sp = SpinSpace(fam.d, 3) if fam.d ** 3 <= 4096 else None

    def leg(m, i, j):
        if fam.d == 1:
            return m
        return embed_legs(m, (i, j), sp)
    return leg


SUITE_IDENTITIES = ("skew_symmetry", "aybe", "unitarity", "qybe", "regularity",
                    "quasi_periodicity", "symmetry")


def _suite_sample(fam: RFamily, seed: int, k: int, guard: float) -> dict:
    rng = np.random.default_rng([seed, k])
    z, zp, mu, mup = sample_args(fam, rng, guard)
    R = fam.evaluate
    P = permutation_matrix_p(fam.d)
    leg = _three_leg(fam)
    res = {}
    res["skew_symmetry"] = rel_residual(R(-z, -mu), -P @ R(z, mu) @ P)
    lhs = leg(R(z, mu), 0, 1) @ leg(R(zp, mup), 1, 2)
    rhs = (leg(R(z + zp, mup), 0, 2) @ leg(R(z, mu - mup), 0, 1)
           + leg(R(zp, mup - mu), 1, 2) @ leg(R(z + zp, mu), 0, 2))
    res["aybe"] = rel_residual(lhs, rhs)
    res["unitarity"] = rel_residual(R(z, mu) @ P @ R(-z, mu) @ P,
                                    fam.unitarity_factor(z, mu) * np.eye(fam.dim))
    a, b, c = leg(R(z, mu), 0, 1), leg(R(z + zp, mu), 0, 2), leg(R(zp, mu), 1, 2)
    res["qybe"] = rel_residual(a @ b @ c, c @ b @ a)
    res["symmetry"] = rel_residual(R(z, mu), R(mu, z) @ fam.symmetry_right())
    worst = 0.0
    for qp in fam.quasi_periods():
        lhs = R(z + qp.dz, mu + qp.dmu)
        rhs = qp.factor(z, mu) * qp.left @ R(z, mu) @ qp.right
        worst = max(worst, rel_residual(lhs, rhs))
    if fam.kind in (FamilyKind.BAXTER_BELAVIN, FamilyKind.EIGHT_VERTEX):
        q, lam = q_lambda_matrices(fam.d)
        for g in (np.kron(q, q), np.kron(lam, lam)):
            m = R(z, mu)
            worst = max(worst, rel_residual(g @ m, m @ g))
    res["quasi_periodicity"] = worst
    # residue in mu at 0 by contour integration, compared with the declared matrix
    radius = min(0.05, 0.5 * fam.pole_distance(z))
    resid = contour_residue(lambda w: R(z, w), 0.0, radius)
    res["regularity"] = rel_residual(resid, fam.residue())
    return res


def identity_suite(fam: RFamily, samples: int = 100, seed: int = 0,
                   guard: float = ell.DEFAULT_CONFIG.pole_guard, tol: float | None = None) -> list[dict]:
    """Maximal relative residuals of the defining identities over seeded samples."""
    from .reports import make_report, parallel_map

    per = parallel_map(lambda k: _suite_sample(fam, seed, k, guard), range(samples))
    return [make_report(fam.label, name, samples, max(p[name] for p in per), seed, tol)
            for name in SUITE_IDENTITIES]


def eight_vertex_agreement(tau=1j, samples: int = 20, seed: int = 0,
                           guard: float = ell.DEFAULT_CONFIG.pole_guard) -> float:
    """Max entrywise difference between the explicit d = 2 matrix and the general formula."""
    tau = ell.as_tau(tau)
    bb = RFamily(FamilyKind.BAXTER_BELAVIN, 2, tau)
    ev = RFamily(FamilyKind.EIGHT_VERTEX, 2, tau)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        z, mu = sample_args(bb, rng, guard, 2, [(1, 0), (0, 1)])
        a, b = bb.evaluate(z, mu), ev.evaluate(z, mu)
        worst = max(worst, float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(a)))))
    return worst


def classical_suite(fam: RFamily, samples: int = 20, seed: int = 0,
                    guard: float = ell.DEFAULT_CONFIG.pole_guard) -> dict:
    """Residuals for r, m: skew relations, z-residue of r, CYBE and m = (r^2 - wp)/2."""
    cd = fam.classical_data()
    P = permutation_matrix_p(fam.d)
    leg = _three_leg(fam)
    rng = np.random.default_rng(seed)
    out = {"r_skew": 0.0, "m_skew": 0.0, "dr_skew": 0.0, "cybe": 0.0, "m_formula": 0.0}
    for _ in range(samples):
        z1, z2, z3 = sample_args(fam, rng, guard, 3, [(1, -1, 0), (0, 1, -1), (1, 0, -1)])
        z = z1 - z2
        out["r_skew"] = max(out["r_skew"], rel_residual(cd.r(z), -P @ cd.r(-z) @ P))
        out["m_skew"] = max(out["m_skew"], rel_residual(cd.m(z), P @ cd.m(-z) @ P))
        out["dr_skew"] = max(out["dr_skew"], rel_residual(cd.dr(z), P @ cd.dr(-z) @ P))
        r12, r13, r23 = (leg(cd.r(z1 - z2), 0, 1), leg(cd.r(z1 - z3), 0, 2),
                         leg(cd.r(z2 - z3), 1, 2))
        if fam.kind not in P_RESIDUE_KINDS:
            # the classical Yang-Baxter equation and the m formula need residue Id
            lhs = (r12 @ r23 - r23 @ r12) + (r12 @ r13 - r13 @ r12)
            out["cybe"] = max(out["cybe"], rel_residual(lhs, -(r13 @ r23 - r23 @ r13)))
            rz = cd.r(z)
            out["m_formula"] = max(out["m_formula"], rel_residual(
                cd.m(z), 0.5 * (rz @ rz - fam.wp(z) * np.eye(fam.dim))))
    out["r_residue"] = rel_residual(contour_residue(cd.r, 0.0, 0.05), P)
    return out
