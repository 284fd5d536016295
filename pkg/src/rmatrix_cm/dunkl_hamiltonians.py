"""R-matrix Dunkl operators, the substituted eCM Hamiltonians and their splits.

Sites are 0-based.  ``cycle(n, i, j, k)`` is the 3-cycle i -> j -> k -> i.
The index r = 2 in ``spin_hamiltonian``, ``spinsep_split`` and the freezing
refers to the quadratic Hamiltonian h = h1^2 - 2 h2 (sum p_i^2 - 2 g^2 sum wp);
``substitute`` and ``lambda_zero_limit`` accept "h" for it and 1, 2, 3 for the
elementary ones.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import elliptic_kernel as ell
from .operator_algebra import (Const, CrossedElement, HbarPoly, LambdaFn,
                               LinearExp, PairFn, Product, Reciprocal, Sum, Term,
                               at_lambda, commutator, default_sampler,
                               divide_by_hbar, element, hat_act, is_zero, max_coeff,
                               multiply, prod, res_hat, res_vee, scalar, unit_alpha,
                               zero_alpha)
from .reports import make_report
from .rmatrix_families import RFamily, make_family
from .tensor_space import (SpinSpace, embed_one_leg, identity_perm, inverse,
                           q_lambda_matrices, transposition)

HBAR = HbarPoly.hbar()
RICHARDSON_EPS = (1e-2, 5e-3, 2.5e-3)
RICHARDSON_WEIGHTS = (1 / 3, -2.0, 8 / 3)


@dataclass(frozen=True)
class ModelParams:
    g: complex
    family: RFamily
    space: SpinSpace

    def __post_init__(self):
        if self.family.d != self.space.d:
            raise ValueError(f"family d={self.family.d} does not match spin space d={self.space.d}")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def flavor(self) -> str:
        return "trigonometric" if self.family.is_trig else "elliptic"


def make_params(family: str = "bb", d: int = 2, n: int = 3, g: complex = 0.7,
                tau=1j, budget: int | None = None) -> ModelParams:
    fam = make_family(family, d, tau)
    space = SpinSpace(fam.d, n) if budget is None else SpinSpace(fam.d, n, budget)
    return ModelParams(complex(g), fam, space)


@dataclass(frozen=True)
class PhasePoint:
    x: tuple
    p: tuple
    lam: tuple


def cycle(n: int, i: int, j: int, k: int) -> tuple:
    w = list(range(n))
    w[i], w[j], w[k] = j, k, i
    return tuple(w)


def vee_cycle(n: int, i: int, j: int, k: int) -> tuple:
    """The 3-cycle (ijk) acting on spectral labels: i <- j <- k <- i as index maps."""
    return inverse(cycle(n, i, j, k))


def _ids(n):
    return identity_perm(n), identity_perm(n)


def _pairs(n):
    return list(itertools.combinations(range(n), 2))


def _triples(n):
    return list(itertools.combinations(range(n), 3))


def _lam_diff(a, b) -> LambdaFn:
    return LambdaFn(lambda lam, a=a, b=b: lam[a] - lam[b], f"lam{a}-lam{b}")


def _lam(a) -> LambdaFn:
    return LambdaFn(lambda lam, a=a: lam[a], f"lam{a}")


def _wp_lam(fam: RFamily, a, b) -> LambdaFn:
    return LambdaFn(lambda lam, a=a, b=b: fam.wp(lam[a] - lam[b]), f"wp(lam{a}-lam{b})")


def _alpha(n, *sites) -> tuple:
    a = [0] * n
    for s in sites:
        a[s] += 1
    return tuple(a)


# -- Dunkl operators -------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def dunkl(i: int, params: ModelParams, quantum: bool = True) -> CrossedElement:
    """y_i = p_i - g sum_{j != i} R_ij(x_i - x_j, lam_i - lam_j) s_ij."""
    n, fam = params.n, params.family
    if not 0 <= i < n:
        raise ValueError(f"site {i} out of range for n={n}")
    idn = identity_perm(n)
    terms = [Term(Const(1.0), unit_alpha(n, i), idn, idn)]
    if params.g != 0:
        for j in range(n):
            if j != i:
                terms.append(Term(PairFn(fam, i, j, "R", ("lam", i, j)), zero_alpha(n),
                                  transposition(n, i, j), idn, 0, -params.g))
    return element(params.space, terms, classical=not quantum)


# -- classical Hamiltonians --------------------------------------------------------

@dataclass(frozen=True)
class Monomial:
    """coef * wp(x_a - x_b)^[pair given] * prod_{s in ps} p_s."""
    coef: complex
    pair: tuple | None
    ps: tuple


class ClassicalHamiltonian:
    def __init__(self, name, monomials: Sequence[Monomial], family: RFamily):
        self.name = name
        self.monomials = tuple(monomials)
        self.family = family

    def __call__(self, x, p) -> complex:
        out = 0j
        for m in self.monomials:
            v = m.coef
            if m.pair is not None:
                v *= self.family.wp(x[m.pair[0]] - x[m.pair[1]])
            for s in m.ps:
                v *= p[s]
            out += v
        return complex(out)


def ecm_classical(r, params: ModelParams) -> ClassicalHamiltonian:
    """h_1, h_2, h_3 or the quadratic h = sum p^2 - 2 g^2 sum wp (r = "h")."""
    n, g2 = params.n, params.g ** 2
    mons: list[Monomial] = []
    if r == 1:
        mons = [Monomial(1.0, None, (i,)) for i in range(n)]
    elif r == 2:
        for i, j in _pairs(n):
            mons += [Monomial(1.0, None, (i, j)), Monomial(g2, (i, j), ())]
    elif r == 3:
        for i, j, k in _triples(n):
            mons += [Monomial(1.0, None, (i, j, k)), Monomial(g2, (i, j), (k,)),
                     Monomial(g2, (i, k), (j,)), Monomial(g2, (j, k), (i,))]
    elif r == "h":
        mons = [Monomial(1.0, None, (i, i)) for i in range(n)]
        mons += [Monomial(-2 * g2, (i, j), ()) for i, j in _pairs(n)]
    else:
        raise ValueError(f"unsupported Hamiltonian index {r!r}; use 1, 2, 3 or 'h'")
    return ClassicalHamiltonian(r, mons, params.family)


def _product(elems: Sequence[CrossedElement]) -> CrossedElement:
    out = elems[0]
    for e in elems[1:]:
        out = multiply(out, e)
    return out


@functools.lru_cache(maxsize=None)
def substitute(r, params: ModelParams, quantum: bool = True) -> CrossedElement:
    """h_r(lambda, y): x -> lambda, p -> y, built through crossed-product products."""
    h = ecm_classical(r, params)
    sp, fam = params.space, params.family
    parts = []
    for m in h.monomials:
        ys = [dunkl(s, params, quantum) for s in m.ps]
        c = _wp_lam(fam, *m.pair) if m.pair is not None else Const(1.0)
        lead = element(sp, [Term(c, zero_alpha(params.n), *_ids(params.n))], classical=not quantum)
        parts.append((_product([lead] + ys) if ys else lead, m.coef))
    return Sum(parts)


def _leaf(params: ModelParams, terms, quantum=True) -> CrossedElement:
    return element(params.space, terms, classical=not quantum)


def _t(coeff, alpha, w_hat=None, w_vee=None, k=0, factor=1.0, n=None):
    n = len(alpha)
    return Term(coeff, alpha, w_hat or identity_perm(n), w_vee or identity_perm(n), k, factor)


def quadratic_closed_form(params: ModelParams, at_zero: bool = False) -> CrossedElement:
    """h(lambda, y) = sum p^2 - 2g^2 sum wp - 2 g hbar sum dR_ij s_ij (dR -> r' at lambda = 0)."""
    n, fam, g = params.n, params.family, params.g
    terms = [_t(Const(1.0), _alpha(n, i, i)) for i in range(n)]
    for i, j in _pairs(n):
        terms.append(_t(PairFn(fam, i, j, "wp"), zero_alpha(n), factor=-2 * g * g))
        q = PairFn(fam, i, j, "dr") if at_zero else PairFn(fam, i, j, "dR", ("lam", i, j))
        terms.append(_t(q, zero_alpha(n), transposition(n, i, j), k=1, factor=-2 * g))
    return _leaf(params, terms)


def cubic_zero_closed_form(params: ModelParams) -> CrossedElement:
    """The closed form of h_3(0, y)."""
    n, fam, g = params.n, params.family, params.g
    P = lambda i, j, q: PairFn(fam, i, j, q)
    terms = []
    for i, j, k in _triples(n):
        terms.append(_t(Const(1.0), _alpha(n, i, j, k)))
    for i, j, k in itertools.permutations(range(n), 3):
        terms.append(_t(P(i, j, "wp"), _alpha(n, k), factor=0.5 * g * g))
    for i, j, k in _triples(n):
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            terms.append(_t(P(a, b, "dr"), _alpha(n, c), transposition(n, a, b), k=1, factor=g))
        z = zero_alpha(n)
        c1, c2 = cycle(n, i, j, k), cycle(n, k, j, i)
        g2 = g * g
        terms += [
            _t(prod(P(i, j, "dr"), P(i, k, "r")), z, c1, k=1, factor=g2),
            _t(prod(P(j, k, "r"), P(i, j, "dr")), z, c1, k=1, factor=-g2),
            _t(P(i, j, "dm"), z, c1, k=1, factor=-g2),
            _t(prod(P(i, j, "dr"), P(j, k, "r")), z, c2, k=1, factor=g2),
            _t(prod(P(i, k, "r"), P(i, j, "dr")), z, c2, k=1, factor=-g2),
            _t(P(i, j, "dm"), z, c2, k=1, factor=g2),
        ]
    return _leaf(params, terms)


def lambda_zero_limit(r, params: ModelParams) -> CrossedElement:
    """Closed-form h_r(0, y) for r in {1, 2, 3, "h"}."""
    n, fam, g = params.n, params.family, params.g
    if r == 1:
        return _leaf(params, [_t(Const(1.0), _alpha(n, i)) for i in range(n)])
    if r == "h":
        return quadratic_closed_form(params, at_zero=True)
    if r == 2:
        terms = []
        for i, j in _pairs(n):
            terms += [_t(Const(1.0), _alpha(n, i, j)),
                      _t(PairFn(fam, i, j, "wp"), zero_alpha(n), factor=g * g),
                      _t(PairFn(fam, i, j, "dr"), zero_alpha(n), transposition(n, i, j), k=1, factor=g)]
        return _leaf(params, terms)
    if r == 3:
        return cubic_zero_closed_form(params)
    raise ValueError(f"unsupported Hamiltonian index {r!r}")


def richardson_direction(n: int) -> tuple:
    rho = np.arange(1, n + 1, dtype=float)
    return tuple(rho / np.linalg.norm(rho))


def richardson_limit(a: CrossedElement, x, order: int = 0,
                     eps: Sequence[float] = RICHARDSON_EPS,
                     weights: Sequence[float] = RICHARDSON_WEIGHTS) -> dict:
    """Extrapolate the normal form of ``a`` at lambda = eps * rho to eps -> 0."""
    rho = np.array(richardson_direction(a.n))
    out: dict = {}
    for e, w in zip(eps, weights):
        for key, j in a.nf(x, tuple(e * rho), order).items():
            v = _as_matrix(j.value, a.space.dim) * w
            out[key] = out[key] + v if key in out else v
    return out


def _as_matrix(v, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v if v.ndim == 2 else v * np.eye(dim)


def compare_nf(a: dict, b: dict, dim: int) -> float:
    """max_k |a_k - b_k| / max_k max(|a_k|, |b_k|) over the union of keys."""
    keys = set(a) | set(b)
    diff, scale = 0.0, 0.0
    for k in keys:
        va = _as_matrix(a.get(k, 0.0), dim)
        vb = _as_matrix(b.get(k, 0.0), dim)
        diff = max(diff, float(np.max(np.abs(va - vb))))
        scale = max(scale, float(np.max(np.abs(va))), float(np.max(np.abs(vb))))
    return diff / scale if scale else diff


def _values(nf: dict) -> dict:
    return {k: np.asarray(j.value) for k, j in nf.items()}


def limit_check(r, params: ModelParams, samples: int = 5, seed: int = 0, tol: float | None = None) -> dict:
    """Closed-form lambda -> 0 limit against Richardson extrapolation of h_r(lambda, y)."""
    built = substitute(r, params)
    closed = lambda_zero_limit(r, params)
    sampler = default_sampler(params.family, params.n, lam=(0.0,) * params.n)
    worst = 0.0
    for k in range(samples):
        x, _ = sampler(np.random.default_rng([seed, k]))
        worst = max(worst, compare_nf(richardson_limit(built, x), _values(closed.nf(x, (0j,) * params.n)), params.space.dim))
    return make_report(params.family.label, f"lambda_zero_limit_h{r}", samples, worst, seed, tol)


# -- spin Hamiltonians and splits ------------------------------------------------------

def spin_hamiltonian(r, params: ModelParams) -> CrossedElement:
    """Res_hat(h_r(0, y)); r = 2 means the quadratic Hamiltonian h."""
    return res_hat(lambda_zero_limit("h" if r == 2 else r, params))


def _wp_p_terms(params, factor):
    n, fam = params.n, params.family
    terms = []
    for i, j, k in _triples(n):
        for (a, b), c in (((i, j), k), ((j, k), i), ((k, i), j)):
            terms.append(_t(PairFn(fam, a, b, "wp"), _alpha(n, c), factor=factor))
    return terms


def _dr_p_terms(params, factor, k=0):
    n, fam = params.n, params.family
    terms = []
    for i, j, l in _triples(n):
        for (a, b), c in (((i, j), l), ((j, l), i), ((l, i), j)):
            terms.append(_t(PairFn(fam, a, b, "dr"), _alpha(n, c), k=k, factor=factor))
    return terms


def _bracket_terms(params, factor, k=0):
    """factor * sum_{i<j<k} [r'_ij, r_ik + r_jk]."""
    n, fam = params.n, params.family
    P = lambda i, j, q: PairFn(fam, i, j, q)
    terms = []
    z = zero_alpha(n)
    for i, j, l in _triples(n):
        for o in (P(i, l, "r"), P(j, l, "r")):
            terms += [_t(prod(P(i, j, "dr"), o), z, k=k, factor=factor),
                      _t(prod(o, P(i, j, "dr")), z, k=k, factor=-factor)]
    return terms


def spin_hamiltonian_display(r, params: ModelParams) -> CrossedElement:
    """The explicit quadratic (r = 2) and cubic (r = 3) R-matrix eCM Hamiltonians."""
    n, fam, g = params.n, params.family, params.g
    if r == 2:
        terms = [_t(Const(1.0), _alpha(n, i, i)) for i in range(n)]
        for i, j in _pairs(n):
            terms += [_t(PairFn(fam, i, j, "wp"), zero_alpha(n), factor=-2 * g * g),
                      _t(PairFn(fam, i, j, "dr"), zero_alpha(n), k=1, factor=-2 * g)]
        return _leaf(params, terms)
    if r == 3:
        terms = [_t(Const(1.0), _alpha(n, i, j, k)) for i, j, k in _triples(n)]
        terms += _wp_p_terms(params, g * g)
        terms += _dr_p_terms(params, g, k=1)
        terms += _bracket_terms(params, g * g, k=1)
        return _leaf(params, terms)
    raise ValueError("spin_hamiltonian_display supports r = 2, 3")


def scalar_quantum_hamiltonian(r, params: ModelParams) -> CrossedElement:
    """H_2 = sum p^2 - 2g(g - hbar) sum wp, and the cubic H_3."""
    n, fam, g = params.n, params.family, params.g
    if r == 2:
        parts = [(_leaf(params, [_t(Const(1.0), _alpha(n, i, i)) for i in range(n)]), 1.0)]
        wp = _leaf(params, [_t(PairFn(fam, i, j, "wp"), zero_alpha(n)) for i, j in _pairs(n)])
        parts.append((wp, HbarPoly({0: -2 * g * g, 1: 2 * g})))
        return Sum(parts)
    if r == 3:
        cubic = _leaf(params, [_t(Const(1.0), _alpha(n, i, j, k)) for i, j, k in _triples(n)])
        wpp = _leaf(params, _wp_p_terms(params, 1.0))
        return Sum([(cubic, 1.0), (wpp, HbarPoly({0: g * g, 1: -g}))])
    raise ValueError("scalar_quantum_hamiltonian supports r = 2, 3")


def spinsep_split(r, params: ModelParams) -> tuple[CrossedElement, CrossedElement]:
    """(H_r, A_r) with spin_hamiltonian(r) = H_r + hbar A_r, by exact hbar division."""
    H = scalar_quantum_hamiltonian(r, params)
    return H, divide_by_hbar(spin_hamiltonian(r, params) - H)


def spinsep_display(r, params: ModelParams) -> CrossedElement:
    n, fam, g = params.n, params.family, params.g
    if r == 2:
        terms = []
        for i, j in _pairs(n):
            terms += [_t(PairFn(fam, i, j, "dr"), zero_alpha(n), factor=-2 * g),
                      _t(PairFn(fam, i, j, "wp"), zero_alpha(n), factor=-2 * g)]
        return _leaf(params, terms)
    if r == 3:
        return _leaf(params, _dr_p_terms(params, g) + _bracket_terms(params, g * g)
                     + _wp_p_terms(params, g))
    raise ValueError("spinsep_display supports r = 2, 3")


# -- dynamical (vee) Hamiltonians -----------------------------------------------------

def principal_vee(r, params: ModelParams) -> CrossedElement:
    """Res_vee(h_r(lambda, y)) through the product pipeline."""
    return res_vee(substitute(r, params))


def principal_vee_display(r, params: ModelParams) -> CrossedElement:
    """Explicit dynamical Hamiltonians (r = 2 is the quadratic one, "e2" the elementary h_2, 3 the cubic)."""
    n, fam, g = params.n, params.family, params.g
    P = lambda i, j, q, k=None, l=None: PairFn(fam, i, j, q, ("lam", i if k is None else k, j if l is None else l))
    idn = identity_perm(n)
    if r == 2:
        terms = [_t(Const(1.0), _alpha(n, i, i)) for i in range(n)]
        for i, j in _pairs(n):
            terms += [_t(PairFn(fam, i, j, "wp"), zero_alpha(n), factor=-2 * g * g),
                      _t(P(i, j, "dR"), zero_alpha(n), idn, transposition(n, i, j), k=1, factor=-2 * g)]
        return _leaf(params, terms)
    if r == "e2":
        terms = []
        for i, j in _pairs(n):
            terms += [_t(Const(1.0), _alpha(n, i, j)),
                      _t(PairFn(fam, i, j, "wp"), zero_alpha(n), factor=g * g),
                      _t(P(i, j, "dR"), zero_alpha(n), idn, transposition(n, i, j), k=1, factor=g)]
        return _leaf(params, terms)
    if r == 3:
        terms = [_t(Const(1.0), _alpha(n, i, j, k)) for i, j, k in _triples(n)]
        terms += _wp_p_terms(params, g * g)
        z = zero_alpha(n)
        g2 = g * g
        for i, j, k in _triples(n):
            for (a, b), c in (((i, j), k), ((j, k), i), ((k, i), j)):
                terms.append(_t(P(a, b, "dR"), _alpha(n, c), idn, transposition(n, a, b), k=1, factor=g))
            c1, c2 = vee_cycle(n, i, j, k), vee_cycle(n, k, j, i)
            terms += [
                _t(prod(P(i, j, "dR"), P(i, k, "R", j, k)), z, idn, c1, k=1, factor=g2),
                _t(prod(P(j, k, "R"), P(i, j, "dR", i, k)), z, idn, c1, k=1, factor=-g2),
                _t(prod(P(i, j, "dR"), P(j, k, "R", i, k)), z, idn, c2, k=1, factor=g2),
                _t(prod(P(i, k, "R"), P(i, j, "dR", k, j)), z, idn, c2, k=1, factor=-g2),
            ]
        return _leaf(params, terms)
    raise ValueError("principal_vee_display supports r = 2, 'e2', 3")


def _f_xpp(params: ModelParams, quantum: bool = True) -> CrossedElement:
    """f(lambda, y) for f = sum_{i,j,k distinct} x_i (p_j p_k + g^2 / (x_j - x_k)^2)."""
    n, g = params.n, params.g
    parts = []
    sp = params.space
    for i, j, k in itertools.permutations(range(n), 3):
        lead = element(sp, [Term(_lam(i), zero_alpha(n), *_ids(n))], classical=not quantum)
        parts.append((_product([lead, dunkl(j, params, quantum), dunkl(k, params, quantum)]), 1.0))
        inv2 = LambdaFn(lambda lam, i=i, j=j, k=k: lam[i] / (lam[j] - lam[k]) ** 2, f"lam{i}/(lam{j}-lam{k})^2")
        parts.append((element(sp, [Term(inv2, zero_alpha(n), *_ids(n))], classical=not quantum), g * g))
    return Sum(parts)


def _f_xp(params: ModelParams, quantum: bool = True) -> CrossedElement:
    n = params.n
    parts = []
    for i in range(n):
        lead = element(params.space, [Term(_lam(i), zero_alpha(n), *_ids(n))], classical=not quantum)
        parts.append((multiply(lead, dunkl(i, params, quantum)), 1.0))
    return Sum(parts)


def additional_Lf_pipeline(which: str, params: ModelParams) -> CrossedElement:
    f = {"xp": _f_xp, "xpp": _f_xpp}[which](params)
    return res_vee(f)


def xpp_scalar_remainder(params: ModelParams) -> LambdaFn:
    """g^2 sum_{i,j,k distinct} lam_i (1/(lam_j - lam_k)^2 - wp(lam_j - lam_k)).

    A W-symmetric function of lambda alone, hence central; it vanishes at lambda = 0.
    """
    n, g, fam = params.n, params.g, params.family

    def fn(lam):
        out = 0j
        for i, j, k in itertools.permutations(range(n), 3):
            u = lam[j] - lam[k]
            out += lam[i] * (1 / u ** 2 - fam.wp(u))
        return g * g * out
    return LambdaFn(fn, "xpp_remainder")


def additional_Lf(which: str, params: ModelParams, vee: bool = True,
                  with_remainder: bool = False) -> CrossedElement:
    """The explicit additional Hamiltonians for f = sum x_i p_i ("xp") and the cubic "xpp"."""
    if not vee:
        return additional_Lf_pipeline(which, params)
    n, fam, g = params.n, params.family, params.g
    idn = identity_perm(n)
    z = zero_alpha(n)
    R = lambda i, j, k=None, l=None: PairFn(fam, i, j, "R", ("lam", i if k is None else k, j if l is None else l))
    if which == "xp":
        terms = [_t(_lam(i), _alpha(n, i)) for i in range(n)]
        for i, j in _pairs(n):
            terms.append(_t(prod(_lam_diff(i, j), R(i, j)), z, idn, transposition(n, i, j), factor=-g))
        return _leaf(params, terms)
    if which != "xpp":
        raise ValueError(f"unknown additional Hamiltonian {which!r}")
    terms = []
    for i, j, k in itertools.permutations(range(n), 3):
        terms += [_t(_lam(i), _alpha(n, j, k)),
                  _t(prod(_lam(i), PairFn(fam, j, k, "wp")), z, factor=g * g),
                  _t(prod(_lam_diff(i, j), R(i, j)), _alpha(n, k), idn, transposition(n, i, j), factor=g),
                  _t(prod(_lam(i), PairFn(fam, k, j, "dR", ("lam", k, j))), z, idn,
                     transposition(n, k, j), k=1, factor=g)]
    g2 = g * g
    for i, j, k in _triples(n):
        c1, c2 = vee_cycle(n, i, j, k), vee_cycle(n, k, j, i)
        terms += [
            _t(prod(_lam_diff(k, i), R(i, k), R(j, k, j, i)), z, idn, c1, factor=2 * g2),
            _t(prod(_lam_diff(k, j), R(i, j), R(i, k, j, k)), z, idn, c1, factor=2 * g2),
            _t(prod(_lam_diff(i, k), R(i, j), R(j, k, i, k)), z, idn, c2, factor=2 * g2),
            _t(prod(_lam_diff(k, j), R(j, k), R(i, k, i, j)), z, idn, c2, factor=2 * g2),
        ]
    if with_remainder:
        terms.append(_t(xpp_scalar_remainder(params), z))
    return _leaf(params, terms)


# -- sampling-based checks -------------------------------------------------------------

def lambda_sampler(params: ModelParams, guard: float = ell.DEFAULT_CONFIG.pole_guard):
    return default_sampler(params.family, params.n, guard)


def pointwise_agreement(a: CrossedElement, b: CrossedElement, params: ModelParams,
                        samples: int = 10, seed: int = 0, tol: float | None = None,
                        identity: str = "agreement", sampler=None) -> dict:
    sampler = sampler or lambda_sampler(params)
    worst = 0.0
    for k in range(samples):
        x, lam = sampler(np.random.default_rng([seed, k]))
        worst = max(worst, compare_nf(_values(a.nf(x, lam)), _values(b.nf(x, lam)), params.space.dim))
    return make_report(params.family.label, identity, samples, worst, seed, tol)


def dunkl_commutativity(params: ModelParams, samples: int = 20, seed: int = 0,
                        tol: float | None = None, quantum: bool = True) -> dict:
    worst = 0.0
    sampler = lambda_sampler(params)
    for i, j in _pairs(params.n):
        rep = is_zero(commutator(dunkl(i, params, quantum), dunkl(j, params, quantum)),
                      samples, seed, sampler=sampler)
        worst = max(worst, rep["max_residual"])
    return make_report(params.family.label, f"dunkl_commutativity_n{params.n}", samples, worst, seed, tol)


def dunkl_equivariance(params: ModelParams, samples: int = 10, seed: int = 0,
                       tol: float | None = None) -> dict:
    """hat(w) y_i(lambda) hat(w)^-1 = y_{w(i)}(w.lambda) for all transpositions w."""
    n = params.n
    worst = 0.0
    sampler = lambda_sampler(params)
    for a, b in _pairs(n):
        w = transposition(n, a, b)
        for i in range(n):
            lhs = hat_act(w, dunkl(i, params))
            # (w.lam)_j = lam_{w^-1(j)}
            rhs = at_lambda(dunkl(w[i], params), lambda lam, w=w: tuple(lam[inverse(w)[j]] for j in range(n)))
            for k in range(samples):
                x, lam = sampler(np.random.default_rng([seed, k]))
                worst = max(worst, compare_nf(_values(lhs.nf(x, lam)), _values(rhs.nf(x, lam)), params.space.dim))
    return make_report(params.family.label, "dunkl_equivariance", samples, worst, seed, tol)


def classical_reduction(r, params: ModelParams, samples: int = 5, seed: int = 0,
                        tol: float | None = None) -> dict:
    """h_r(lambda, y^c): group-nontrivial parts vanish and the identity part is h_r(x, p) Id."""
    a = substitute(r, params, quantum=False)
    h = ecm_classical(r, params)
    sampler = lambda_sampler(params)
    worst = 0.0
    dim = params.space.dim
    for k in range(samples):
        rng = np.random.default_rng([seed, k])
        x, lam = sampler(rng)
        p = tuple(rng.normal(size=params.n))
        nf = a.nf(x, lam, 0)
        scale = max(1.0, max_coeff(nf))
        ident = np.zeros((dim, dim), dtype=complex)
        idn = identity_perm(params.n)
        for (wh, wv, al, kk), j in nf.items():
            v = np.asarray(j.value)
            if wh != idn or wv != idn:
                worst = max(worst, float(np.max(np.abs(v))) / scale)
                continue
            mono = np.prod([p[s] ** e for s, e in enumerate(al)])
            ident = ident + (v * mono if v.ndim == 2 else v * mono * np.eye(dim))
        ref = h(x, p) * np.eye(dim)
        worst = max(worst, float(np.max(np.abs(ident - ref))) / max(1.0, abs(h(x, p))))
    return make_report(params.family.label, f"classical_reduction_h{r}", samples, worst, seed, tol)


# -- translation and braid suites ------------------------------------------------------

def _one_leg_const(params: ModelParams, m: np.ndarray, i: int, quantum=False) -> CrossedElement:
    emb = embed_one_leg(m, i, params.space)
    return element(params.space, [Term(Const(emb), zero_alpha(params.n), *_ids(params.n))],
                   classical=not quantum)


def _exp_x(params: ModelParams, i: int, c: complex) -> CrossedElement:
    coeffs = [0j] * params.n
    coeffs[i] = c
    return element(params.space, [Term(LinearExp(tuple(coeffs)), zero_alpha(params.n), *_ids(params.n))],
                   classical=True)


def _shift(a: CrossedElement, i: int, amount: complex) -> CrossedElement:
    return at_lambda(a, lambda lam: tuple(v + (amount if s == i else 0) for s, v in enumerate(lam)))


def translation_suite(params: ModelParams, samples: int = 20, seed: int = 0,
                      tol: float | None = 1e-9, site: int = 0) -> list[dict]:
    """Lambda-shift covariance of y^c and h_2(lambda, y^c) in the elliptic flavor."""
    if params.family.is_trig:
        raise ValueError("translation_suite needs an elliptic family")
    d = params.family.d
    tau = params.family.tau.tau
    q, lm = q_lambda_matrices(d)
    qi, li = np.linalg.inv(q), np.linalg.inv(lm)
    i = site
    Qi, Qinv = _one_leg_const(params, q, i), _one_leg_const(params, qi, i)
    Li, Linv = _one_leg_const(params, lm, i), _one_leg_const(params, li, i)
    em, ep = _exp_x(params, i, -2j * math.pi / d), _exp_x(params, i, 2j * math.pi / d)
    em1, ep1 = _exp_x(params, i, -2j * math.pi), _exp_x(params, i, 2j * math.pi)
    sampler = lambda_sampler(params)
    label = params.family.label

    def check(lhs, rhs, name):
        worst = 0.0
        for k in range(samples):
            x, lam = sampler(np.random.default_rng([seed, k]))
            worst = max(worst, compare_nf(_values(lhs.nf(x, lam)), _values(rhs.nf(x, lam)), params.space.dim))
        return make_report(label, name, samples, worst, seed, tol)

    y = Sum([(dunkl(j, params, quantum=False), 1.0 + 0.37 * j) for j in range(params.n)])
    h2 = substitute(2, params, quantum=False)
    reports = [
        check(_shift(y, i, 1.0), _product([Qinv, y, Qi]), "translation_y_shift_1"),
        check(_shift(y, i, tau), _product([em, Linv, y, Li, ep]), "translation_y_shift_tau"),
        check(_shift(h2, i, 1.0), _product([Qinv, h2, Qi]), "translation_h2_shift_1"),
        check(_shift(h2, i, tau), _product([em, Linv, h2, Li, ep]), "translation_h2_shift_tau"),
        check(_shift(h2, i, float(d)), h2, "translation_h2_shift_d"),
        check(_shift(h2, i, d * tau), _product([em1, h2, ep1]), "translation_h2_shift_d_tau"),
        check(_shift(y, i, float(d)), y, "translation_y_shift_d"),
    ]
    return reports


def braid_operator(params: ModelParams, i: int, j: int) -> CrossedElement:
    """S_ij = phi(x_ij, lam_ij)^-1 R_ij(x_ij, lam_ij) s_ij with s_ij acting on x and spins."""
    fam, n = params.family, params.n
    coeff = Product((Reciprocal(PairFn(fam, i, j, "phi", ("lam", i, j))),
                     PairFn(fam, i, j, "R", ("lam", i, j))))
    return element(params.space, [Term(coeff, zero_alpha(n), transposition(n, i, j), identity_perm(n))])


def trig_braid_suite(params: ModelParams, samples: int = 20, seed: int = 0,
                     tol: float | None = 1e-9) -> list[dict]:
    if not params.family.is_trig:
        raise ValueError("trig_braid_suite needs a trigonometric family")
    n = params.n
    sampler = lambda_sampler(params)
    S = lambda a, b: braid_operator(params, a, b)
    one = scalar(params.space, 1.0)
    label = params.family.label
    out = [make_report(label, "braid_involution", samples,
                       max(is_zero(S(a, b) * S(a, b) - one, samples, seed, sampler=sampler)["max_residual"]
                           for a, b in _pairs(n)), seed, tol)]
    worst = 0.0
    for a, b, c in _triples(n):
        for (p, q), (r, s) in (((a, b), (b, c)), ((a, c), (b, c)), ((a, b), (a, c))):
            lhs = _product([S(p, q), S(r, s), S(p, q)])
            rhs = _product([S(r, s), S(p, q), S(r, s)])
            worst = max(worst, is_zero(lhs - rhs, samples, seed, sampler=sampler)["max_residual"])
    out.append(make_report(label, "braid_relation", samples, worst, seed, tol))
    if n >= 4:
        worst = 0.0
        for a, b in _pairs(n):
            for c, e in _pairs(n):
                if {a, b} & {c, e}:
                    continue
                worst = max(worst, is_zero(commutator(S(a, b), S(c, e)), samples, seed,
                                           sampler=sampler)["max_residual"])
        out.append(make_report(label, "braid_disjoint_commute", samples, worst, seed, tol))
    return out
