"""Crossed products of matrix differential operators with symmetric groups.

An element is a finite sum

    sum  c(x, lambda) hbar^k  p^alpha  w_hat  v_vee

in normal order (coefficient, then momenta, then group).  ``w_hat`` acts on
positions and spins, ``v_vee`` acts on the spectral variables only.  Elements
are immutable expression trees; ``nf(x0, lam0, order)`` evaluates the normal
form around a point, returning for every key ``(w_hat, v_vee, alpha, k)`` the
jet in x of the coefficient.  Products are exact: the hat action on the right
factor is a relabelling of jet variables plus conjugation of the spin matrix,
and reordering momenta uses the Leibniz rule with jet derivatives.
"""

from __future__ import annotations

import functools
import itertools
import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import elliptic_kernel as ell
from .jet_calculus import Jet, lift
from .rmatrix_families import RFamily
from .tensor_space import (SpinSpace, act_on_vector, basis_permutation, compose,
                     identity_perm, inverse)

MAX_P_DEGREE = 5
JET_ORDER_CAP = 6


class AlgebraError(ValueError):
    pass


class DegreeError(AlgebraError):
    """Total momentum degree exceeds the configured cap."""


class HbarDivisionError(AlgebraError):
    """Division by hbar of an element with a non-vanishing hbar^0 part."""


# -- hbar polynomials ----------------------------------------------------------

class HbarPoly:
    """Polynomial in the formal parameter hbar with complex coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, complex] | None = None):
        self.coeffs = {k: complex(v) for k, v in (coeffs or {}).items() if v != 0}

    @classmethod
    def const(cls, c) -> "HbarPoly":
        return cls({0: c})

    @classmethod
    def hbar(cls) -> "HbarPoly":
        return cls({1: 1.0})

    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __add__(self, other):
        other = other if isinstance(other, HbarPoly) else HbarPoly.const(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return HbarPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return HbarPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = other if isinstance(other, HbarPoly) else HbarPoly.const(other)
        out: dict[int, complex] = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return HbarPoly(out)

    __rmul__ = __mul__

    def divide_by_hbar(self, tol: float = 1e-12) -> "HbarPoly":
        scale = max((abs(v) for v in self.coeffs.values()), default=0.0)
        if abs(self.coeffs.get(0, 0)) > tol * max(scale, 1.0):
            raise HbarDivisionError("hbar^0 coefficient does not vanish")
        return HbarPoly({k - 1: v for k, v in self.coeffs.items() if k > 0})

    def at(self, hbar: complex) -> complex:
        return sum(v * hbar ** k for k, v in self.coeffs.items())

    def __eq__(self, other):
        other = other if isinstance(other, HbarPoly) else HbarPoly.const(other)
        return self.coeffs == other.coeffs

    def __repr__(self):
        return f"HbarPoly({self.coeffs})"


# -- coefficient functions ---------------------------------------------------------

class CoeffFn:
    """Matrix- or scalar-valued analytic function of (x, lambda) with jets in x."""

    scalar = False

    def jet(self, space: SpinSpace, x0: tuple, lam0: tuple, order: int) -> Jet:
        raise NotImplementedError

    def value(self, space: SpinSpace, x0, lam0):
        return self.jet(space, tuple(x0), tuple(lam0), 0).value


@dataclass(frozen=True)
class Const(CoeffFn):
    """Constant scalar or constant matrix on U."""
    val: object

    @property
    def scalar(self):  # type: ignore[override]
        return np.ndim(self.val) == 0

    def jet(self, space, x0, lam0, order):
        return Jet.constant(self.val, len(x0), order)


@dataclass(frozen=True)
class Coordinate(CoeffFn):
    i: int
    scalar = True

    def jet(self, space, x0, lam0, order):
        return Jet.variable(self.i, x0[self.i], len(x0), order)


@dataclass(frozen=True)
class LambdaFn(CoeffFn):
    """Scalar function of lambda only (constant in x)."""
    fn: Callable
    label: str = ""
    scalar = True

    def jet(self, space, x0, lam0, order):
        return Jet.constant(complex(self.fn(lam0)), len(x0), order)


@dataclass(frozen=True)
class LinearExp(CoeffFn):
    """exp(sum_i c_i x_i)."""
    c: tuple
    scalar = True

    def jet(self, space, x0, lam0, order):
        n = len(x0)
        arg = Jet.constant(0.0, n, order)
        for i, ci in enumerate(self.c):
            if ci:
                arg = arg + Jet.variable(i, x0[i], n, order) * ci
        return lift("exp", [arg])


PAIR_QUANTITIES = ("R", "dR", "r", "dr", "m", "dm", "wp", "dwp", "res", "phi")
SCALAR_QUANTITIES = ("wp", "dwp", "phi")


def _embed_stack(stack: np.ndarray, legs: tuple[int, int], space: SpinSpace) -> np.ndarray:
    """Embed a stack of two-leg operators (K, d^2, d^2) into U."""
    d, n = space.d, space.n
    if d == 1:
        return stack.reshape(stack.shape[0], 1, 1)
    i, j = legs
    others = [s for s in range(n) if s not in legs]
    r = len(others)
    K = stack.shape[0]
    eye = np.eye(d ** r).reshape((d,) * (2 * r))
    big = np.tensordot(stack.reshape((K,) + (d,) * 4), eye, axes=0)
    # axes: K, out_i, out_j, in_i, in_j, others out, others in
    axes = [0] * (2 * n + 1)
    axes[0] = 0
    axes[1 + i], axes[1 + j] = 1, 2
    axes[1 + n + i], axes[1 + n + j] = 3, 4
    for q, s in enumerate(others):
        axes[1 + s] = 5 + q
        axes[1 + n + s] = 5 + r + q
    return np.transpose(big, axes).reshape(K, d ** n, d ** n)


@functools.lru_cache(maxsize=None)
def scalar_kernel(fam: RFamily) -> RFamily:
    """The d = 1 family sharing the flavor and modular parameter of ``fam``."""
    from .rmatrix_families import make_family
    if fam.is_trig:
        return make_family("trig", 1)
    return make_family("scalar", 1, fam.tau.tau)


@dataclass(frozen=True)
class PairFn(CoeffFn):
    """A function of z = x_i - x_j from the R-matrix family, on legs (i, j).

    ``mu`` is ("lam", k, l) for lambda_k - lambda_l, or a complex constant.
    Quantities: R, dR (z-derivative of R), r, dr, m, dm (classical data),
    res (the constant mu-residue) and the scalars wp, dwp and phi (the d = 1
    kernel of the same flavor: Kronecker phi, or (cot(z/2) + cot(mu/2))/2).
    """
    family: RFamily
    i: int
    j: int
    quantity: str
    mu: object = None

    def __post_init__(self):
        if self.quantity not in PAIR_QUANTITIES:
            raise AlgebraError(f"unknown pair quantity {self.quantity!r}")

    @property
    def scalar(self):  # type: ignore[override]
        return self.quantity in SCALAR_QUANTITIES or self.family.d == 1

    def mu_value(self, lam0) -> complex:
        if isinstance(self.mu, tuple) and self.mu and self.mu[0] == "lam":
            return complex(lam0[self.mu[1]] - lam0[self.mu[2]])
        return complex(self.mu if self.mu is not None else 0.0)

    def taylor(self, z0: complex, lam0, order: int) -> np.ndarray:
        fam, q = self.family, self.quantity
        if q == "R":
            return fam.z_taylor(z0, self.mu_value(lam0), order)
        if q == "dR":
            t = fam.z_taylor(z0, self.mu_value(lam0), order + 1)
            return t[1:] * np.arange(1, order + 2)[:, None, None]
        cd = fam.classical_data()
        if q == "r":
            return cd.r_taylor(z0, order)
        if q == "dr":
            return cd.r_taylor(z0, order + 1)[1:] * np.arange(1, order + 2)[:, None, None]
        if q == "m":
            return cd.m_taylor(z0, order)
        if q == "dm":
            return cd.m_taylor(z0, order + 1)[1:] * np.arange(1, order + 2)[:, None, None]
        if q == "wp":
            return fam.wp_taylor(z0, order)
        if q == "dwp":
            return fam.wp_taylor(z0, order + 1)[1:] * np.arange(1, order + 2)
        if q == "phi":
            return scalar_kernel(fam).z_taylor(z0, self.mu_value(lam0), order)[:, 0, 0]
        out = np.zeros((order + 1, fam.dim, fam.dim), dtype=complex)
        out[0] = fam.residue()
        return out

    def jet(self, space, x0, lam0, order):
        n = len(x0)
        z0 = complex(x0[self.i] - x0[self.j])
        t = self.taylor(z0, lam0, order)
        if self.quantity in SCALAR_QUANTITIES:
            return Jet.from_pair_taylor(t, n, order, self.i, self.j)
        if self.family.d == 1:
            return Jet.from_pair_taylor(t[:, 0, 0], n, order, self.i, self.j)
        emb = _embed_stack(t, (self.i, self.j), space)
        return Jet.from_pair_taylor(emb, n, order, self.i, self.j)


@dataclass(frozen=True)
class Product(CoeffFn):
    """Ordered product of coefficient functions."""
    factors: tuple

    @property
    def scalar(self):  # type: ignore[override]
        return all(f.scalar for f in self.factors)

    def jet(self, space, x0, lam0, order):
        out = None
        for f in self.factors:
            j = f.jet(space, x0, lam0, order)
            if out is None:
                out = j
            elif out.is_matrix() and j.is_matrix():
                out = out @ j
            else:
                out = out * j
        return out


@dataclass(frozen=True)
class Reciprocal(CoeffFn):
    f: CoeffFn
    scalar = True

    def jet(self, space, x0, lam0, order):
        return self.f.jet(space, x0, lam0, order).reciprocal()


@dataclass(frozen=True)
class LinearCombo(CoeffFn):
    """sum_k c_k f_k."""
    terms: tuple  # of (complex, CoeffFn)

    @property
    def scalar(self):  # type: ignore[override]
        return all(f.scalar for _, f in self.terms)

    def jet(self, space, x0, lam0, order):
        out = None
        for c, f in self.terms:
            j = f.jet(space, x0, lam0, order) * c
            out = j if out is None else out + j
        return out


def prod(*factors: CoeffFn) -> CoeffFn:
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


# -- elements ------------------------------------------------------------------------

Key = tuple  # (w_hat, w_vee, alpha, k)
NormalForm = dict


def _add_into(out: NormalForm, key: Key, jet: Jet):
    cur = out.get(key)
    out[key] = jet if cur is None else cur + jet


class CrossedElement:
    """Immutable element of (D_U(V) with lambda-dependent coefficients) * (W_hat x W_vee)."""

    def __init__(self, space: SpinSpace, degree: int, classical: bool):
        self.space = space
        self.n = space.n
        self.degree = degree
        self.classical = classical
        self._cache: dict = {}
        self._lock = threading.Lock()

    # subclasses implement _compute(x0, lam0, order) -> NormalForm
    def _compute(self, x0: tuple, lam0: tuple, order: int) -> NormalForm:
        raise NotImplementedError

    def nf(self, x0, lam0, order: int = 0) -> NormalForm:
        if order > JET_ORDER_CAP:
            raise AlgebraError(f"jet order {order} exceeds the cap {JET_ORDER_CAP}")
        x0 = tuple(complex(v) for v in x0)
        lam0 = tuple(complex(v) for v in lam0)
        key = (x0, lam0)
        hit = self._cache.get(key)
        if hit is not None and hit[0] >= order:
            if hit[0] == order:
                return hit[1]
            return {k: j.truncate(order) for k, j in hit[1].items()}
        res = self._compute(x0, lam0, order)
        with self._lock:
            self._cache[key] = (order, res)
        return res

    def evaluate(self, x, lam) -> dict:
        """Order-0 coefficient values as numpy arrays."""
        return {k: np.asarray(j.value) for k, j in self.nf(x, lam, 0).items()}

    # -- arithmetic sugar --------------------------------------------------------
    def __add__(self, other):
        return Sum([(self, 1.0), (other, 1.0)])

    def __sub__(self, other):
        return Sum([(self, 1.0), (other, -1.0)])

    def __neg__(self):
        return Sum([(self, -1.0)])

    def __mul__(self, other):
        if isinstance(other, CrossedElement):
            return multiply(self, other)
        return Sum([(self, other)])

    def __rmul__(self, other):
        return Sum([(self, other)])

    def __matmul__(self, other):
        return multiply(self, other)


@dataclass(frozen=True)
class Term:
    coeff: CoeffFn
    alpha: tuple
    w_hat: tuple
    w_vee: tuple
    k: int = 0
    factor: complex = 1.0


class Leaf(CrossedElement):
    def __init__(self, space: SpinSpace, terms: Sequence[Term], classical: bool = False):
        deg = max((sum(t.alpha) for t in terms), default=0)
        super().__init__(space, deg, classical)
        self.terms = tuple(terms)

    def _compute(self, x0, lam0, order):
        out: NormalForm = {}
        for t in self.terms:
            j = t.coeff.jet(self.space, x0, lam0, order)
            if t.factor != 1:
                j = j * t.factor
            _add_into(out, (t.w_hat, t.w_vee, t.alpha, t.k), j)
        return out


def _check_flags(elems: Iterable[CrossedElement]) -> bool:
    flags = {e.classical for e in elems}
    if len(flags) > 1:
        raise AlgebraError("cannot combine classical and quantum elements")
    return flags.pop() if flags else False


class Sum(CrossedElement):
    """Linear combination with complex or HbarPoly weights."""

    def __init__(self, parts: Sequence[tuple[CrossedElement, object]]):
        parts = [(e, w) for e, w in parts]
        if not parts:
            raise AlgebraError("empty sum")
        sp = parts[0][0].space
        super().__init__(sp, max(e.degree for e, _ in parts), _check_flags(e for e, _ in parts))
        self.parts = tuple(parts)

    def _compute(self, x0, lam0, order):
        out: NormalForm = {}
        for e, w in self.parts:
            sub = e.nf(x0, lam0, order)
            hp = w if isinstance(w, HbarPoly) else HbarPoly.const(w)
            for (wh, wv, al, k), j in sub.items():
                for dk, c in hp.coeffs.items():
                    if self.classical and k + dk > 0:
                        continue
                    _add_into(out, (wh, wv, al, k + dk), j * c)
        return out


def _multi_binom(alpha, gamma) -> int:
    out = 1
    for a, g in zip(alpha, gamma):
        out *= math.comb(a, g)
    return out


def _sub_indices(alpha):
    return itertools.product(*(range(a + 1) for a in alpha))


class Prod(CrossedElement):
    def __init__(self, a: CrossedElement, b: CrossedElement):
        classical = _check_flags((a, b))
        deg = a.degree + b.degree
        if deg > MAX_P_DEGREE:
            raise DegreeError(f"momentum degree {deg} exceeds the cap {MAX_P_DEGREE}")
        super().__init__(a.space, deg, classical)
        self.a, self.b = a, b

    def _compute(self, x0, lam0, order):
        A = self.a.nf(x0, lam0, order)
        extra = 0 if self.classical else self.a.degree
        groups = {(wh, wv) for (wh, wv, _, _) in A}
        d = self.space.d
        B_at: dict = {}
        for wh, wv in groups:
            xs = tuple(x0[wh[j]] for j in range(self.n))   # w^{-1}.x
            ls = tuple(lam0[wv[j]] for j in range(self.n))  # v^{-1}.lambda
            B = self.b.nf(xs, ls, order + extra)
            perm = basis_permutation(wh, d) if d > 1 else None
            moved = {}
            for (bh, bv, beta, kb), j in B.items():
                jj = j.permute_vars(wh)
                if perm is not None:
                    jj = jj.conjugate_by_index(perm)
                moved[(bh, bv, beta, kb)] = jj
            B_at[(wh, wv)] = moved
        out: NormalForm = {}
        for (wh, wv, alpha, ka), ja in A.items():
            for (bh, bv, beta, kb), jb in B_at[(wh, wv)].items():
                wbeta = tuple(act_on_vector(wh, np.array(beta)).tolist())
                gh, gv = compose(wh, bh), compose(wv, bv)
                gammas = [tuple(0 for _ in alpha)] if self.classical else _sub_indices(alpha)
                for gamma in gammas:
                    g = sum(gamma)
                    db = jb.derivative(gamma).truncate(order) if g else jb.truncate(order)
                    c = _multi_binom(alpha, gamma)
                    prod_j = (ja @ db) if (ja.is_matrix() and db.is_matrix()) else ja * db
                    new_alpha = tuple(a - gm + wb for a, gm, wb in zip(alpha, gamma, wbeta))
                    _add_into(out, (gh, gv, new_alpha, ka + kb + g), prod_j * c if c != 1 else prod_j)
        return out


class Transform(CrossedElement):
    """Key/coefficient rewriting of a single operand."""

    def __init__(self, a: CrossedElement, fn, classical: bool | None = None, degree=None):
        super().__init__(a.space, a.degree if degree is None else degree,
                         a.classical if classical is None else classical)
        self.a = a
        self.fn = fn

    def _compute(self, x0, lam0, order):
        return self.fn(self, x0, lam0, order)


def multiply(a: CrossedElement, b: CrossedElement) -> CrossedElement:
    if a.space != b.space:
        raise AlgebraError("elements live on different spin spaces")
    return Prod(a, b)


def commutator(a: CrossedElement, b: CrossedElement) -> CrossedElement:
    return Sum([(Prod(a, b), 1.0), (Prod(b, a), -1.0)])


def hat_act(w: tuple, a: CrossedElement) -> CrossedElement:
    """w_hat a w_hat^{-1}."""
    w = tuple(w)
    wi = inverse(w)

    def fn(self, x0, lam0, order):
        xs = tuple(x0[w[j]] for j in range(self.n))
        sub = a.nf(xs, lam0, order)
        perm = basis_permutation(w, self.space.d) if self.space.d > 1 else None
        out = {}
        for (wh, wv, al, k), j in sub.items():
            jj = j.permute_vars(w)
            if perm is not None:
                jj = jj.conjugate_by_index(perm)
            new_al = tuple(act_on_vector(w, np.array(al)).tolist())
            _add_into(out, (compose(compose(w, wh), wi), wv, new_al, k), jj)
        return out
    return Transform(a, fn)


def vee_act(v: tuple, a: CrossedElement) -> CrossedElement:
    """v_vee a v_vee^{-1}: acts on lambda arguments and vee slots only."""
    v = tuple(v)
    vi = inverse(v)

    def fn(self, x0, lam0, order):
        ls = tuple(lam0[v[j]] for j in range(self.n))
        sub = a.nf(x0, ls, order)
        out = {}
        for (wh, wv, al, k), j in sub.items():
            _add_into(out, (wh, compose(compose(v, wv), vi), al, k), j)
        return out
    return Transform(a, fn)


def res_hat(a: CrossedElement) -> CrossedElement:
    def fn(self, x0, lam0, order):
        out = {}
        for (wh, wv, al, k), j in a.nf(x0, lam0, order).items():
            _add_into(out, (identity_perm(self.n), wv, al, k), j)
        return out
    return Transform(a, fn)


def res_vee(a: CrossedElement) -> CrossedElement:
    """a_{w1 w2} w1_hat w2_vee -> a_{w1 w2} (w2 w1^{-1})_vee."""
    def fn(self, x0, lam0, order):
        out = {}
        idn = identity_perm(self.n)
        for (wh, wv, al, k), j in a.nf(x0, lam0, order).items():
            _add_into(out, (idn, compose(wv, inverse(wh)), al, k), j)
        return out
    return Transform(a, fn)


def classical_limit(a: CrossedElement) -> CrossedElement:
    def fn(self, x0, lam0, order):
        return {key: j for key, j in a.nf(x0, lam0, order).items() if key[3] == 0}
    return Transform(a, fn, classical=True)


def hbar_component(a: CrossedElement, k: int) -> CrossedElement:
    """The hbar^k part as an hbar-free element."""
    def fn(self, x0, lam0, order):
        return {(wh, wv, al, 0): j for (wh, wv, al, kk), j in a.nf(x0, lam0, order).items()
                if kk == k}
    return Transform(a, fn)


def divide_by_hbar(a: CrossedElement, tol: float = 1e-9) -> CrossedElement:
    """Exact division by hbar; the hbar^0 part must vanish (checked on evaluation)."""
    def fn(self, x0, lam0, order):
        sub = a.nf(x0, lam0, order)
        scale = max((j.max_abs() for j in sub.values()), default=0.0)
        out = {}
        for (wh, wv, al, k), j in sub.items():
            if k == 0:
                if j.max_abs() > tol * max(scale, 1.0):
                    raise HbarDivisionError(
                        f"hbar^0 coefficient of size {j.max_abs():.3e} at {(wh, wv, al)}")
                continue
            _add_into(out, (wh, wv, al, k - 1), j)
        return out
    return Transform(a, fn)


def at_lambda(a: CrossedElement, fn: Callable[[tuple], tuple]) -> CrossedElement:
    """The element whose normal form at lambda is that of ``a`` at ``fn(lambda)``."""
    def f(self, x0, lam0, order):
        return a.nf(x0, tuple(fn(lam0)), order)
    return Transform(a, f)


# -- constructors -------------------------------------------------------------------

def _ids(n):
    return identity_perm(n), identity_perm(n)


def zero_alpha(n: int) -> tuple:
    return (0,) * n


def unit_alpha(n: int, i: int, power: int = 1) -> tuple:
    a = [0] * n
    a[i] = power
    return tuple(a)


def element(space: SpinSpace, terms: Sequence[Term], classical: bool = False) -> Leaf:
    return Leaf(space, terms, classical)


def scalar(space: SpinSpace, c=1.0, classical: bool = False) -> Leaf:
    wh, wv = _ids(space.n)
    return Leaf(space, [Term(Const(c), zero_alpha(space.n), wh, wv)], classical)


def coeff(space: SpinSpace, fn: CoeffFn, classical: bool = False, k: int = 0) -> Leaf:
    wh, wv = _ids(space.n)
    return Leaf(space, [Term(fn, zero_alpha(space.n), wh, wv, k)], classical)


def p_hat(space: SpinSpace, i: int, classical: bool = False) -> Leaf:
    wh, wv = _ids(space.n)
    return Leaf(space, [Term(Const(1.0), unit_alpha(space.n, i), wh, wv)], classical)


def group(space: SpinSpace, w_hat=None, w_vee=None, classical: bool = False) -> Leaf:
    n = space.n
    wh = tuple(w_hat) if w_hat is not None else identity_perm(n)
    wv = tuple(w_vee) if w_vee is not None else identity_perm(n)
    return Leaf(space, [Term(Const(1.0), zero_alpha(n), wh, wv)], classical)


def linear_sum(elems: Sequence[CrossedElement], weights=None) -> CrossedElement:
    weights = weights if weights is not None else [1.0] * len(elems)
    return Sum(list(zip(elems, weights)))


# -- zero testing -----------------------------------------------------------------

def max_coeff(nf: dict) -> float:
    return max((float(np.max(np.abs(np.asarray(j.value)))) for j in nf.values()), default=0.0)


def default_sampler(family: RFamily, n: int, guard: float = ell.DEFAULT_CONFIG.pole_guard,
                    lam=None):
    """Seeded sampler of (x, lambda) with all pairwise differences off the poles."""

    def sample(rng: np.random.Generator):
        for _ in range(10000):
            x = [family.sample_point(rng) for _ in range(n)]
            lm = list(lam) if lam is not None else [family.sample_point(rng) for _ in range(n)]
            ok = all(family.pole_distance(x[a] - x[b]) >= guard for a in range(n) for b in range(a))
            if lam is None:
                ok = ok and all(family.pole_distance(lm[a] - lm[b]) >= guard
                                for a in range(n) for b in range(a))
            if ok:
                return tuple(x), tuple(lm)
        raise RuntimeError("pole-guarded sampling failed")
    return sample


def residual_at(a: CrossedElement, x, lam, refs: Sequence[CrossedElement] = ()) -> float:
    """max |coefficient of a| / max |coefficient of refs| at one point."""
    top = max_coeff(a.nf(x, lam, 0))
    if not refs and isinstance(a, Sum):
        refs = [e for e, _ in a.parts]
    scale = max((max_coeff(r.nf(x, lam, 0)) for r in refs), default=0.0)
    if scale == 0.0:
        return top
    return top / scale


def is_zero(a: CrossedElement, samples: int = 20, seed: int = 0, tol: float = 1e-9,
            sampler=None, refs: Sequence[CrossedElement] = (), family: RFamily | None = None,
            label: str = "element", identity: str = "is_zero") -> dict:
    """Sampling-based zero test; the residual is relative to the generating operands."""
    from .reports import make_report

    if sampler is None:
        if family is None:
            raise AlgebraError("is_zero needs a sampler or a family")
        sampler = default_sampler(family, a.n)
    worst = 0.0
    for k in range(samples):
        rng = np.random.default_rng([seed, k])
        x, lam = sampler(rng)
        worst = max(worst, residual_at(a, x, lam, refs))
    return make_report(label, identity, samples, worst, seed, tol)
