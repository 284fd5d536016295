"""Truncated multivariate Taylor arithmetic (forward-mode jets).

A :class:`Jet` stores the Taylor coefficients of an analytic function of
``nvars`` variables around a base point, truncated at total degree
``order``.  Coefficients may be scalars or square matrices; the latter is
what the operator algebra uses for ``End U``-valued coefficient functions.

Coefficients are laid out along the first axis in a fixed basis of
multi-indices sorted by total degree, so truncating to a lower order is a
prefix slice.
"""

from __future__ import annotations

import functools
import math
from typing import Sequence

import numpy as np

MAX_ORDER = 10


class JetError(ValueError):
    """Raised for invalid jet operations (order or shape mismatch)."""


def _compositions(total: int, nvars: int):
    if nvars == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, nvars - 1):
            yield (first,) + rest


@functools.lru_cache(maxsize=None)
def basis(nvars: int, order: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices of total degree <= order, sorted by degree."""
    out = []
    for deg in range(order + 1):
        out.extend(_compositions(deg, nvars))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _index(nvars: int, order: int) -> dict:
    return {m: k for k, m in enumerate(basis(nvars, order))}


def basis_size(nvars: int, order: int) -> int:
    return math.comb(nvars + order, order)


@functools.lru_cache(maxsize=None)
def _mul_table(nvars: int, order: int):
    idx = _index(nvars, order)
    triples = []
    for a, ma in enumerate(basis(nvars, order)):
        da = sum(ma)
        for b, mb in enumerate(basis(nvars, order - da)):
            mc = tuple(x + y for x, y in zip(ma, mb))
            triples.append((idx[mc], a, b))
    triples.sort()
    tri = np.array(triples, dtype=np.intp)
    c, ia, ib = tri[:, 0], tri[:, 1], tri[:, 2]
    starts = np.flatnonzero(np.r_[True, c[1:] != c[:-1]])
    return ia, ib, starts


@functools.lru_cache(maxsize=None)
def _deriv_table(nvars: int, order: int, gamma: tuple[int, ...]):
    g = sum(gamma)
    idx = _index(nvars, order)
    src, weight = [], []
    for m in basis(nvars, order - g):
        shifted = tuple(x + y for x, y in zip(m, gamma))
        src.append(idx[shifted])
        w = 1
        for x, y in zip(m, gamma):
            w *= math.perm(x + y, y)
        weight.append(w)
    return np.array(src, dtype=np.intp), np.array(weight, dtype=float)


@functools.lru_cache(maxsize=None)
def _perm_table(nvars: int, order: int, w: tuple[int, ...]):
    # new[idx(w.m)] = old[idx(m)], where (w.m)[w[j]] = m[j]
    idx = _index(nvars, order)
    src = np.empty(len(idx), dtype=np.intp)
    for m, k in idx.items():
        wm = [0] * nvars
        for j, e in enumerate(m):
            wm[w[j]] = e
        src[idx[tuple(wm)]] = k
    return src


@functools.lru_cache(maxsize=None)
def _pair_table(nvars: int, order: int, i: int, j: int):
    """Weights for composing f(z) with z = x_i - x_j."""
    rows, ks, weights = [], [], []
    for r, m in enumerate(basis(nvars, order)):
        if any(e for v, e in enumerate(m) if v not in (i, j)):
            continue
        a, b = m[i], m[j]
        rows.append(r)
        ks.append(a + b)
        weights.append(math.comb(a + b, a) * (-1) ** b)
    return (np.array(rows, dtype=np.intp), np.array(ks, dtype=np.intp),
            np.array(weights, dtype=float))


class Jet:
    """Truncated Taylor expansion with scalar or matrix coefficients."""

    __slots__ = ("coeffs", "nvars", "order")

    def __init__(self, coeffs, nvars: int, order: int):
        coeffs = np.asarray(coeffs, dtype=complex)
        if order < 0 or order > MAX_ORDER:
            raise JetError(f"jet order {order} outside [0, {MAX_ORDER}]")
        if coeffs.shape[0] != basis_size(nvars, order):
            raise JetError("coefficient array does not match jet basis")
        self.coeffs = coeffs
        self.nvars = nvars
        self.order = order

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=complex)
        c = np.zeros((basis_size(nvars, order),) + value.shape, dtype=complex)
        c[0] = value
        return cls(c, nvars, order)

    @classmethod
    def variable(cls, var: int, value, nvars: int, order: int) -> "Jet":
        c = np.zeros(basis_size(nvars, order), dtype=complex)
        c[0] = value
        if order >= 1:
            c[1 + var] = 1.0
        return cls(c, nvars, order)

    @classmethod
    def from_pair_taylor(cls, taylor, nvars: int, order: int, i: int, j: int) -> "Jet":
        """Jet of ``f(x_i - x_j)`` from the univariate Taylor coefficients of f."""
        taylor = np.asarray(taylor, dtype=complex)
        rows, ks, w = _pair_table(nvars, order, i, j)
        c = np.zeros((basis_size(nvars, order),) + taylor.shape[1:], dtype=complex)
        c[rows] = taylor[ks] * w.reshape((-1,) + (1,) * (taylor.ndim - 1))
        return cls(c, nvars, order)

    # -- basic properties ---------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[1:]

    @property
    def value(self):
        return self.coeffs[0]

    def is_matrix(self) -> bool:
        return self.coeffs.ndim == 3

    def copy(self) -> "Jet":
        return Jet(self.coeffs.copy(), self.nvars, self.order)

    def truncate(self, order: int) -> "Jet":
        if order == self.order:
            return self
        if order > self.order:
            raise JetError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[:basis_size(self.nvars, order)], self.nvars, order)

    def coefficient(self, multi_index: Sequence[int]):
        mi = tuple(multi_index)
        if len(mi) != self.nvars or sum(mi) > self.order or min(mi) < 0:
            raise JetError(f"multi-index {mi} out of range for order {self.order}")
        return self.coeffs[_index(self.nvars, self.order)[mi]]

    def derivative_at_base(self, multi_index: Sequence[int]):
        mi = tuple(multi_index)
        fact = 1
        for e in mi:
            fact *= math.factorial(e)
        return self.coefficient(mi) * fact

    # -- arithmetic ---------------------------------------------------
    def _align(self, other: "Jet"):
        if other.nvars != self.nvars:
            raise JetError("jets have different numbers of variables")
        order = min(self.order, other.order)
        a, b = self.truncate(order), other.truncate(order)
        ca, cb = a.coeffs, b.coeffs
        if ca.ndim != cb.ndim:
            if ca.ndim == 1:
                ca = ca[:, None, None] * np.eye(cb.shape[-1])
            else:
                cb = cb[:, None, None] * np.eye(ca.shape[-1])
        return ca, cb, order

    def __add__(self, other):
        if isinstance(other, Jet):
            ca, cb, order = self._align(other)
            return Jet(ca + cb, self.nvars, order)
        c = self.coeffs.copy()
        c[0] = c[0] + other
        return Jet(c, self.nvars, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.nvars, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _convolve(self, other: "Jet", matmul: bool) -> "Jet":
        if other.nvars != self.nvars:
            raise JetError("jets have different numbers of variables")
        order = min(self.order, other.order)
        ia, ib, starts = _mul_table(self.nvars, order)
        ca = self.coeffs[ia]
        cb = other.coeffs[ib]
        if matmul and ca.ndim == 3 and cb.ndim == 3:
            prod = np.matmul(ca, cb)
        else:
            if ca.ndim < cb.ndim:
                ca = ca.reshape(ca.shape + (1,) * (cb.ndim - ca.ndim))
            elif cb.ndim < ca.ndim:
                cb = cb.reshape(cb.shape + (1,) * (ca.ndim - cb.ndim))
            prod = ca * cb
        return Jet(np.add.reduceat(prod, starts, axis=0), self.nvars, order)

    def __mul__(self, other):
        if isinstance(other, Jet):
            if self.is_matrix() and other.is_matrix():
                raise JetError("use @ for products of matrix jets")
            return self._convolve(other, matmul=False)
        return Jet(self.coeffs * other, self.nvars, self.order)

    __rmul__ = __mul__

    def __matmul__(self, other: "Jet") -> "Jet":
        return self._convolve(other, matmul=True)

    def reciprocal(self) -> "Jet":
        if self.is_matrix():
            raise JetError("reciprocal is defined for scalar jets only")
        b0 = self.coeffs[0]
        if b0 == 0:
            raise ZeroDivisionError("jet with vanishing constant term")
        delta = self - b0
        # 1/(b0 + d) = (1/b0) sum_k (-d/b0)^k, d nilpotent of index order+1
        result = Jet.constant(1.0 / b0, self.nvars, self.order)
        term = result
        for _ in range(self.order):
            term = term * delta * (-1.0 / b0)
            result = result + term
        return result

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.coeffs / other, self.nvars, self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    # -- calculus -----------------------------------------------------
    def derivative(self, gamma: Sequence[int]) -> "Jet":
        """Partial derivative d^gamma as a jet of order ``order - |gamma|``."""
        gamma = tuple(gamma)
        g = sum(gamma)
        if g == 0:
            return self
        if g > self.order:
            raise JetError(f"derivative of order {g} exceeds jet order {self.order}")
        src, w = _deriv_table(self.nvars, self.order, gamma)
        c = self.coeffs[src] * w.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        return Jet(c, self.nvars, self.order - g)

    def permute_vars(self, w: tuple[int, ...]) -> "Jet":
        """Relabel variables: the coefficient of x^m moves to x^(w.m)."""
        src = _perm_table(self.nvars, self.order, w)
        return Jet(self.coeffs[src], self.nvars, self.order)

    def conjugate_by_index(self, perm: np.ndarray) -> "Jet":
        """Conjugate matrix coefficients by a basis permutation."""
        if not self.is_matrix():
            return self
        return Jet(self.coeffs[:, perm][:, :, perm], self.nvars, self.order)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, shape={self.shape})"


def compose(taylor: np.ndarray, g: Jet) -> Jet:
    """Evaluate f(g) from the Taylor coefficients of f at g's constant term."""
    taylor = np.asarray(taylor, dtype=complex)
    order = g.order
    if taylor.shape[0] < order + 1:
        raise JetError("not enough Taylor coefficients for composition")
    delta = g - g.value
    result = Jet.constant(taylor[order], g.nvars, order)
    for k in range(order - 1, -1, -1):
        result = result * delta + taylor[k]
    return result


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    """Binary jet arithmetic; ``op`` is one of ``add``, ``mul``, ``div``."""
    if (a.nvars, a.order) != (b.nvars, b.order):
        raise JetError("jets must share num_vars and order")
    if op == "add":
        return a + b
    if op == "mul":
        return a @ b if a.is_matrix() and b.is_matrix() else a * b
    if op == "div":
        return a / b
    raise JetError(f"unknown jet operation {op!r}")


def extract_derivative(j: Jet, multi_index: Sequence[int]):
    return j.derivative_at_base(multi_index)


def _exp_taylor(z0, order):
    return np.exp(z0) / np.array([math.factorial(k) for k in range(order + 1)])


def _sin_cos_taylor(z0, order, cosine=False):
    out = np.empty(order + 1, dtype=complex)
    s, c = np.sin(z0), np.cos(z0)
    cyc = [c, -s, -c, s] if cosine else [s, c, -s, -c]
    for k in range(order + 1):
        out[k] = cyc[k % 4] / math.factorial(k)
    return out


def lift(f: str, args: Sequence[Jet], **params) -> Jet:
    """Compose an analytic primitive with argument jets.

    ``f`` is one of exp, sin, cos, cot, theta, kronecker_phi, weierstrass_p.
    Elliptic primitives take ``tau`` (a ModularParam) as keyword.
    """
    from . import elliptic_kernel as elliptic

    g = args[0]
    if f == "exp":
        return compose(_exp_taylor(complex(g.value), g.order), g)
    if f == "sin":
        return compose(_sin_cos_taylor(complex(g.value), g.order), g)
    if f == "cos":
        return compose(_sin_cos_taylor(complex(g.value), g.order, cosine=True), g)
    if f == "cot":
        s = lift("sin", [g])
        elliptic.check_pole(abs(complex(s.value)), elliptic.DEFAULT_CONFIG.series_tol ** 0.5, "cot")
        return lift("cos", [g]) / s
    tau = params["tau"]
    if f == "theta":
        return compose(elliptic.theta_taylor(complex(g.value), tau, g.order), g)
    if f == "weierstrass_p":
        return compose(elliptic.wp_taylor(complex(g.value), tau, g.order), g)
    if f == "kronecker_phi":
        z, mu = args
        num = lift("theta", [z + mu], tau=tau)
        den = lift("theta", [z], tau=tau) * lift("theta", [mu], tau=tau)
        return num * elliptic.theta_prime0(tau) / den
    raise JetError(f"unknown primitive {f!r}")


