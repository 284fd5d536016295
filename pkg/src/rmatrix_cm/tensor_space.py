"""Dense operators on spin spaces (C^d)^{(x) n} and the symmetric group acting on them.

Sites are 0-based.  A permutation is a tuple ``w`` with ``w[i] = w(i)``;
``compose(w1, w2)`` is ``w1 o w2``.  The operator ``permutation_op(w)``
moves tensor factor ``k`` to position ``w(k)``, so that
``P_w X_(i,j) P_w^{-1} = X_(w(i), w(j))`` for any two-leg operator ``X``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

DEFAULT_BUDGET = 4096


class BudgetError(ValueError):
    """Spin-space dimension exceeds the configured memory budget."""


@dataclass(frozen=True)
class SpinSpace:
    d: int
    n: int
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.d < 1 or self.n < 2:
            raise ValueError(f"need d >= 1 and n >= 2, got d={self.d}, n={self.n}")
        if self.d ** self.n > self.budget:
            raise BudgetError(f"d^n = {self.d ** self.n} exceeds budget {self.budget}")

    @property
    def dim(self) -> int:
        return self.d ** self.n

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


# -- permutations ------------------------------------------------------------

Perm = tuple


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def transposition(n: int, i: int, j: int) -> Perm:
    w = list(range(n))
    w[i], w[j] = j, i
    return tuple(w)


def compose(w1: Perm, w2: Perm) -> Perm:
    return tuple(w1[k] for k in w2)


def inverse(w: Perm) -> Perm:
    out = [0] * len(w)
    for k, v in enumerate(w):
        out[v] = k
    return tuple(out)


def all_perms(n: int) -> list[Perm]:
    return list(itertools.permutations(range(n)))


def is_perm(w: Iterable[int], n: int) -> bool:
    return sorted(w) == list(range(n))


def act_on_vector(w: Perm, v):
    """(w.v)_{w(j)} = v_j: the permutation moves entry j to slot w(j)."""
    v = np.asarray(v)
    out = np.empty_like(v)
    out[list(w)] = v
    return out


@functools.lru_cache(maxsize=None)
def basis_permutation(w: Perm, d: int) -> np.ndarray:
    """Index map ``perm`` with ``P_w M P_w^{-1} = M[perm][:, perm]``."""
    n = len(w)
    digits = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.intp)
    moved = digits[:, list(w)]
    weights = d ** np.arange(n - 1, -1, -1)
    return moved @ weights


def permutation_op(w: Perm, space: SpinSpace) -> np.ndarray:
    if not is_perm(w, space.n):
        raise ValueError(f"{w} is not a permutation of {space.n} letters")
    perm = basis_permutation(tuple(w), space.d)
    out = np.zeros((space.dim, space.dim), dtype=complex)
    out[np.arange(space.dim), perm] = 1.0
    return out


def conjugate_by_perm(m: np.ndarray, w: Perm, d: int) -> np.ndarray:
    """P_w m P_w^{-1} without forming P_w."""
    perm = basis_permutation(tuple(w), d)
    return m[np.ix_(perm, perm)] if m.ndim == 2 else m[..., perm, :][..., perm]


# -- dense constructions ---------------------------------------------------------

def kron(a: np.ndarray, b: np.ndarray, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    dim = a.shape[0] * b.shape[0]
    if dim > budget:
        raise BudgetError(f"Kronecker product dimension {dim} exceeds budget {budget}")
    return np.kron(a, b)


def permutation_matrix_p(d: int) -> np.ndarray:
    """The flip P on C^d (x) C^d."""
    p = np.zeros((d * d, d * d), dtype=complex)
    for a in range(d):
        for b in range(d):
            p[b * d + a, a * d + b] = 1.0
    return p


def embed_legs(m: np.ndarray, legs: tuple[int, ...], space: SpinSpace) -> np.ndarray:
    """Operator acting as ``m`` on the factors ``legs`` (in that order) of ``space``."""
    d, n, k = space.d, space.n, len(legs)
    if len(set(legs)) != k or any(not 0 <= s < n for s in legs):
        raise ValueError(f"invalid legs {legs} for n={n}")
    if m.shape != (d ** k, d ** k):
        raise ValueError(f"operator shape {m.shape} does not match {k} legs of dimension {d}")
    others = [s for s in range(n) if s not in legs]
    r = len(others)
    eye = np.eye(d ** r).reshape((d,) * (2 * r))
    # axes of big: legs out, legs in, others out, others in
    big = np.tensordot(m.reshape((d,) * (2 * k)), eye, axes=0)
    axes = [0] * (2 * n)
    for pos, s in enumerate(legs):
        axes[s], axes[n + s] = pos, k + pos
    for q, s in enumerate(others):
        axes[s], axes[n + s] = 2 * k + q, 2 * k + r + q
    return np.transpose(big, axes).reshape(d ** n, d ** n).astype(complex)


def embed_two_leg(m: np.ndarray, i: int, j: int, space: SpinSpace) -> np.ndarray:
    if i == j:
        raise ValueError("embed_two_leg needs distinct sites")
    return embed_legs(m, (i, j), space)


def embed_one_leg(m: np.ndarray, i: int, space: SpinSpace) -> np.ndarray:
    return embed_legs(m, (i,), space)


def q_lambda_matrices(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Q = diag(exp(2 pi i k/d)), k = 1..d, and the cyclic shift Lambda."""
    q = np.diag(np.exp(2j * np.pi * np.arange(1, d + 1) / d))
    lam = np.zeros((d, d), dtype=complex)
    for k in range(d):
        for l in range(d):
            if (k - l + 1) % d == 0:
                lam[k, l] = 1.0
    return q, lam
