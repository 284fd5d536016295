"""Spin chains from freezing the spin eCM model, and their lambda-deformations.

The undeformed chain operators act on U = (C^d)^{(x) n}.  The deformed ones are
finite sums f_v(lambda) v_vee; a W-orbit Sigma of spectral points turns them
into matrices on the direct sum of |Sigma| copies of U, with v_vee mapping the
sigma-summand to the (v.sigma)-summand and f(lambda) acting on the sigma-summand
by f(sigma).  Coefficients with removable poles on degenerate orbits are
evaluated as the t^0 term of their Laurent series along lambda = sigma + t delta.
"""

from __future__ import annotations

import csv
import functools
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import elliptic_kernel as ell
from .dunkl_hamiltonians import ModelParams, spinsep_split, vee_cycle
from .operator_algebra import classical_limit, hbar_component
from .reports import make_report
from .rmatrix_families import RFamily
from .tensor_space import all_perms, identity_perm, inverse, transposition

ORBIT_TOL = 1e-12
DEGENERACY_TOL = 1e-8
LAURENT_TERMS = 6


@dataclass(frozen=True)
class Equilibrium:
    x_star: tuple
    p_star: tuple


def equilibrium(params: ModelParams) -> Equilibrium:
    """x_i* = i/n (elliptic) or 2 pi i/n (trigonometric), sites counted from 1; p* = 0."""
    n = params.n
    scale = 2 * np.pi if params.family.is_trig else 1.0
    return Equilibrium(tuple(scale * (i + 1) / n for i in range(n)), (0.0,) * n)


@dataclass
class ChainOperator:
    name: str
    params: ModelParams
    orbit: tuple
    matrix: np.ndarray
    info: dict

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _pair_embed(params: ModelParams, m: np.ndarray, i: int, j: int) -> np.ndarray:
    return params.family.embed(m, i, j, params.space)


def _comm(a, b):
    return a @ b - b @ a


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """||[a, b]||_F / (||a||_F ||b||_F)."""
    den = np.linalg.norm(a) * np.linalg.norm(b)
    return float(np.linalg.norm(_comm(a, b)) / den) if den else 0.0


# -- undeformed chain ----------------------------------------------------------------

def freeze(r: int, params: ModelParams) -> ChainOperator:
    """eta_0(A_r) at (x*, p*): the hbar^0 part of the spin split at p = 0, x = x*."""
    if r not in (2, 3):
        raise ValueError("freeze supports r = 2, 3")
    _, A = spinsep_split(r, params)
    eq = equilibrium(params)
    n, dim = params.n, params.space.dim
    fam = params.family
    for i, j in itertools.combinations(range(n), 2):
        if fam.pole_distance(eq.x_star[i] - eq.x_star[j]) < ell.EVAL_POLE_FLOOR:
            raise ell.PoleError("equilibrium on a pole")
    nf = classical_limit(A).nf(eq.x_star, (0.0,) * n, 0)
    M = np.zeros((dim, dim), dtype=complex)
    zero = (0,) * n
    for (wh, wv, al, k), jet in nf.items():
        if al != zero:
            continue
        v = np.asarray(jet.value)
        M = M + (v if v.ndim == 2 else v * np.eye(dim))
    return ChainOperator(f"freeze{r}", params, ((0.0,) * n,), M, {})


def _rbar(params: ModelParams, i: int, j: int, q: str) -> np.ndarray:
    eq = equilibrium(params)
    cd = params.family.classical_data()
    z = complex(eq.x_star[i] - eq.x_star[j])
    m = {"r": cd.r, "dr": cd.dr}[q](z)
    return _pair_embed(params, m, i, j)


def sz_literal(which: str, params: ModelParams) -> ChainOperator:
    """H2 = sum r_ij((i-j)/n), its primed variant "H2p" with r', and H3 = sum [r'_ij, r_ik + r_jk]."""
    n, dim = params.n, params.space.dim
    M = np.zeros((dim, dim), dtype=complex)
    if which in ("H2", "H2p"):
        q = "r" if which == "H2" else "dr"
        for i, j in itertools.combinations(range(n), 2):
            M += _rbar(params, i, j, q)
    elif which == "H3":
        for i, j, k in itertools.combinations(range(n), 3):
            M += _comm(_rbar(params, i, j, "dr"), _rbar(params, i, k, "r") + _rbar(params, j, k, "r"))
    else:
        raise ValueError(f"unknown literal operator {which!r}")
    return ChainOperator(which, params, ((0.0,) * n,), M, {})


def identity_offset(a: np.ndarray, b: np.ndarray) -> tuple[complex, float]:
    """Best c with a - b = c Id, and the relative size of the remainder."""
    diff = a - b
    c = complex(np.trace(diff) / diff.shape[0])
    rest = diff - c * np.eye(diff.shape[0])
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1.0)
    return c, float(np.linalg.norm(rest) / scale)


def freeze_identification(params: ModelParams) -> dict:
    """freeze(2) / (-2g) against the primed literal operator, up to a multiple of Id."""
    f2 = freeze(2, params).matrix / (-2 * params.g)
    c, rest = identity_offset(f2, sz_literal("H2p", params).matrix)
    return {"constant": c, "remainder": rest}


# -- Laurent arithmetic -------------------------------------------------------------------

@dataclass(frozen=True)
class Laurent:
    """sum_m coeffs[m] t^(val + m), truncated to LAURENT_TERMS coefficients."""
    val: int
    coeffs: np.ndarray

    def __mul__(self, other: "Laurent") -> "Laurent":
        K = min(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        mat = a.ndim == 3 and b.ndim == 3
        out = []
        for m in range(K):
            acc = 0
            for s in range(m + 1):
                acc = acc + (a[s] @ b[m - s] if mat else _smul(a[s], b[m - s]))
            out.append(acc)
        return Laurent(self.val + other.val, np.array(out))

    def scale(self, c: complex) -> "Laurent":
        return Laurent(self.val, self.coeffs * c)

    def coefficient(self, power: int):
        m = power - self.val
        if 0 <= m < len(self.coeffs):
            return self.coeffs[m]
        return np.zeros_like(self.coeffs[0])

    def negative_part(self) -> float:
        return max((float(np.max(np.abs(self.coefficient(p)))) for p in range(self.val, 0)), default=0.0)


def _smul(x, y):
    return x * y


def _laurent_sum(items: Sequence[Laurent], shape) -> Laurent:
    lo = min((it.val for it in items), default=0)
    K = LAURENT_TERMS
    acc = np.zeros((K,) + shape, dtype=complex)
    for it in items:
        for m, c in enumerate(it.coeffs):
            p = it.val + m - lo
            if p < K:
                acc[p] = acc[p] + (c if np.ndim(c) == len(shape) else c * np.eye(shape[0]))
    return Laurent(lo, acc)


@functools.lru_cache(maxsize=8192)
def _r_jet(fam: RFamily, z0: complex, mu0: complex, order: int) -> np.ndarray:
    """c[a, b] with R(z0 + s, mu0 + u) = sum c[a,b] s^a u^b; mu R when mu0 = 0."""
    if mu0 == 0:
        split = fam.classical_data().mu_coefficients(z0, order + 1)
        return split
    jet = fam.evaluate_jet(z0, mu0, order + 1, "both")
    out = np.zeros((order + 2, order + 2, fam.dim, fam.dim), dtype=complex)
    for a in range(order + 2):
        for b in range(order + 2 - a):
            out[a, b] = jet.coefficient((a, b))
    return out


@dataclass(frozen=True)
class Factor:
    """kind: "R"/"dR" (matrix on legs i, j at z = x*_i - x*_j, mu = lam_k - lam_l),
    "lam" (lam_k - lam_l, or lam_k when l < 0) or "wp" (wp(x*_i - x*_j))."""
    kind: str
    i: int = -1
    j: int = -1
    k: int = -1
    l: int = -1


@dataclass(frozen=True)
class DTerm:
    coef: complex
    factors: tuple
    v: tuple


def _factor_laurent(f: Factor, params: ModelParams, lam, delta) -> Laurent:
    K = LAURENT_TERMS
    fam = params.family
    def lin(k, l):
        a = lam[k] - (lam[l] if l >= 0 else 0)
        b = delta[k] - (delta[l] if l >= 0 else 0)
        return complex(a), complex(b)
    if f.kind == "lam":
        a, b = lin(f.k, f.l)
        c = np.zeros(K, dtype=complex)
        c[0], c[1] = a, b
        return Laurent(0, c)
    eq = equilibrium(params)
    z0 = complex(eq.x_star[f.i] - eq.x_star[f.j])
    if f.kind == "wp":
        c = np.zeros(K, dtype=complex)
        c[0] = fam.wp(z0)
        return Laurent(0, c)
    mu0, dmu = lin(f.k, f.l)
    if abs(mu0) < ORBIT_TOL:
        mu0 = 0j
    a = 0 if f.kind == "R" else 1
    c = _r_jet(fam, z0, mu0, K + 1)
    coeffs = np.array([c[a, b] * dmu ** (b - (1 if mu0 == 0 else 0)) if mu0 == 0 else c[a, b] * dmu ** b
                       for b in range(K)])
    if mu0 == 0:
        if a == 1:
            coeffs[0] = 0  # z-derivative of the constant residue
        coeffs = np.array([_pair_embed(params, m, f.i, f.j) for m in coeffs])
        return Laurent(-1, coeffs)
    coeffs = np.array([_pair_embed(params, m, f.i, f.j) for m in coeffs])
    return Laurent(0, coeffs)


def term_laurent(t: DTerm, params: ModelParams, lam, delta) -> Laurent:
    out = None
    for f in t.factors:
        lf = _factor_laurent(f, params, lam, delta)
        out = lf if out is None else out * lf
    if out is None:
        c = np.zeros(LAURENT_TERMS, dtype=complex)
        c[0] = 1.0
        out = Laurent(0, c)
    return out.scale(t.coef)


def default_delta(n: int) -> tuple:
    return tuple(complex(i + 1 + 0.3 * (i + 1) ** 2, 0.17 * (i + 1)) for i in range(n))


# -- deformed operators ------------------------------------------------------------------

def deformed_terms(which: str, params: ModelParams, flip_cycle_sign: bool = False) -> list[DTerm]:
    """H2v = sum dR_ij s_ij, H3v (cycle form), I_xp = sum lam_ij R_ij s_ij, I_xpp.

    ``flip_cycle_sign`` negates the (ijk) part of I_xpp relative to the sign fixed
    by the dynamical Hamiltonian it is frozen from (a negative control: the
    family then stops commuting).
    """
    n = params.n
    idn = identity_perm(n)
    R = lambda i, j, k=None, l=None: Factor("R", i, j, i if k is None else k, j if l is None else l)
    dR = lambda i, j, k=None, l=None: Factor("dR", i, j, i if k is None else k, j if l is None else l)
    lam = lambda k, l=-1: Factor("lam", k=k, l=l)
    out: list[DTerm] = []
    if which == "H2v":
        for i, j in itertools.combinations(range(n), 2):
            out.append(DTerm(1.0, (dR(i, j),), transposition(n, i, j)))
    elif which == "H3v":
        for i, j, k in itertools.combinations(range(n), 3):
            c1, c2 = vee_cycle(n, i, j, k), vee_cycle(n, k, j, i)
            out += [DTerm(1.0, (dR(i, j), R(i, k, j, k)), c1),
                    DTerm(-1.0, (R(j, k), dR(i, j, i, k)), c1),
                    DTerm(1.0, (dR(i, j), R(j, k, i, k)), c2),
                    DTerm(-1.0, (R(i, k), dR(i, j, k, j)), c2)]
    elif which == "I_xp":
        for i, j in itertools.combinations(range(n), 2):
            out.append(DTerm(1.0, (lam(i, j), R(i, j)), transposition(n, i, j)))
    elif which == "I_xpp":
        s1 = -2.0 if flip_cycle_sign else 2.0
        for i, j, k in itertools.permutations(range(n), 3):
            out.append(DTerm(1.0, (lam(i), Factor("wp", j, k)), idn))
        for i, j, k in itertools.combinations(range(n), 3):
            c1, c2 = vee_cycle(n, i, j, k), vee_cycle(n, k, j, i)
            out += [DTerm(s1, (lam(k, i), R(i, k), R(j, k, j, i)), c1),
                    DTerm(s1, (lam(k, j), R(i, j), R(i, k, j, k)), c1),
                    DTerm(2.0, (lam(i, k), R(i, j), R(j, k, i, k)), c2),
                    DTerm(2.0, (lam(k, j), R(j, k), R(i, k, i, j)), c2)]
    else:
        raise ValueError(f"unknown deformed operator {which!r}")
    return out


DEFORMED = ("H2v", "H3v", "I_xp", "I_xpp")


def act_vee(v: tuple, sigma: tuple) -> tuple:
    """(v.sigma)_{v(j)} = sigma_j."""
    out = [0j] * len(sigma)
    for j, s in enumerate(sigma):
        out[v[j]] = s
    return tuple(out)


def orbit_points(epsilon: Sequence[complex], tol: float = ORBIT_TOL) -> tuple:
    pts: list[tuple] = []
    eps = tuple(complex(e) for e in epsilon)
    for w in all_perms(len(eps)):
        p = act_vee(w, eps)
        if not any(max(abs(a - b) for a, b in zip(p, q)) < tol for q in pts):
            pts.append(p)
    return tuple(pts)


def _orbit_index(pts, p, tol=ORBIT_TOL) -> int:
    for idx, q in enumerate(pts):
        if max(abs(a - b) for a, b in zip(p, q)) < tol:
            return idx
    raise ValueError("point not on orbit")


def coefficients_at(which: str, params: ModelParams, lam, delta=None, flip_cycle_sign: bool = False):
    """{v: (t^0 matrix, size of the negative Laurent part)} of the operator at lambda."""
    delta = delta or default_delta(params.n)
    dim = params.space.dim
    groups: dict = {}
    for t in deformed_terms(which, params, flip_cycle_sign):
        groups.setdefault(t.v, []).append(term_laurent(t, params, lam, delta))
    out = {}
    for v, items in groups.items():
        s = _laurent_sum(items, (dim, dim))
        out[v] = (s.coefficient(0), s.negative_part())
    return out


def orbit_representation(which: str, epsilon: Sequence[complex], params: ModelParams,
                         delta=None, flip_cycle_sign: bool = False) -> ChainOperator:
    """Block matrix on the direct sum over the orbit; block [v.sigma, sigma] += f_v(v.sigma)."""
    pts = orbit_points(epsilon)
    dim = params.space.dim
    N = len(pts)
    M = np.zeros((N * dim, N * dim), dtype=complex)
    pole = 0.0
    scale = 0.0
    for b, tau in enumerate(pts):
        coeffs = coefficients_at(which, params, tau, delta, flip_cycle_sign)
        for v, (mat, neg) in coeffs.items():
            pole = max(pole, neg)
            scale = max(scale, float(np.max(np.abs(mat))))
            # sigma with v.sigma = tau
            s = _orbit_index(pts, act_vee(inverse(v), tau))
            M[b * dim:(b + 1) * dim, s * dim:(s + 1) * dim] += mat
    return ChainOperator(which, params, pts, M, {"pole_residual": pole / max(scale, 1.0)})


def check_block_structure(op: ChainOperator, which: str) -> bool:
    """Nonzero blocks [tau, sigma] only where tau = v.sigma for a group element v of the operator."""
    pts, dim = op.orbit, op.params.space.dim
    vs = {t.v for t in deformed_terms(which, op.params)}
    allowed = {(_orbit_index(pts, act_vee(v, s)), b) for b, s in enumerate(pts) for v in vs}
    for a in range(len(pts)):
        for b in range(len(pts)):
            blk = op.matrix[a * dim:(a + 1) * dim, b * dim:(b + 1) * dim]
            if (a, b) not in allowed and np.max(np.abs(blk)) > 0:
                return False
    return True


def zero_limit(which: str, params: ModelParams, delta=None) -> tuple[np.ndarray, float]:
    """lambda -> 0 with every v_vee replaced by id: t^0 term of sum_v f_v(t delta)."""
    delta = delta or default_delta(params.n)
    dim = params.space.dim
    items = [term_laurent(t, params, (0j,) * params.n, delta) for t in deformed_terms(which, params)]
    s = _laurent_sum(items, (dim, dim))
    return s.coefficient(0), s.negative_part()


def freeze_vee_pipeline(r, params: ModelParams, lam) -> dict:
    """{v: matrix} of the hbar^1, p-free part of Res_vee(h_r(lambda, y)) at x*, divided by g^(r-1)."""
    from .dunkl_hamiltonians import principal_vee
    eq = equilibrium(params)
    dim = params.space.dim
    nf = hbar_component(principal_vee(r, params), 1).nf(eq.x_star, tuple(lam), 0)
    power = {2: 1, 3: 2}[r]
    out = {}
    for (wh, wv, al, k), jet in nf.items():
        if any(al):
            continue
        v = np.asarray(jet.value) / params.g ** power
        out[wv] = out.get(wv, 0) + (v if v.ndim == 2 else v * np.eye(dim))
    return out


# -- suites ------------------------------------------------------------------------------------

def chain_suite(params: ModelParams, tol: float = 1e-10) -> dict:
    f2, f3 = freeze(2, params), freeze(3, params)
    l2, l3 = sz_literal("H2", params), sz_literal("H3", params)
    ident = freeze_identification(params)
    res = commutator_norm(f2.matrix, f3.matrix)
    rep = make_report(params.family.label, f"chain_commutativity_n{params.n}", 1, res, 0, tol)
    rep.update({"n": params.n, "d": params.family.d,
                "literal_h2_h3_commutator": commutator_norm(l2.matrix, l3.matrix),
                "primed_h2_h3_commutator": commutator_norm(sz_literal("H2p", params).matrix, l3.matrix),
                "freeze2_constant": ident["constant"], "freeze2_identification": ident["remainder"]})
    return rep


def deformed_suite(params: ModelParams, epsilon, tol: float = 1e-10, label: str = "deformed") -> dict:
    ops = {w: orbit_representation(w, epsilon, params) for w in DEFORMED}
    worst = 0.0
    pairs = {}
    for a, b in itertools.combinations(DEFORMED, 2):
        c = commutator_norm(ops[a].matrix, ops[b].matrix)
        pairs[f"{a},{b}"] = c
        worst = max(worst, c)
    rep = make_report(params.family.label, f"{label}_commutativity", 1, worst, 0, tol)
    rep.update({"dim": ops["H2v"].dim, "orbit_size": len(ops["H2v"].orbit), "pairs": pairs,
                "pole_residual": max(o.info["pole_residual"] for o in ops.values())})
    return rep


# -- diagonalization and export ---------------------------------------------------------------

def cluster(values: np.ndarray, tol: float = DEGENERACY_TOL) -> list[tuple[complex, int]]:
    out: list[list] = []
    for v in values:
        if out and abs(v - out[-1][0]) <= tol * max(1.0, abs(v)):
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return [(complex(a), b) for a, b in out]


def diagonalize(op: ChainOperator, partners: Sequence[ChainOperator] = ()) -> dict:
    """Eigenvalues sorted by (real, imag) with degeneracy clusters and commutator self-checks."""
    M = op.matrix
    herm = np.allclose(M, M.conj().T, atol=1e-12 * max(1.0, np.abs(M).max()))
    ev = np.linalg.eigvalsh(M).astype(complex) if herm else np.linalg.eigvals(M)
    ev = np.array(sorted(ev, key=lambda z: (round(z.real, 10), round(z.imag, 10))))
    cl = cluster(ev)
    p = op.params
    return {"n": p.n, "d": p.family.d, "family": p.family.label, "flavor": p.flavor,
            "operator": op.name, "dim": op.dim, "hermitian": bool(herm),
            "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
            "degeneracies": [[[float(z.real), float(z.imag)], m] for z, m in cl],
            "commutator_norms": {q.name: commutator_norm(M, q.matrix) for q in partners}}


def write_spectrum_csv(path: str, spectrum: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for k, (re, im) in enumerate(spectrum["eigenvalues"]):
            w.writerow([k, repr(re), repr(im)])


def cyclic_symmetry_scan(op: ChainOperator) -> float:
    """Spectral distance between op and its conjugate by the global cyclic site shift (observation only)."""
    from .tensor_space import permutation_op
    n = op.params.n
    shift = tuple((i + 1) % n for i in range(n))
    P = permutation_op(shift, op.params.space)
    conj = P @ op.matrix @ np.linalg.inv(P)
    a = np.sort_complex(np.linalg.eigvals(op.matrix))
    b = np.sort_complex(np.linalg.eigvals(conj))
    return float(np.max(np.abs(a - b)))
