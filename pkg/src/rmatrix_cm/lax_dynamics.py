"""n x n Lax pairs for the R-matrix eCM model and the classical flow.

Blocks are operators on U = (C^d)^{(x) n}, and L is assembled as an (n D) x (n D)
matrix with D = d^n.  The displayed partner A belongs to the Hamiltonian
H = h / 2; the flow here is generated by h itself (x' = 2p), whose partner is 2A.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
import numpy as np

from . import elliptic_kernel as ell
from .dunkl_hamiltonians import ModelParams, PhasePoint, ecm_classical
from .operator_algebra import (Const, CrossedElement, HbarPoly, PairFn, Sum, Term,
                               commutator, divide_by_hbar, element, is_zero,
                               multiply, p_hat, unit_alpha, zero_alpha)
from .reports import make_report
from .tensor_space import identity_perm

DEFAULT_MU = 0.31 + 0.17j
# h = sum p^2 - 2 g^2 sum wp is repulsive on the real line only for g^2 < 0
DYNAMICS_G = 0.3j


@dataclass
class LaxPair:
    L: np.ndarray
    A: np.ndarray
    mu: complex
    quantum: bool = False


@dataclass
class Trajectory:
    times: list
    states: list
    stats: dict = field(default_factory=dict)


def _blocks(n: int, D: int, blocks: dict) -> np.ndarray:
    out = np.zeros((n * D, n * D), dtype=complex)
    for (i, j), b in blocks.items():
        out[i * D:(i + 1) * D, j * D:(j + 1) * D] = b
    return out


def _pair_mats(params: ModelParams, x, mu):
    """R_ij(x_ij, mu) and dR_ij embedded on legs (i, j) of U, for i != j."""
    fam, sp, n = params.family, params.space, params.n
    R, dR = {}, {}
    for i, j in itertools.permutations(range(n), 2):
        z = complex(x[i] - x[j])
        if fam.pole_distance(z) < ell.EVAL_POLE_FLOOR:
            raise ell.PoleError(f"collision x_{i} = x_{j}")
        t = fam.z_taylor(z, mu, 1)
        R[i, j] = fam.embed(t[0], i, j, sp)
        dR[i, j] = fam.embed(t[1], i, j, sp)
    return R, dR


def _dr_sum(params: ModelParams, x, exclude: int | None) -> np.ndarray:
    fam, sp = params.family, params.space
    cd = fam.classical_data()
    out = np.zeros((sp.dim, sp.dim), dtype=complex)
    for k, l in itertools.combinations(range(params.n), 2):
        if exclude in (k, l):
            continue
        out += fam.embed(cd.dr(complex(x[k] - x[l])), k, l, sp)
    return out


def _wp_sum(params: ModelParams, x) -> complex:
    return sum(params.family.wp(complex(x[k] - x[l])) for k, l in itertools.combinations(range(params.n), 2))


def build_classical_lax(point: PhasePoint, params: ModelParams, mu: complex = DEFAULT_MU,
                        keep_scalar: bool = False) -> LaxPair:
    """L_ii = p_i, L_ij = -g R_ij(x_ij, mu); A_ij = -g dR_ij, A_ii = -g sum_{k<l; k,l != i} r'_kl.

    ``keep_scalar`` retains the removable -g sum wp Id on the diagonal of A.
    """
    n, g, D = params.n, params.g, params.space.dim
    x, p = point.x, point.p
    R, dR = _pair_mats(params, x, mu)
    eye = np.eye(D)
    shift = _wp_sum(params, x) if keep_scalar else 0.0
    Lb, Ab = {}, {}
    for i in range(n):
        Lb[i, i] = p[i] * eye
        Ab[i, i] = -g * (_dr_sum(params, x, i) + shift * eye)
    for key in R:
        Lb[key] = -g * R[key]
        Ab[key] = -g * dR[key]
    return LaxPair(_blocks(n, D, Lb), _blocks(n, D, Ab), complex(mu))


def hamilton_rhs(params: ModelParams, x, p):
    """Hamilton's equations of h = sum p^2 - 2 g^2 sum wp: x' = 2p, p'_i = 2 g^2 sum_j wp'(x_i - x_j)."""
    n, fam, g = params.n, params.family, params.g
    xd = 2 * np.asarray(p, dtype=complex)
    pd = np.zeros(n, dtype=complex)
    for i, j in itertools.combinations(range(n), 2):
        f = 2 * g * g * fam.wp_taylor(complex(x[i] - x[j]), 1)[1]
        pd[i] += f
        pd[j] -= f
    return xd, pd


def lax_time_derivative(point: PhasePoint, params: ModelParams, mu: complex = DEFAULT_MU) -> np.ndarray:
    """dL/dt along the h-flow by the chain rule, R derivatives from z-jets."""
    n, g, D = params.n, params.g, params.space.dim
    _, dR = _pair_mats(params, point.x, mu)
    xd, pd = hamilton_rhs(params, point.x, point.p)
    blocks = {(i, i): pd[i] * np.eye(D) for i in range(n)}
    for (i, j), m in dR.items():
        blocks[i, j] = -g * m * (xd[i] - xd[j])
    return _blocks(n, D, blocks)


def lax_residual(point: PhasePoint, params: ModelParams, mu: complex = DEFAULT_MU,
                 r_flow: str = "quadratic") -> float:
    """||L' - [L, 2A]||_F / ||L||_F for the h-flow."""
    if r_flow != "quadratic":
        raise ValueError("only the quadratic flow has an explicit Lax partner")
    lp = build_classical_lax(point, params, mu)
    Ld = lax_time_derivative(point, params, mu)
    A = 2 * lp.A
    res = Ld - (lp.L @ A - A @ lp.L)
    return float(np.linalg.norm(res) / np.linalg.norm(lp.L))


def scalar_commutator_norm(point: PhasePoint, params: ModelParams, mu: complex = DEFAULT_MU,
                           which: str = "dr") -> float:
    """||[L, S Id_n]||_F / ||L||_F for S = -g sum wp (removable) or S = sum_{k<l} r'_kl (not)."""
    lp = build_classical_lax(point, params, mu)
    D = params.space.dim
    if which == "wp":
        S = -params.g * _wp_sum(params, point.x) * np.eye(D)
    elif which == "dr":
        S = _dr_sum(params, point.x, None)
    else:
        raise ValueError(which)
    big = np.kron(np.eye(params.n), S)
    return float(np.linalg.norm(lp.L @ big - big @ lp.L) / np.linalg.norm(lp.L))


def real_phase_point(params: ModelParams, rng: np.random.Generator, guard: float = 0.08,
                     p_scale: float = 1.0) -> PhasePoint:
    """Real positions in one real period with pairwise separation >= guard, normal momenta."""
    period = 2 * np.pi if params.family.is_trig else 1.0
    n = params.n
    for _ in range(10000):
        x = np.sort(rng.uniform(0, period, size=n))
        gaps = np.diff(np.concatenate([x, [x[0] + period]]))
        if gaps.min() >= guard * period:
            p = rng.normal(scale=p_scale, size=n)
            return PhasePoint(tuple(float(v) for v in x), tuple(float(v) for v in p), (0.0,) * n)
    raise RuntimeError("phase point sampling failed")


def spread_phase_point(params: ModelParams, rng: np.random.Generator, jitter: float = 0.02,
                       p_scale: float = 0.3) -> PhasePoint:
    """Near-equilibrium start: evenly spaced positions with a small jitter, modest momenta."""
    period = 2 * np.pi if params.family.is_trig else 1.0
    n = params.n
    x = (np.arange(n) + 0.5 + rng.uniform(-jitter, jitter, size=n) * n) * period / n
    p = rng.normal(scale=p_scale, size=n)
    p -= p.mean()
    return PhasePoint(tuple(float(v) for v in x), tuple(float(v) for v in p), (0.0,) * n)


def lax_suite(params: ModelParams, samples: int = 20, seed: int = 0, mu: complex = DEFAULT_MU,
              tol: float | None = 1e-8) -> dict:
    worst = 0.0
    for k in range(samples):
        pt = real_phase_point(params, np.random.default_rng([seed, k]))
        worst = max(worst, lax_residual(pt, params, mu))
    return make_report(params.family.label, f"classical_lax_n{params.n}", samples, worst, seed, tol)


# -- classical flow ---------------------------------------------------------------

def energy(params: ModelParams, x, p) -> complex:
    return ecm_classical("h", params)(x, p)


def integrate_flow(start: PhasePoint, params: ModelParams, dt: float = 1e-3, steps: int = 1000,
                   guard: float = 1e-6) -> Trajectory:
    """Fixed-step RK4 for the h-flow; stops early (stats['aborted_at']) near a collision."""
    x = np.asarray(start.x, dtype=complex)
    p = np.asarray(start.p, dtype=complex)
    fam = params.family
    times, states = [0.0], [PhasePoint(tuple(x.real), tuple(p.real), start.lam)]
    stats: dict = {"dt": dt, "steps": 0, "aborted_at": None}

    def f(xx, pp):
        return hamilton_rhs(params, xx, pp)

    for s in range(steps):
        t = (s + 1) * dt
        try:
            k1x, k1p = f(x, p)
            k2x, k2p = f(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p)
            k3x, k3p = f(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p)
            k4x, k4p = f(x + dt * k3x, p + dt * k3p)
        except ell.PoleError:
            stats["aborted_at"] = s * dt
            break
        x = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        p = p + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if min(fam.pole_distance(x[i] - x[j]) for i, j in itertools.combinations(range(params.n), 2)) < guard:
            stats["aborted_at"] = t
            break
        times.append(t)
        states.append(PhasePoint(tuple(x.real), tuple(p.real), start.lam))
        stats["steps"] = s + 1
    return Trajectory(times, states, stats)


def trace_powers(L: np.ndarray, kmax: int) -> list[complex]:
    out, M = [], np.eye(L.shape[0], dtype=complex)
    for _ in range(kmax):
        M = M @ L
        out.append(complex(np.trace(M)))
    return out


def flow_report(params: ModelParams, traj: Trajectory, mu: complex = DEFAULT_MU,
                every: int = 50) -> dict:
    """Relative drift of the energy and of tr L^k (k <= n) along a trajectory."""
    h0 = energy(params, traj.states[0].x, traj.states[0].p)
    tr0 = trace_powers(build_classical_lax(traj.states[0], params, mu).L, params.n)
    e_drift, tr_drift = 0.0, 0.0
    for s, st in enumerate(traj.states):
        e_drift = max(e_drift, abs(energy(params, st.x, st.p) - h0) / max(abs(h0), 1.0))
        if s % every == 0 or s == len(traj.states) - 1:
            tr = trace_powers(build_classical_lax(st, params, mu).L, params.n)
            tr_drift = max(tr_drift, max(abs(a - b) / max(abs(b), 1.0) for a, b in zip(tr, tr0)))
    return {"energy_drift": e_drift, "trace_drift": tr_drift, "steps": traj.stats["steps"],
            "aborted_at": traj.stats["aborted_at"]}


def write_trajectory_csv(path: str, params: ModelParams, traj: Trajectory,
                         mu: complex = DEFAULT_MU, every: int = 1) -> None:
    n = params.n
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{i}" for i in range(n)] + [f"p{i}" for i in range(n)]
                   + ["energy", "trL2", "laxres"])
        for s, (t, st) in enumerate(zip(traj.times, traj.states)):
            if s % every:
                continue
            lp = build_classical_lax(st, params, mu)
            tr2 = trace_powers(lp.L, 2)[1]
            w.writerow([repr(float(t))] + [repr(float(v)) for v in st.x] + [repr(float(v)) for v in st.p]
                       + [repr(float(energy(params, st.x, st.p).real)), repr(float(tr2.real)),
                          repr(float(lax_residual(st, params, mu)))])


# -- quantum Lax pair -------------------------------------------------------------------

def build_quantum_lax(params: ModelParams, mu: complex = DEFAULT_MU):
    """(calL, calA) as n x n nested lists of crossed elements with trivial group parts."""
    n, g, fam, sp = params.n, params.g, params.family, params.space
    z, idn = zero_alpha(n), identity_perm(n)
    Lm = [[None] * n for _ in range(n)]
    Am = [[None] * n for _ in range(n)]
    for i in range(n):
        Lm[i][i] = p_hat(sp, i)
        terms = [Term(PairFn(fam, k, l, "wp"), z, idn, idn, 0, -g)
                 for k, l in itertools.combinations(range(n), 2)]
        terms += [Term(PairFn(fam, k, l, "dr"), z, idn, idn, 0, -g)
                  for k, l in itertools.combinations(range(n), 2) if i not in (k, l)]
        Am[i][i] = element(sp, terms)
        for j in range(n):
            if j != i:
                Lm[i][j] = element(sp, [Term(PairFn(fam, i, j, "R", complex(mu)), z, idn, idn, 0, -g)])
                Am[i][j] = element(sp, [Term(PairFn(fam, i, j, "dR", complex(mu)), z, idn, idn, 0, -g)])
    return Lm, Am


def quantum_hamiltonian(params: ModelParams) -> CrossedElement:
    """H = (1/2) sum p^2 - g(g - hbar) sum wp."""
    n, g, fam, sp = params.n, params.g, params.family, params.space
    idn = identity_perm(n)
    kin = element(sp, [Term(Const(0.5), unit_alpha(n, i, 2), idn, idn) for i in range(n)])
    pot = element(sp, [Term(PairFn(fam, k, l, "wp"), zero_alpha(n), idn, idn)
                       for k, l in itertools.combinations(range(n), 2)])
    return Sum([(kin, 1.0), (pot, HbarPoly({0: -g * g, 1: g}))])


def quantum_lax_residual(params: ModelParams, mu: complex = DEFAULT_MU, samples: int = 20,
                         seed: int = 0, tol: float | None = 1e-8) -> dict:
    """max over entries of hbar^-1 [H, calL_ij] - [calL, calA]_ij, relative to the operands."""
    Lm, Am = build_quantum_lax(params, mu)
    H = quantum_hamiltonian(params)
    n = params.n
    worst = 0.0
    for i in range(n):
        for j in range(n):
            lhs = divide_by_hbar(commutator(H, Lm[i][j]))
            rhs = Sum([(multiply(Lm[i][k], Am[k][j]), 1.0) for k in range(n)]
                      + [(multiply(Am[i][k], Lm[k][j]), -1.0) for k in range(n)])
            rep = is_zero(lhs - rhs, samples, seed, family=params.family,
                          refs=[Lm[i][j], Am[i][j], H])
            worst = max(worst, rep["max_residual"])
    return make_report(params.family.label, f"quantum_lax_n{n}", samples, worst, seed, tol)
