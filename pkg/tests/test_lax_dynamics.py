import csv

import numpy as np
import pytest

import rmatrix_cm.dunkl_hamiltonians as dh
import rmatrix_cm.lax_dynamics as lax


@pytest.mark.parametrize("family,n", [("bb", 3), ("bb", 4), ("trigp", 3), ("scalar", 3)])
def test_lax_equation(family, n):
    p = dh.make_params(family, 2, n, 0.7)
    assert lax.lax_suite(p, 3)["max_residual"] < 1e-8


def test_zero_coupling_is_trivial():
    p = dh.make_params("bb", 2, 3, 0.0)
    assert lax.lax_suite(p, 3)["max_residual"] == 0.0


def test_diagonal_term_is_not_removable():
    p = dh.make_params("bb", 2, 3, 0.7)
    pt = lax.real_phase_point(p, np.random.default_rng(1))
    assert lax.scalar_commutator_norm(pt, p, which="dr") > 1e-3
    assert lax.scalar_commutator_norm(pt, p, which="wp") < 1e-12


def test_hamilton_rhs_is_gradient():
    p = dh.make_params("bb", 2, 3, 0.4j)
    x = np.array([0.1, 0.35, 0.7], dtype=complex)
    q = np.array([0.2, -0.1, 0.3], dtype=complex)
    xd, qd = lax.hamilton_rhs(p, x, q)
    h = 1e-5
    for i in range(3):
        e = np.eye(3)[i] * h
        dhdx = (lax.energy(p, x + e, q) - lax.energy(p, x - e, q)) / (2 * h)
        dhdp = (lax.energy(p, x, q + e) - lax.energy(p, x, q - e)) / (2 * h)
        assert abs(xd[i] - dhdp) < 1e-7
        assert abs(qd[i] + dhdx) < 1e-6


def test_flow_conserves_traces(tmp_path):
    p = dh.make_params("bb", 2, 3, lax.DYNAMICS_G)
    start = lax.spread_phase_point(p, np.random.default_rng(0))
    traj = lax.integrate_flow(start, p, 1e-3, 200)
    rep = lax.flow_report(p, traj)
    assert rep["aborted_at"] is None and rep["steps"] == 200
    assert rep["energy_drift"] < 1e-8 and rep["trace_drift"] < 1e-6
    path = tmp_path / "t.csv"
    lax.write_trajectory_csv(str(path), p, traj, every=50)
    rows = list(csv.reader(open(path)))
    assert rows[0][:2] == ["t", "x0"] and len(rows) == 1 + 5
    float(rows[1][1])


def test_quantum_lax():
    p = dh.make_params("bb", 2, 3, 0.7)
    assert lax.quantum_lax_residual(p, samples=2)["max_residual"] < 1e-8


def test_trace_powers():
    L = np.diag([1.0, 2.0])
    assert lax.trace_powers(L, 3) == [3, 5, 9]
