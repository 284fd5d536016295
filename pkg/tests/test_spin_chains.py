import numpy as np
import pytest
from hypothesis import given, strategies as st

import rmatrix_cm.dunkl_hamiltonians as dh
import rmatrix_cm.spin_chains as sc

P3 = dh.make_params("bb", 2, 3, 0.7)
GENERIC_EPS = (0.1 + 0.2j, -0.25 + 0.05j, 0.17 - 0.13j)


@pytest.mark.parametrize("family,d,n", [("bb", 2, 4), ("trigp", 2, 4)])
def test_freezing_chain_commutes(family, d, n):
    rep = sc.chain_suite(dh.make_params(family, d, n, 0.7))
    assert rep["passed"] and rep["max_residual"] < 1e-10
    assert rep["primed_h2_h3_commutator"] < 1e-10
    assert rep["freeze2_identification"] < 1e-10


def test_literal_pair_is_reported_not_asserted():
    rep = sc.chain_suite(dh.make_params("bb", 2, 4, 0.7))
    assert rep["literal_h2_h3_commutator"] > 1e-3


def test_equilibrium():
    assert np.allclose(sc.equilibrium(P3).x_star, [1 / 3, 2 / 3, 1.0])
    q = dh.make_params("trigp", 2, 3, 0.7)
    assert np.allclose(sc.equilibrium(q).x_star, 2 * np.pi * np.array([1, 2, 3]) / 3)


@given(st.permutations(range(3)), st.permutations(range(3)))
def test_act_vee_is_an_action(v, w):
    v, w = tuple(v), tuple(w)
    s = ("a", "b", "c")
    assert sc.act_vee(v, sc.act_vee(w, s)) == sc.act_vee(tuple(v[i] for i in w), s)


def test_orbit_sizes():
    assert len(sc.orbit_points(GENERIC_EPS)) == 6
    assert len(sc.orbit_points((0.23 + 0.11j, 0, 0))) == 3
    assert len(sc.orbit_points((0, 0, 0))) == 1


def test_deformed_generic():
    rep = sc.deformed_suite(P3, GENERIC_EPS)
    assert rep["dim"] == 48 and rep["orbit_size"] == 6
    assert rep["passed"], rep["pairs"]
    assert rep["pole_residual"] < 1e-10


def test_deformed_degenerate():
    rep = sc.deformed_suite(P3, (0.23 + 0.11j, 0, 0))
    assert rep["dim"] == 24 and rep["passed"]


def test_block_structure():
    op = sc.orbit_representation("H2v", GENERIC_EPS, P3)
    assert sc.check_block_structure(op, "H2v")


def test_zero_limits():
    m, neg = sc.zero_limit("I_xp", P3)
    assert np.abs(m - 3 * np.eye(8)).max() < 1e-9 and neg < 1e-9
    m, neg = sc.zero_limit("I_xpp", P3)
    assert np.abs(m).max() < 1e-9 and neg < 1e-9


def test_flipped_cycle_sign_breaks_commutativity():
    ops = {w: sc.orbit_representation(w, GENERIC_EPS, P3, flip_cycle_sign=True) for w in ("H2v", "I_xpp")}
    assert sc.commutator_norm(ops["H2v"].matrix, ops["I_xpp"].matrix) > 1e-3


@pytest.mark.parametrize("r,which", [(2, "H2v"), (3, "H3v")])
def test_laurent_coefficients_match_pipeline(r, which):
    pipe = sc.freeze_vee_pipeline(r, P3, GENERIC_EPS)
    mine = {v: m for v, (m, _) in sc.coefficients_at(which, P3, GENERIC_EPS).items()}
    ident = (0, 1, 2)
    for k in (set(pipe) | set(mine)) - {ident}:
        assert np.abs(pipe.get(k, 0) - mine.get(k, 0)).max() < 1e-10


def test_laurent_arithmetic():
    # (t^-1 + 2)(t^-2 / 2 - t^-1 + 3) = t^-3 / 2 + 0 t^-2 + t^-1 + 6 + ...
    a = sc.Laurent(-1, np.array([1.0, 2.0, 0.0, 0.0]))
    b = sc.Laurent(-2, np.array([0.5, -1.0, 3.0, 0.0]))
    c = a * b
    assert c.val == -3
    assert [complex(c.coefficient(k)) for k in (-3, -2, -1, 0)] == [0.5, 0.0, 1.0, 6.0]
    assert c.negative_part() == pytest.approx(1.0)
    assert c.scale(2).coefficient(0) == pytest.approx(12.0)


def test_diagonalize_and_cluster():
    f2 = sc.freeze(2, dh.make_params("bb", 2, 4, 0.7))
    f3 = sc.freeze(3, dh.make_params("bb", 2, 4, 0.7))
    spec = sc.diagonalize(f2, [f3])
    assert spec["dim"] == 16 and len(spec["eigenvalues"]) == 16
    assert sum(m for _, m in spec["degeneracies"]) == 16
    assert spec["commutator_norms"][f3.name] < 1e-10
    assert sc.cluster(np.array([1.0, 1.0 + 1e-12, 2.0])) == [(1.0 + 0j, 2), (2.0 + 0j, 1)]
