import pytest
from hypothesis import given, strategies as st

import rmatrix_cm.dunkl_hamiltonians as dh
from rmatrix_cm.operator_algebra import commutator, is_zero
from rmatrix_cm.tensor_space import compose, inverse

P = dh.make_params("bb", 2, 3, 0.7)


def residual(rep):
    return rep["max_residual"]


def test_cycle_conventions():
    w = dh.cycle(3, 0, 1, 2)
    assert w[0] == 1 and w[1] == 2 and w[2] == 0
    assert compose(w, dh.vee_cycle(3, 0, 1, 2)) == (0, 1, 2)


@given(st.permutations(range(4)))
def test_vee_cycle_is_inverse(perm):
    i, j, k = perm[:3]
    assert dh.vee_cycle(4, i, j, k) == inverse(dh.cycle(4, i, j, k))


def test_dunkl_commutativity():
    assert dh.dunkl_commutativity(P, 3, tol=1e-9)["passed"]


def test_dunkl_equivariance():
    assert dh.dunkl_equivariance(P, 2, tol=1e-9)["passed"]


@pytest.mark.parametrize("r", [2, 3])
def test_spin_hamiltonian_matches_display(r):
    rep = dh.pointwise_agreement(dh.spin_hamiltonian(r, P), dh.spin_hamiltonian_display(r, P), P, 3)
    assert residual(rep) < 1e-9


@pytest.mark.parametrize("r", [2, 3])
def test_spin_separation(r):
    rep = dh.pointwise_agreement(dh.spinsep_split(r, P)[1], dh.spinsep_display(r, P), P, 2)
    assert residual(rep) < 1e-9


def test_quadratic_closed_form():
    rep = dh.pointwise_agreement(dh.substitute("h", P), dh.quadratic_closed_form(P), P, 3)
    assert residual(rep) < 1e-10


def test_quantum_commutativity():
    c = commutator(dh.spin_hamiltonian(2, P), dh.spin_hamiltonian(3, P))
    assert is_zero(c, 2, family=P.family, tol=1e-7)["passed"]


@pytest.mark.parametrize("r", [1, 2, 3, "h"])
def test_classical_reduction(r):
    assert dh.classical_reduction(r, P, 2, tol=1e-9)["passed"]


@pytest.mark.parametrize("r,disp", [("h", 2), (2, "e2"), (3, 3)])
def test_principal_vee_displays(r, disp):
    rep = dh.pointwise_agreement(dh.principal_vee(r, P), dh.principal_vee_display(disp, P), P, 2)
    assert residual(rep) < 1e-9


def test_additional_xp_display():
    rep = dh.pointwise_agreement(dh.additional_Lf("xp", P), dh.additional_Lf("xp", P, vee=False), P, 2)
    assert residual(rep) < 1e-9


def test_additional_xpp_needs_central_remainder():
    pipe = dh.additional_Lf("xpp", P, vee=False)
    with_f = dh.pointwise_agreement(dh.additional_Lf("xpp", P, with_remainder=True), pipe, P, 2)
    without = dh.pointwise_agreement(dh.additional_Lf("xpp", P), pipe, P, 2)
    assert residual(with_f) < 1e-9
    assert residual(without) > 1e-6


@pytest.mark.parametrize("r,tol", [("h", 1e-6), (3, 1e-5)])
def test_lambda_zero_limit(r, tol):
    assert dh.limit_check(r, P, samples=1, tol=tol)["passed"]


def test_translation_suite():
    reps = dh.translation_suite(P, samples=3)
    assert len(reps) == 7 and all(r["passed"] for r in reps), reps


@pytest.mark.parametrize("family", ["trig", "trigp"])
def test_trig_braid(family):
    q = dh.make_params(family, 2, 4, 0.7)
    reps = dh.trig_braid_suite(q, samples=3)
    assert reps and all(r["passed"] for r in reps), reps


def test_trig_dunkl():
    q = dh.make_params("trigp", 2, 3, 0.7)
    assert dh.dunkl_commutativity(q, 3, tol=1e-9)["passed"]


def test_suite_family_guards():
    with pytest.raises(ValueError):
        dh.trig_braid_suite(P, 1)


def test_ecm_classical_quadratic():
    h = dh.ecm_classical("h", P)
    x, p = (0.1, 0.3, 0.6), (0.2, -0.1, 0.4)
    fam = P.family
    pot = sum(fam.wp(x[i] - x[j]) for i in range(3) for j in range(i + 1, 3))
    assert abs(h(x, p) - (sum(v * v for v in p) - 2 * 0.49 * pot)) < 1e-12
