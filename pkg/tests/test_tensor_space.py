import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rmatrix_cm.tensor_space import (BudgetError, SpinSpace, all_perms, compose, conjugate_by_perm,
                                     embed_one_leg, embed_two_leg, inverse, is_perm,
                                     permutation_matrix_p, permutation_op, q_lambda_matrices,
                                     transposition)

SP = SpinSpace(2, 3)
perms3 = st.sampled_from(all_perms(3))


def rand_mat(seed, k):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))


@given(perms3, perms3)
def test_permutation_op_is_a_homomorphism(w1, w2):
    lhs = permutation_op(w1, SP) @ permutation_op(w2, SP)
    assert np.allclose(lhs, permutation_op(compose(w1, w2), SP))


@given(perms3)
def test_inverse(w):
    assert compose(w, inverse(w)) == tuple(range(3))
    assert is_perm(inverse(w), 3)


def test_two_leg_embedding_conventions():
    m = rand_mat(0, 4)
    P = permutation_matrix_p(2)
    assert np.allclose(embed_two_leg(m, 1, 0, SP), embed_two_leg(P @ m @ P, 0, 1, SP))
    assert np.allclose(embed_two_leg(P, 0, 2, SP), permutation_op(transposition(3, 0, 2), SP))
    assert np.allclose(embed_two_leg(m, 0, 1, SP), np.kron(m, np.eye(2)))


@pytest.mark.parametrize("w", all_perms(3))
def test_conjugation_relabels_legs(w):
    m = rand_mat(1, 4)
    emb = embed_two_leg(m, 0, 1, SP)
    Pw = permutation_op(w, SP)
    assert np.allclose(Pw @ emb @ Pw.conj().T, embed_two_leg(m, w[0], w[1], SP))
    assert np.allclose(conjugate_by_perm(emb, w, 2), Pw @ emb @ Pw.conj().T)


def test_one_leg_embedding():
    m = rand_mat(2, 3)
    sp = SpinSpace(3, 3)
    assert np.allclose(embed_one_leg(m, 2, sp), np.kron(np.eye(9), m))


def test_p_squares_to_identity():
    for d in (1, 2, 3):
        P = permutation_matrix_p(d)
        assert np.allclose(P @ P, np.eye(d * d))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_q_lambda_commutation(d):
    Q, L = q_lambda_matrices(d)
    w = np.exp(2j * np.pi / d)
    # Q Lambda = omega^{+-1} Lambda Q; both are of order d
    ratio = (Q @ L) @ np.linalg.inv(L @ Q)
    assert np.allclose(ratio, ratio[0, 0] * np.eye(d))
    assert min(abs(ratio[0, 0] - w), abs(ratio[0, 0] - 1 / w)) < 1e-12
    assert np.allclose(np.linalg.matrix_power(Q, d), np.eye(d))
    assert np.allclose(np.linalg.matrix_power(L, d), np.eye(d))


def test_budget_guard():
    with pytest.raises(BudgetError):
        SpinSpace(3, 9)
    with pytest.raises(ValueError):
        SpinSpace(2, 1)


def test_all_perms_count():
    assert len(all_perms(4)) == 24
    assert len(set(all_perms(4))) == 24
    assert all(is_perm(w, 4) for w in itertools.islice(all_perms(4), 5))
