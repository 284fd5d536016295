import pytest
from hypothesis import given, strategies as st

from rmatrix_cm import operator_algebra as oa
from rmatrix_cm.rmatrix_families import make_family
from rmatrix_cm.tensor_space import SpinSpace, transposition

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
polys = st.dictionaries(st.integers(0, 3), coef, max_size=4).map(oa.HbarPoly)


@given(polys, polys, polys)
def test_hbar_poly_ring_laws(a, b, c):
    lhs = ((a + b) * c).coeffs
    rhs = (a * c + b * c).coeffs
    for k in set(lhs) | set(rhs):
        assert abs(lhs.get(k, 0) - rhs.get(k, 0)) < 1e-9 * (1 + abs(lhs.get(k, 0)))


def test_momentum_coordinate_commutator():
    sp = SpinSpace(1, 3)
    x0sq = oa.coeff(sp, oa.Product((oa.Coordinate(0), oa.Coordinate(0))))
    c = oa.commutator(oa.p_hat(sp, 0), x0sq).evaluate((0.1, 0.2, 0.3), (0, 0, 0))
    nonzero = {k: v for k, v in c.items() if abs(v) > 1e-14}
    # [hbar d, x^2] = 2 hbar x
    assert len(nonzero) == 1
    (key, val), = nonzero.items()
    assert key[-1] == 1 and abs(val - 0.2) < 1e-14


def test_group_elements_square_to_one():
    sp = SpinSpace(2, 3)
    fam = make_family("bb", 2)
    s = oa.group(sp, transposition(3, 0, 1), transposition(3, 0, 1))
    rep = oa.is_zero(s * s - oa.scalar(sp, 1.0), 3, family=fam)
    assert rep["max_residual"] < 1e-14


def dunkl(fam, sp, g, i):
    n = sp.n
    terms = [oa.Term(oa.Const(1.0), oa.unit_alpha(n, i), tuple(range(n)), tuple(range(n)))]
    for j in range(n):
        if j != i:
            terms.append(oa.Term(oa.PairFn(fam, i, j, "R", ("lam", i, j)), oa.zero_alpha(n),
                                 transposition(n, i, j), tuple(range(n)), 0, -g))
    return oa.element(sp, terms)


def test_hand_built_dunkl_operators_commute():
    fam = make_family("bb", 2)
    sp = SpinSpace(2, 3)
    y0, y1 = dunkl(fam, sp, 0.7, 0), dunkl(fam, sp, 0.7, 1)
    assert oa.is_zero(oa.commutator(y0, y1), 4, 0, 1e-9, family=fam)["passed"]


def test_nonzero_is_detected():
    fam = make_family("bb", 2)
    sp = SpinSpace(2, 3)
    y0 = dunkl(fam, sp, 0.7, 0)
    assert not oa.is_zero(y0, 2, family=fam)["passed"]


def test_res_maps():
    sp = SpinSpace(2, 3)
    e = oa.group(sp, transposition(3, 0, 1), transposition(3, 1, 2))
    pt = ((0.1, 0.2, 0.3), (0.0, 0.0, 0.0))
    assert list(oa.res_hat(e).evaluate(*pt)) == [((0, 1, 2), (0, 2, 1), (0, 0, 0), 0)]
    # w1_hat w2_vee -> (w2 w1^-1)_vee
    assert list(oa.res_vee(e).evaluate(*pt)) == [((0, 1, 2), (2, 0, 1), (0, 0, 0), 0)]


def test_jet_order_cap():
    sp = SpinSpace(1, 3)
    with pytest.raises(oa.AlgebraError):
        oa.scalar(sp, 1.0).nf((0, 0, 0), (0, 0, 0), oa.JET_ORDER_CAP + 1)


def test_divide_by_hbar_rejects_constant_term():
    sp = SpinSpace(1, 3)
    x0 = oa.coeff(sp, oa.Coordinate(0))
    with pytest.raises(oa.HbarDivisionError):
        oa.divide_by_hbar(x0).evaluate((0.1, 0.2, 0.3), (0, 0, 0))
