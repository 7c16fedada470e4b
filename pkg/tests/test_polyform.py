from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgorb.cyclo import ONE, ZERO, zeta
from lgorb.errors import DegenerateInput, NotInvertible, NoUniqueWeights
from lgorb.linalg import det
from lgorb.polyform import (
    QHPoly,
    central_charge,
    certify_nondegenerate,
    charge_report,
    check_invariance,
    grading_operator,
    invertible_decomposition,
    necessary_nondegeneracy_check,
    solve_weights,
    substitute,
)


def perm_matrix(images):
    n = len(images)
    return [[ONE if images[j] == i else ZERO for j in range(n)] for i in range(n)]


def diag(*entries):
    n = len(entries)
    return [[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)]


W14 = QHPoly.from_monomials([(1, (4, 1, 0, 0, 0)), (1, (0, 4, 1, 0, 0)), (1, (1, 0, 4, 0, 0)),
                             (1, (0, 0, 0, 5, 0)), (1, (0, 0, 0, 0, 5))])


def test_solve_weights_examples():
    quintic = [tuple(5 if j == i else 0 for j in range(5)) for i in range(5)] + [(1, 1, 1, 1, 1)]
    assert solve_weights(quintic, 5) == ((1, 1, 1, 1, 1), 5)
    assert QHPoly.fermat(8, 8, 4, 4, 4).weights == (1, 1, 2, 2, 2)
    assert QHPoly.fermat(8, 8, 4, 4, 4).degree == 8
    cubic = QHPoly.fermat(3)
    assert (cubic.weights, cubic.degree, cubic.charges) == ((1,), 3, (Fraction(1, 3),))


def test_solve_weights_failures():
    # underdetermined: one monomial in two variables
    with pytest.raises(NoUniqueWeights):
        solve_weights([(2, 2)], 2)
    # inconsistent: forces a nonpositive weight
    with pytest.raises(NoUniqueWeights):
        solve_weights([(3, 0), (0, 3), (1, 0)], 2)


def test_loop_and_chain_weights():
    loop = QHPoly.from_monomials([(1, (3, 1)), (1, (1, 3))])
    assert loop.charges == (Fraction(1, 4), Fraction(1, 4))
    chain = QHPoly.from_monomials([(1, (2, 1)), (1, (0, 3))])
    # x^2 y + y^3: q_y = 1/3, q_x = 1/3
    assert chain.charges == (Fraction(1, 3), Fraction(1, 3))


def test_central_charge_examples():
    cc = central_charge(QHPoly.fermat(5, 5, 5, 5, 5))
    assert (cc.c_hat, cc.cy) == (3, True)
    cc = central_charge(QHPoly.fermat(3, 3, 3))
    assert (cc.c_hat, cc.cy) == (1, True)
    cc = central_charge(QHPoly.fermat(*[3] * 9))
    assert (cc.c_hat, cc.cy, cc.generalized_cy) == (3, False, True)
    cc = central_charge(QHPoly.fermat(3, 3))
    assert (cc.cy, cc.generalized_cy) == (False, False)


def test_grading_operator_examples():
    J = grading_operator(QHPoly.fermat(5, 5, 5, 5, 5))
    assert J == diag(*[zeta(5)] * 5)
    J = grading_operator(QHPoly.fermat(8, 8, 4, 4, 4))
    assert J == diag(zeta(8), zeta(8), zeta(4), zeta(4), zeta(4))


@pytest.mark.parametrize("exps", [(5, 5, 5, 5, 5), (3,) * 9, (3, 3, 3), (3, 3), (8, 8, 4, 4, 4), (4, 4, 4), (2, 5)])
def test_det_J_matches_generalized_cy(exps):
    W = QHPoly.fermat(*exps)
    assert (det(grading_operator(W), ZERO, ONE) == ONE) == central_charge(W).generalized_cy


def test_nondegeneracy_check():
    assert necessary_nondegeneracy_check(QHPoly.fermat(5, 5, 5, 5, 5))
    report = necessary_nondegeneracy_check(QHPoly.from_monomials([(1, (2, 2)), (1, (4, 0))], 2))
    assert not report.passed and report.witness == 1
    assert necessary_nondegeneracy_check(QHPoly.from_monomials([(1, (3, 1)), (1, (1, 3))]))


def test_nondegeneracy_witness_first_variable():
    # x1^2 x2^2 + x2^4: no monomial x1^a x_j
    p = QHPoly.from_monomials([(1, (2, 2)), (1, (0, 4))])
    report = necessary_nondegeneracy_check(p)
    assert report.witness == 0
    with pytest.raises(DegenerateInput):
        certify_nondegenerate(p)


def test_invertible_decomposition():
    atoms = invertible_decomposition(QHPoly.fermat(5, 5, 5, 5, 5))
    assert [str(a) for a in atoms] == ["Fermat(5)"] * 5
    assert [str(a) for a in invertible_decomposition(W14)] == ["Loop(4,4,4)", "Fermat(5)", "Fermat(5)"]
    chain = QHPoly.from_monomials([(1, (2, 1)), (1, (0, 3))])
    assert [a.kind for a in invertible_decomposition(chain)] == ["chain"]
    generic = QHPoly.from_monomials([(1, (5, 0, 0, 0, 0)), (1, (0, 5, 0, 0, 0)), (1, (0, 0, 5, 0, 0)),
                                     (1, (0, 0, 0, 5, 0)), (1, (0, 0, 0, 0, 5)), (-5, (1, 1, 1, 1, 1))])
    with pytest.raises(NotInvertible):
        invertible_decomposition(generic)
    with pytest.raises(DegenerateInput):
        certify_nondegenerate(generic)
    assert certify_nondegenerate(generic, asserted=True) is None


def test_check_invariance_examples():
    W = QHPoly.fermat(5, 5, 5, 5, 5)
    assert check_invariance(W, grading_operator(W))
    assert check_invariance(W, perm_matrix([1, 2, 3, 4, 0]))
    assert not check_invariance(W, diag(zeta(4), ONE, ONE, ONE, ONE))
    assert check_invariance(W, diag(zeta(5), ONE, ONE, ONE, ONE))


def test_block_condition():
    W = QHPoly.fermat(8, 8, 4, 4, 4)
    # swapping x1 and x3 mixes weight blocks
    assert not check_invariance(W, perm_matrix([2, 1, 0, 3, 4]))
    assert check_invariance(W, perm_matrix([1, 0, 2, 3, 4]))


def test_charge_report():
    assert charge_report(QHPoly.fermat(5, 5, 5, 5, 5)) == []
    assert charge_report(QHPoly.fermat(2, 3)) == []  # has a quadratic monomial
    # x1 x2^2 + x2^5 has q_1 = 3/5 and no quadratic monomial
    p = QHPoly.from_monomials([(1, (1, 2)), (1, (0, 5))])
    assert p.charges[0] == Fraction(3, 5)
    assert charge_report(p) == [0]
    assert all(q <= Fraction(1, 2) for q in W14.charges)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 7), min_size=1, max_size=5), st.integers(1, 40), st.integers(0, 39))
def test_quasihomogeneity(exps, m, k):
    W = QHPoly.fermat(*exps)
    lam = zeta(m, k)
    g = diag(*[lam ** w for w in W.weights])
    image = substitute(W, g)
    scale = lam ** W.degree
    assert image == {e: c * scale for e, c in W.as_dict().items()}
