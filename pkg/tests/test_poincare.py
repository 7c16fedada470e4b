from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest

from lgorb.cyclo import ONE, ZERO, zeta
from lgorb.errors import IllDefinedIndex, PreconditionViolated, TruncationOverflow
from lgorb.grp import generate_group
from lgorb.oracle import an_closed_form
from lgorb.poincare import (
    BigradedPoly,
    compare_with_geometry,
    e_polynomial_pq,
    e_polynomial_z2,
    fmt_fraction,
    hodge_diamond_shape_check,
    hodge_symmetry_check,
    hodge_table,
    mirror_relation_check,
    poincare_polynomial,
    read_geometry_csv,
    sector_contributions,
    sector_series,
    series_coefficients,
    serre_duality_check,
    truncation_guard,
    witten_index,
)
from lgorb.polyform import QHPoly, grading_operator
from lgorb.sectors import build_sector

F = Fraction


def diag(*entries):
    n = len(entries)
    return [[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)]


def perm_matrix(images):
    n = len(images)
    return [[ONE if images[j] == i else ZERO for j in range(n)] for i in range(n)]


def P_of(W, gens):
    return poincare_polynomial(W, generate_group(gens))


QUINTIC = QHPoly.fermat(5, 5, 5, 5, 5)
QUINTIC_P = BigradedPoly({(3, 3): 1, (2, 2): 101, (1, 1): 101, (0, 0): 1,
                          (3, 0): 1, (2, 1): 1, (1, 2): 1, (0, 3): 1})


def test_cubic_examples():
    W = QHPoly.fermat(3, 3, 3)
    assert P_of(W, [grading_operator(W)]) == BigradedPoly({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    nonsl = P_of(W, [diag(zeta(3), ONE, ONE)])
    expected = BigradedPoly({(1, F(2, 3)): 1, (F(2, 3), 1): 1, (F(2, 3), F(1, 3)): 2,
                             (F(1, 3), F(2, 3)): 2, (F(1, 3), 0): 1, (0, F(1, 3)): 1})
    assert nonsl == expected
    assert str(nonsl) == "u*v^(2/3) + u^(2/3)*v + 2*u^(2/3)*v^(1/3) + 2*u^(1/3)*v^(2/3) + u^(1/3) + v^(1/3)"


def test_quintic_grading():
    P = P_of(QUINTIC, [grading_operator(QUINTIC)])
    assert P == QUINTIC_P
    assert witten_index(P) == 200
    assert hodge_diamond_shape_check(P, F(3)) is None


def test_identity_sector_series_quintic():
    G = generate_group([grading_operator(QUINTIC)])
    s = build_sector(G.classes[0], QUINTIC.weights, QUINTIC.degree)
    coeffs = sector_series(s)
    # in s = (uv)^(1/5): charges 0, 1, 2, 3 carry 1, 101, 101, 1
    assert {t: c for t, c in enumerate(coeffs) if c} == {0: 1, 5: 101, 10: 101, 15: 1}


def test_an_identity_sector():
    # full symmetry group: no invariants in the untwisted sector
    n = 6
    W = QHPoly.fermat(n)
    G = generate_group([[[zeta(n)]]])
    s = build_sector(G.classes[0], W.weights, W.degree)
    assert not any(sector_series(s))
    # subgroup <zeta^l>: (uv)^(1 - 1/n) sum_{i=1}^{l} (uv)^(-i/l) - (uv)^(-1/n)
    for l in (1, 2, 3):
        G = generate_group([[[zeta(n, l)]]])
        s = build_sector(G.classes[0], W.weights, W.degree)
        got = BigradedPoly({(F(t, n), F(t, n)): c for t, c in enumerate(sector_series(s)) if c})
        want = BigradedPoly([((1 - F(1, n) - F(i, l),) * 2, 1) for i in range(1, l + 1)] + [((F(-1, n),) * 2, -1)])
        assert got == want


@pytest.mark.parametrize("n", range(2, 10))
def test_an_against_closed_form(n):
    W = QHPoly.fermat(n)
    for l in range(1, n + 1):
        if n % l == 0:
            assert P_of(W, [[[zeta(n, l)]]]) == an_closed_form(n, l)


def test_symmetry_checks_detect_failures():
    bad = QUINTIC_P + BigradedPoly({(2, 1): 1})
    assert hodge_symmetry_check(QUINTIC_P) is None
    assert hodge_symmetry_check(bad) in {(2, 1), (1, 2)}
    assert serre_duality_check(QUINTIC_P, F(3)) is None
    assert serre_duality_check(bad, F(3)) is not None


def test_mirror_relation():
    A = an_closed_form(6, 2)
    B = an_closed_form(6, 3)
    c = F(4, 6)
    assert mirror_relation_check(A, B, c) is None
    perturbed = B + BigradedPoly({(F(1, 6), F(1, 6)): 1})
    assert mirror_relation_check(A, perturbed, c) is not None


def test_shape_check():
    assert hodge_diamond_shape_check(QUINTIC_P, F(3)) is None
    W = QHPoly.fermat(3, 3, 3)
    nonsl = P_of(W, [diag(zeta(3), ONE, ONE)])
    assert hodge_diamond_shape_check(nonsl, F(1)) is not None
    missing_corner = QUINTIC_P - BigradedPoly({(3, 0): 1, (0, 3): 1})
    assert hodge_diamond_shape_check(missing_corner, F(3)) == (3, 0)
    off_diagonal = QUINTIC_P + BigradedPoly({(2, 0): 1, (0, 2): 1})
    assert hodge_diamond_shape_check(off_diagonal, F(3)) is not None


def test_witten_index_and_e_polynomials():
    W = QHPoly.fermat(3, 3, 3)
    with pytest.raises(IllDefinedIndex):
        witten_index(P_of(W, [diag(zeta(3), ONE, ONE)]))
    G = generate_group([grading_operator(QUINTIC)])
    contribs = sector_contributions(QUINTIC, G)
    # identity sector (n_g = 5) carries 204 with sign +; four twisted sectors (n_g = 0) carry -1
    assert e_polynomial_z2(contribs).total() == 204 - 4
    assert e_polynomial_pq(QUINTIC_P).total() == witten_index(QUINTIC_P) == 200


def test_deformed_quintic_and_invariance_precondition():
    terms = [(1, tuple(5 if j == i else 0 for j in range(5))) for i in range(5)] + [(-5 * zeta(7), (1, 1, 1, 1, 1))]
    deformed = QHPoly.from_monomials(terms)
    assert P_of(deformed, [grading_operator(deformed)]) == QUINTIC_P
    g = diag(zeta(5), ONE, ONE, ONE, ONE)
    # preserves the Fermat quintic but not the x1 x2 x3 x4 x5 term
    P_of(QUINTIC, [grading_operator(QUINTIC), g])
    with pytest.raises(PreconditionViolated):
        P_of(deformed, [grading_operator(deformed), g])


def test_truncation_guard_rejects_wrong_series():
    spectra = Counter({((1, F(0)),) * 5: 1, ((1, F(1, 5)),) * 5: 1, ((1, F(2, 5)),) * 5: 1,
                       ((1, F(3, 5)),) * 5: 1, ((1, F(4, 5)),) * 5: 1})
    coeffs = series_coefficients(spectra, 5, 15)
    truncation_guard(spectra, 5, coeffs)
    cut = list(coeffs[:-1]) + [0]
    with pytest.raises(TruncationOverflow):
        truncation_guard(spectra, 5, cut)
    shifted = list(coeffs)
    shifted[5] += 1
    with pytest.raises(TruncationOverflow):
        truncation_guard(spectra, 5, shifted)


def test_workers_are_deterministic():
    W = QHPoly.fermat(5, 5, 5, 5, 5)
    G = generate_group([grading_operator(W), perm_matrix([1, 2, 3, 4, 0])])
    assert poincare_polynomial(W, G, workers=2) == poincare_polynomial(W, G, workers=1)


def test_tables_and_geometry():
    T = hodge_table(QUINTIC_P, F(3), 5, "quintic")
    csv = T.to_csv()
    assert csv.splitlines()[0] == "p,q,h"
    assert "1,1,101" in csv.splitlines()
    assert read_geometry_csv(csv).poly() == QUINTIC_P
    # the mirror quintic geometry has h11 = 1, h21 = 101
    mirror = "# mirror\np,q,h\n0,0,1\n1,1,1\n2,2,1\n3,3,1\n3,0,1\n0,3,1\n2,1,101\n1,2,101\n"
    assert compare_with_geometry(QUINTIC_P, read_geometry_csv(mirror), F(3)) is None
    assert compare_with_geometry(QUINTIC_P, read_geometry_csv(csv), F(3)) is not None
    with pytest.raises(ValueError):
        read_geometry_csv("a,b,c\n")
    assert fmt_fraction(F(-2, 4)) == "-1/2"
    assert "101" in T.to_text()
