from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from lgorb.cyclo import ONE, ZERO, zeta
from lgorb.errors import NotInCentralizer
from lgorb.grp import ConjugacyClass, GroupElement, eigen_multiplicities, elements_from_matrices, generate_group
from lgorb.poincare import BigradedPoly, poincare_polynomial, sector_contribution
from lgorb.polyform import QHPoly, grading_operator, substitute
from lgorb.problem import load_preset
from lgorb.sectors import build_sector, restricted_action


def perm_matrix(images):
    n = len(images)
    return [[ONE if images[j] == i else ZERO for j in range(n)] for i in range(n)]


def diag(*entries):
    n = len(entries)
    return [[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)]


def mat_apply(m, v):
    n = len(v)
    return [sum((m[i][k] * v[k] for k in range(n)), ZERO) for i in range(n)]


def to_float(c) -> complex:
    w = np.exp(2j * np.pi / c.conductor)
    return sum(float(a) * w**k for k, a in c.coeffs.items())


def test_identity_sector():
    W = QHPoly.fermat(5, 5, 5, 5, 5)
    G = generate_group([grading_operator(W)])
    s = build_sector(G.classes[0], W.weights, W.degree)
    assert s.rep.is_identity()
    assert (s.n_g, s.age_g, s.age_ginv, s.moved_charge_sum) == (5, 0, 0, 0)
    assert len(s.centralizer) == G.order


def test_grading_sector_on_quintic():
    W = QHPoly.fermat(5, 5, 5, 5, 5)
    G = generate_group([grading_operator(W)])
    J = GroupElement.from_matrix(grading_operator(W))
    cls = G.class_of(J)
    s = build_sector(cls, W.weights, W.degree)
    assert (s.n_g, s.age_g, s.moved_charge_sum) == (0, 1, 1)
    c = sector_contribution(cls, W.weights, W.degree)
    assert c.poly == BigradedPoly({(0, 3): 1})


@pytest.mark.parametrize("n,l", [(6, 1), (6, 2), (6, 3), (12, 4), (7, 1)])
def test_an_prefactor(n, l):
    W = QHPoly.fermat(n)
    G = generate_group([[[zeta(n, l)]]])
    for c in G.classes:
        if c.rep.is_identity():
            continue
        li = int(c.rep.diagonal_logs()[0] * n)
        sc = sector_contribution(c, W.weights, W.degree)
        assert sc.poly == BigradedPoly({(Fraction(li - 1, n), Fraction(n - li - 1, n)): 1})


def test_sector_invariants_on_presets():
    for name in ["quartic-A4", "quintic-J-cycle", "octic-3", "cubic-J-cycle"]:
        prob = load_preset(name)
        W = prob.polynomial
        G = prob.build_group()
        for c in G.classes:
            s = build_sector(c, W.weights, W.degree)
            assert s.n_g == len(s.fixed_basis)
            assert s.age_g + s.age_ginv == W.n - s.n_g
            fixed_q = sum((q for q, _ in s.fixed_basis), Fraction(0))
            assert s.moved_charge_sum == sum(W.charges) - fixed_q


def centralizer_sample(s, k=6):
    rng = random.Random(0)
    cent = list(s.centralizer)
    return cent if len(cent) <= k else rng.sample(cent, k)


def test_restricted_action_defining_property():
    prob = load_preset("quartic-A4")
    W = prob.polynomial
    G = prob.build_group()
    for c in G.classes:
        s = build_sector(c, W.weights, W.degree)
        by_q: dict = {}
        for q, v in s.fixed_basis:
            by_q.setdefault(q, []).append(v)
        for h in centralizer_sample(s):
            hm = h.matrix()
            for q, R in restricted_action(s, h):
                vecs = by_q[q]
                for j, v in enumerate(vecs):
                    rhs = [sum((R[i][j] * vecs[i][k] for i in range(len(vecs))), ZERO) for k in range(W.n)]
                    assert mat_apply(hm, v) == rhs


def test_restricted_action_identity_and_self():
    prob = load_preset("quartic-A4")
    W = prob.polynomial
    G = prob.build_group()
    for c in G.classes:
        s = build_sector(c, W.weights, W.degree)
        if not s.n_g:
            continue
        ident = next(h for h in s.centralizer if h.is_identity())
        for which in (ident, s.rep):
            for _, R in restricted_action(s, which):
                k = len(R)
                assert R == [[ONE if i == j else ZERO for j in range(k)] for i in range(k)]


def test_restricted_action_permutation_dense_check():
    W = QHPoly.fermat(5, 5, 5, 5, 5)
    g = diag(zeta(5), zeta(5, 4), ONE, ONE, ONE)
    h = perm_matrix([0, 1, 3, 4, 2])
    G = generate_group([g, h])
    cls = G.class_of(GroupElement.from_matrix(g, G.field.n))
    s = build_sector(cls, W.weights, W.degree)
    assert s.n_g == 3
    hel = GroupElement.from_matrix(h, G.field.n)
    [(q, R)] = restricted_action(s, hel)
    assert q == Fraction(1, 5)
    # independent float check: B R = H B solved by least squares
    B = np.array([[to_float(x) for x in v] for _, v in s.fixed_basis]).T
    H = np.array([[to_float(ONE * x) for x in row] for row in h])
    R_ls, *_ = np.linalg.lstsq(B, H @ B, rcond=None)
    R_exact = np.array([[to_float(x) for x in row] for row in R])
    assert np.allclose(R_ls, R_exact, atol=1e-9)
    # a 3-cycle on the fixed coordinates
    assert sorted(round(abs(x)) for x in R_exact.flatten()) == [0] * 6 + [1] * 3


def test_restricted_action_inverse_pairs():
    prob = load_preset("quartic-A4")
    W = prob.polynomial
    G = prob.build_group()
    for c in G.classes:
        s = build_sector(c, W.weights, W.degree)
        if not s.n_g:
            continue
        for h in centralizer_sample(s):
            A = dict(restricted_action(s, h))
            B = dict(restricted_action(s, h.inverse()))
            for q, R in A.items():
                Rinv = B[q]
                k = len(R)
                prod = [[sum((R[i][t] * Rinv[t][j] for t in range(k)), ZERO) for j in range(k)] for i in range(k)]
                assert prod == [[ONE if i == j else ZERO for j in range(k)] for i in range(k)]
                ev = eigen_multiplicities(R)
                ev_inv = eigen_multiplicities(Rinv)
                assert {r.reduced(): m for r, m in ev_inv.items()} == {
                    type(r)(r.order, -r.exponent).reduced(): m for r, m in ev.items()}


def test_not_in_centralizer():
    prob = load_preset("quartic-A4")
    W = prob.polynomial
    G = generate_group(prob.generator_matrices())
    c = next(c for c in G.classes if len(c.centralizer) < G.order)
    s = build_sector(c, W.weights, W.degree)
    outsider = next(h for h in G.elements if not h.commutes(c.rep))
    with pytest.raises(NotInCentralizer):
        restricted_action(s, outsider)


def test_conjugate_representatives_give_same_contribution():
    prob = load_preset("quartic-A4")
    W = prob.polynomial
    G = generate_group(prob.generator_matrices())
    rng = random.Random(1)
    for c in G.classes:
        x = rng.choice(G.elements)
        xi = x.inverse()
        rep = x * c.rep * xi
        cent = tuple(x * h * xi for h in c.centralizer)
        moved = ConjugacyClass(rep, c.size, cent)
        a = sector_contribution(c, W.weights, W.degree)
        b = sector_contribution(moved, W.weights, W.degree)
        assert a.poly == b.poly


def transformed(W: QHPoly, gens, M):
    """W'(x) = W(Mx) and G' = M^-1 G M."""
    image = substitute(W, M)
    W2 = QHPoly.from_monomials([(c, e) for e, c in image.items()], W.n)
    out = []
    for g in gens:
        Mel, gel = elements_from_matrices([M, g])
        out.append((Mel.inverse() * gel * Mel).matrix())
    return W2, out


@pytest.mark.parametrize("name", ["quartic-A4", "octic-3", "quintic-maxdiag"])
def test_coordinate_change_invariance(name):
    prob = load_preset(name)
    W = prob.polynomial
    gens = prob.generator_matrices()
    rng = random.Random(name)
    blocks: dict = {}
    for i, w in enumerate(W.weights):
        blocks.setdefault(w, []).append(i)
    images = list(range(W.n))
    for idx in blocks.values():
        shuffled = idx[:]
        rng.shuffle(shuffled)
        for a, b in zip(idx, shuffled):
            images[a] = b
    P = perm_matrix(images)
    D = diag(*[zeta(12, rng.randrange(12)) for _ in range(W.n)])
    M = [[sum((P[i][k] * D[k][j] for k in range(W.n)), ZERO) for j in range(W.n)] for i in range(W.n)]
    W2, gens2 = transformed(W, gens, M)
    G1 = generate_group(gens)
    G2 = generate_group(gens2)
    assert poincare_polynomial(W, G1) == poincare_polynomial(W2, G2)
