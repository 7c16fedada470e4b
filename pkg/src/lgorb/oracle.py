"""Brute-force reference computations for Fermat polynomials with diagonal groups.

Nothing here touches the series machinery: sectors are enumerated as explicit
monomial bases x^e dx_F (0 <= e_i <= a_i - 2 on the fixed variables F) and
projected onto invariants by checking the character of every group element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Sequence

import numpy as np

from .cyclo import as_cyc, as_root_of_unity
from .errors import InputTooLarge, InvalidDivisor, NonPolynomialQuotient, NotDiagonal, NotFermat
from .poincare import BigradedPoly
from .polyform import QHPoly

DEFAULT_BOUND = 10_000_000


def fermat_exponents(W: QHPoly) -> tuple[int, ...]:
    """(a_1, ..., a_n) for W = sum c_i x_i^a_i, else NotFermat."""
    if len(W.monomials) != W.n:
        raise NotFermat(f"{len(W.monomials)} monomials for {W.n} variables")
    a = [0] * W.n
    for _, e in W.monomials:
        support = [i for i, k in enumerate(e) if k]
        if len(support) != 1 or e[support[0]] < 2 or a[support[0]]:
            raise NotFermat(f"monomial {e} is not a pure power of a new variable")
        a[support[0]] = e[support[0]]
    return tuple(a)


def diagonal_angles(mat) -> tuple[Fraction, ...]:
    """Diagonal matrix of roots of unity -> exponents theta_i with entries exp(2 pi i theta_i)."""
    if hasattr(mat, "matrix"):
        mat = mat.matrix()
    n = len(mat)
    out = []
    for i in range(n):
        for j in range(n):
            if i != j and as_cyc(mat[i][j]):
                raise NotDiagonal(f"entry ({i + 1}, {j + 1}) is nonzero")
        r = as_root_of_unity(as_cyc(mat[i][i]))
        if r is None:
            raise NotDiagonal(f"diagonal entry {mat[i][i]} is not a root of unity")
        out.append(r.log)
    return tuple(out)


@dataclass
class DiagonalGroup:
    """Abelian group of diagonal matrices stored as integer angle vectors mod L."""

    L: int
    elements: np.ndarray  # shape (|G|, n), entries in [0, L)

    @classmethod
    def from_generators(cls, gens: Sequence) -> DiagonalGroup:
        angles = [diagonal_angles(g) for g in gens]
        L = lcm(1, *(x.denominator for v in angles for x in v))
        vecs = [tuple(int(x * L) % L for x in v) for v in angles]
        n = len(vecs[0])
        seen = {(0,) * n}
        frontier = [(0,) * n]
        while frontier:
            nxt = []
            for x in frontier:
                for v in vecs:
                    y = tuple((a + b) % L for a, b in zip(x, v))
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return cls(L, np.array(sorted(seen), dtype=np.int64))

    @property
    def order(self) -> int:
        return len(self.elements)


def _age(angles: Sequence[int], L: int) -> Fraction:
    return sum((Fraction(a, L) for a in angles), Fraction(0))


def _invariant_monomials(a: Sequence[int], fixed: Sequence[int], G: DiagonalGroup,
                         bound: int) -> list[tuple[int, ...]]:
    """Exponent vectors e on the fixed variables such that x^e dx_F is G-invariant."""
    ranges = [range(a[i] - 1) for i in fixed]
    count = 1
    for r in ranges:
        count *= len(r)
    if not fixed:
        return [()]
    A = np.unique(G.elements[:, list(fixed)], axis=0)
    if count * len(A) > bound:
        raise InputTooLarge(f"{count} monomials x {len(A)} characters exceeds the bound {bound}")
    if count == 0:
        return []
    E = np.array(list(product(*ranges)), dtype=np.int64).reshape(count, len(fixed))
    phases = ((E + 1) @ A.T) % G.L
    keep = ~phases.any(axis=1)
    return [tuple(int(x) for x in row) for row in E[keep]]


def fermat_sector_dimensions(W: QHPoly, gens: Sequence, g, bound: int = DEFAULT_BOUND,
                             group: DiagonalGroup | None = None) -> BigradedPoly:
    """Bigraded dimensions of the invariant part of the g-twisted sector."""
    a = fermat_exponents(W)
    G = group or DiagonalGroup.from_generators(gens)
    L = G.L
    theta = [int(x * L) % L for x in diagonal_angles(g)]
    return _sector(a, W.charges, theta, G, bound, {})


def _sector(a, q, theta, G: DiagonalGroup, bound: int, cache: dict) -> BigradedPoly:
    L = G.L
    fixed = tuple(i for i, t in enumerate(theta) if t == 0)
    moved = sum((q[i] for i in range(len(a)) if theta[i]), Fraction(0))
    age_g = _age(theta, L)
    age_ginv = _age([(L - t) % L for t in theta], L)
    if fixed not in cache:
        cache[fixed] = _invariant_monomials(a, fixed, G, bound)
    out: dict = {}
    for e in cache[fixed]:
        ch = sum((k * q[i] for k, i in zip(e, fixed)), Fraction(0))
        key = (ch + age_g - moved, ch + age_ginv - moved)
        out[key] = out.get(key, 0) + 1
    return BigradedPoly(out)


def oracle_table(W: QHPoly, gens: Sequence, bound: int = DEFAULT_BOUND) -> BigradedPoly:
    """Sum of fermat_sector_dimensions over every element (all classes are singletons)."""
    a = fermat_exponents(W)
    G = DiagonalGroup.from_generators(gens)
    cache: dict = {}
    total = BigradedPoly()
    for theta in G.elements:
        total = total + _sector(a, W.charges, [int(t) for t in theta], G, bound, cache)
    return total


def oracle_signed_count(W: QHPoly, gens: Sequence, bound: int = DEFAULT_BOUND) -> int:
    """sum (-1)^(p - q) over the oracle basis."""
    out = 0
    for (p, q), c in oracle_table(W, gens, bound).items():
        d = p - q
        if d.denominator != 1:
            raise NotDiagonal("signed count needs integral p - q")
        out += c if d.numerator % 2 == 0 else -c
    return out


def milnor_hilbert_series(weights: Sequence[int], d: int) -> list[int]:
    """Coefficients in s = t^(1/d) of prod (s^(d - w_i) - 1) / (s^(w_i) - 1)."""
    num = [1]
    den = [1]
    for w in weights:
        if not 0 < w < d:
            raise NonPolynomialQuotient(f"weight {w} is not in (0, {d})")
        num = _pmul(num, [-1] + [0] * (d - w - 1) + [1])
        den = _pmul(den, [-1] + [0] * (w - 1) + [1])
    quo, rem = _pdivmod(num, den)
    if any(rem):
        raise NonPolynomialQuotient("the Milnor series is not a polynomial for these weights")
    return quo


def _pmul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pdivmod(a: list[int], b: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic (up to sign) integer polynomial, lowest degree first."""
    a = list(a)
    lead = b[-1]
    if lead not in (1, -1):
        raise NonPolynomialQuotient("divisor is not monic")
    q = [0] * max(1, len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * lead
        q[k] = c
        for j, y in enumerate(b):
            a[k + j] -= c * y
    return q, a


def an_closed_form(n: int, l: int) -> BigradedPoly:
    """Closed form for W = x^n orbifolded by the cyclic group generated by exp(2 pi i l / n)."""
    if n < 2 or l < 1 or n % l:
        raise InvalidDivisor(f"{l} does not divide {n}")
    F = Fraction
    terms: list = []
    for i in range(1, l + 1):
        e = 1 - F(1, n) - F(i, l)
        terms.append(((e, e), 1))
    for i in range(1, n // l + 1):
        terms.append(((F(l * i - 1, n), F(n - l * i - 1, n)), 1))
    terms.append(((F(-1, n), F(-1, n)), -1))
    terms.append(((F(n - 1, n), F(-1, n)), -1))
    return BigradedPoly(terms)
