"""Bigraded Poincare polynomials of orbifolds via exact truncated series.

For each conjugacy class representative g the sector contributes

    u^age(g) v^age(g^-1) (uv)^(-moved) * (1/|C(g)|) sum_h prod_i
        (lam_i - (uv)^(1 - q_i)) / (1 - lam_i (uv)^q_i)

where the product runs over a basis of the fixed space of g on which h acts
with eigenvalues lam_i.  With s = (uv)^(1/d) each factor is
(lam - s^(d - w)) / (1 - lam s^w), a power series in s whose sum over the
centralizer is a polynomial of degree at most sum_i (d - 2 w_i).
"""

from __future__ import annotations

import random
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .cyclo import CycNum
from .errors import (
    IdentityViolation,
    IllDefinedIndex,
    NonIntegralCoefficient,
    PreconditionViolated,
    TruncationOverflow,
)
from .grp import ConjugacyClass
from .polyform import QHPoly, central_charge, check_invariance
from .sectors import SectorData, build_sector, centralizer_spectra

Bidegree = tuple[Fraction, Fraction]
_INT64_SAFE = 2**62


# ---------------------------------------------------------------------------
# bigraded polynomials with rational exponents


def _fmt_exp(var: str, e: Fraction) -> str:
    if e == 0:
        return ""
    if e == 1:
        return var
    if e.denominator == 1:
        return f"{var}^{e.numerator}"
    return f"{var}^({e.numerator}/{e.denominator})"


def fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class BigradedPoly:
    """Finite sum of c u^p v^q with rational p, q and integer c."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Bidegree, int] | Iterable[tuple[Bidegree, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Bidegree, int] = {}
        for (p, q), c in items:
            key = (Fraction(p), Fraction(q))
            acc[key] = acc.get(key, 0) + int(c)
        self._terms = {k: v for k, v in sorted(acc.items()) if v}

    @property
    def terms(self) -> dict[Bidegree, int]:
        return dict(self._terms)

    def __getitem__(self, pq: tuple) -> int:
        return self._terms.get((Fraction(pq[0]), Fraction(pq[1])), 0)

    def items(self):
        return self._terms.items()

    def __iter__(self):
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, BigradedPoly) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __add__(self, other: BigradedPoly) -> BigradedPoly:
        return BigradedPoly(list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: BigradedPoly) -> BigradedPoly:
        return BigradedPoly(list(self._terms.items()) + [(k, -v) for k, v in other._terms.items()])

    def scale(self, c: int) -> BigradedPoly:
        return BigradedPoly({k: c * v for k, v in self._terms.items()})

    def swap(self) -> BigradedPoly:
        return BigradedPoly({(q, p): c for (p, q), c in self._terms.items()})

    def total(self) -> int:
        return sum(self._terms.values())

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        order = sorted(self._terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0]))
        parts = []
        for (p, q), c in order:
            mono = "*".join(s for s in (_fmt_exp("u", p), _fmt_exp("v", q)) if s)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"BigradedPoly({self})"


# ---------------------------------------------------------------------------
# per-sector series


def truncation_bound(sector: SectorData) -> int:
    d = sector.degree
    return sum(dim * (d - 2 * w) for w, dim in sector.block_dims.items())


def _magnitude_bound(spectra: Counter, T: int) -> int:
    total = sum(spectra.values())
    worst = 1
    for spec in spectra:
        b = 1
        for w, _ in spec:
            b *= 2 * (T // w + 1)
        worst = max(worst, b)
    return worst * total


def series_coefficients(spectra: Counter, degree: int, T: int, backend: str | None = None) -> list[int]:
    """Coefficients c_0..c_T of (1/|C|) sum_h prod (lam - s^(d-w)) / (1 - lam s^w)."""
    total = sum(spectra.values())
    M = lcm(1, *(e.denominator for spec in spectra for _, e in spec))
    dtype = np.int64 if _magnitude_bound(spectra, T) < _INT64_SAFE else object
    out = np.zeros((T + 1, M), dtype=dtype)
    for spec, count in sorted(spectra.items()):
        exps = [int(e * M) for _, e in spec]
        ws = [w for w, _ in spec]
        tops = [degree - w for w in ws]
        _kernels.accumulate_series(out, exps, ws, tops, count, backend)
    coeffs = []
    for t in range(T + 1):
        row = out[t]
        val = CycNum(M, {r: int(row[r]) for r in range(M) if row[r]}) if M > 1 else CycNum.rational(int(row[0]))
        if not val.is_rational():
            raise NonIntegralCoefficient(f"coefficient of s^{t} is not rational: {val}")
        c = val.to_fraction() / total
        if c.denominator != 1 or c < 0:
            raise NonIntegralCoefficient(f"coefficient of s^{t} is {c}")
        coeffs.append(int(c))
    return coeffs


def _primes_from(start: int) -> Iterable[int]:
    p = max(2, start)
    while True:
        if all(p % k for k in range(2, int(p**0.5) + 1)):
            yield p
        p += 1


def _circulant_sum(C: int, e: int, dtype) -> np.ndarray:
    """Matrix of multiplication by sum_j j x^j with x = z^e in Z[C_C]."""
    s = np.zeros(C, dtype=dtype)
    for j in range(C):
        s[(e * j) % C] += j
    idx = (np.arange(C)[:, None] - np.arange(C)[None, :]) % C
    return s[idx]


def truncation_guard(spectra: Counter, degree: int, coeffs: Sequence[int], seed: int = 0,
                     points: int = 3) -> None:
    """Compare the rational function with the polynomial at roots of unity s0 = zeta_p^r.

    Everything is evaluated exactly in the group ring Z[C_C], C = lcm(M, p),
    using 1/(1 - x) = -(1/C) sum_{j<C} j x^j for x^C = 1, x != 1.
    """
    if not spectra or not any(spectra):
        return
    total = sum(spectra.values())
    M = lcm(1, *(e.denominator for spec in spectra for _, e in spec))
    maxw = max(w for spec in spectra for w, _ in spec)
    primes = []
    for p in _primes_from(maxw + 1):
        if M % p:
            primes.append(p)
        if len(primes) == points:
            break
    rng = random.Random(seed)
    n_factors = max(len(spec) for spec in spectra)
    for p in primes:
        r = rng.randrange(1, p)
        C = M * p
        dtype = np.int64 if total * C ** (2 * n_factors + 1) * (sum(coeffs) + 1) < _INT64_SAFE else object
        circ: dict[int, np.ndarray] = {}
        lhs = np.zeros(C, dtype=dtype)
        for spec, count in spectra.items():
            acc = np.zeros(C, dtype=dtype)
            acc[0] = count
            for w, e in spec:
                lam = int(e * M) * p % C
                b = (degree - w) * r * M % C
                acc = np.roll(acc, lam) - np.roll(acc, b)
                x = (lam + w * r * M) % C
                if x not in circ:
                    circ[x] = _circulant_sum(C, x, dtype)
                acc = circ[x] @ acc
            # each factor carries -1/C; pad the shorter products
            pad = n_factors - len(spec)
            lhs += acc * (-C) ** pad
        rhs = np.zeros(C, dtype=dtype)
        for t, c in enumerate(coeffs):
            rhs[(t * r * M) % C] += c
        rhs = rhs * total * (-C) ** n_factors
        diff = CycNum(C, {i: int(v) for i, v in enumerate(lhs - rhs) if v})
        if diff:
            raise TruncationOverflow(f"series and rational function disagree at s = E({p})^{r}")


@dataclass
class SectorContribution:
    sector: SectorData
    series: list[int]
    poly: BigradedPoly


def sector_series(sector: SectorData, backend: str | None = None, guard: bool = True,
                  cache: dict | None = None) -> list[int]:
    """Integer coefficients in s = (uv)^(1/d) of the averaged product for one sector.

    ``cache`` memoizes spectra and series across the sectors of one group.
    """
    spectra = centralizer_spectra(sector, cache)
    T = truncation_bound(sector)
    key = ("series", T, sector.degree, tuple(sorted(spectra.items())))
    if cache is not None and key in cache:
        return cache[key]
    coeffs = series_coefficients(spectra, sector.degree, T, backend)
    if guard:
        truncation_guard(spectra, sector.degree, coeffs, seed=zlib.crc32(sector.rep.key))
    if cache is not None:
        cache[key] = coeffs
    return coeffs


def sector_contribution(cls: ConjugacyClass, weights: Sequence[int], degree: int,
                        backend: str | None = None, guard: bool = True,
                        cache: dict | None = None) -> SectorContribution:
    sector = build_sector(cls, weights, degree)
    coeffs = sector_series(sector, backend, guard, cache)
    p0 = sector.age_g - sector.moved_charge_sum
    q0 = sector.age_ginv - sector.moved_charge_sum
    poly = BigradedPoly({(p0 + Fraction(t, degree), q0 + Fraction(t, degree)): c
                         for t, c in enumerate(coeffs) if c})
    return SectorContribution(sector, coeffs, poly)


def _worker(args) -> tuple[BigradedPoly, list[int]]:
    cls, weights, degree, backend, guard = args
    c = sector_contribution(cls, weights, degree, backend, guard)
    return c.poly, c.series


def sector_contributions(W: QHPoly, G, workers: int = 1, backend: str | None = None,
                         guard: bool = True) -> list[SectorContribution]:
    classes = list(G.classes)
    if workers <= 1 or len(classes) < 2:
        cache: dict = {}
        return [sector_contribution(c, W.weights, W.degree, backend, guard, cache) for c in classes]
    jobs = [(c, W.weights, W.degree, backend, guard) for c in classes]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_worker, jobs))
    out = []
    for c, (poly, series) in zip(classes, results):
        out.append(SectorContribution(build_sector(c, W.weights, W.degree), series, poly))
    return out


def poincare_polynomial(W: QHPoly, G, workers: int = 1, backend: str | None = None,
                        guard: bool = True, check_symmetry: bool = True,
                        post_checks: bool = True) -> BigradedPoly:
    if check_symmetry:
        for g in G.generators:
            if not check_invariance(W, g.matrix()):
                raise PreconditionViolated(f"generator {g!r} does not preserve W")
    contribs = sector_contributions(W, G, workers, backend, guard)
    P = BigradedPoly()
    for c in contribs:
        P = P + c.poly
    if post_checks:
        c_hat = central_charge(W).c_hat
        for name, bad in (("Hodge symmetry", hodge_symmetry_check(P)),
                          ("Serre duality", serre_duality_check(P, c_hat))):
            if bad is not None:
                raise IdentityViolation(f"{name} fails at bidegree {bad}")
    return P


# ---------------------------------------------------------------------------
# tables and identities


@dataclass
class BigradedTable:
    entries: dict[Bidegree, int]
    c_hat: Fraction | None = None
    group_order: int | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __getitem__(self, pq) -> int:
        return self.entries.get((Fraction(pq[0]), Fraction(pq[1])), 0)

    def rows(self) -> list[tuple[Fraction, Fraction, int]]:
        return [(p, q, h) for (p, q), h in sorted(self.entries.items())]

    def to_csv(self) -> str:
        lines = ["p,q,h"]
        lines += [f"{fmt_fraction(p)},{fmt_fraction(q)},{h}" for p, q, h in self.rows()]
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        rows = [(fmt_fraction(p), fmt_fraction(q), str(h)) for p, q, h in self.rows()]
        head = ("p", "q", "h")
        widths = [max(len(r[i]) for r in rows + [head]) for i in range(3)]
        out = ["  ".join(h.rjust(wd) for h, wd in zip(head, widths))]
        out += ["  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in rows]
        return "\n".join(out) + "\n"

    def poly(self) -> BigradedPoly:
        return BigradedPoly(self.entries)


def hodge_table(P: BigradedPoly, c_hat: Fraction | None = None, group_order: int | None = None,
                name: str = "") -> BigradedTable:
    for pq, c in P.items():
        if c <= 0:
            raise NonIntegralCoefficient(f"entry at {pq} is {c}")
    return BigradedTable(P.terms, c_hat, group_order, name)


def read_geometry_csv(text: str) -> BigradedTable:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or [c.strip() for c in lines[0].split(",")] != ["p", "q", "h"]:
        raise ValueError("geometry CSV must start with the header p,q,h")
    entries: dict[Bidegree, int] = {}
    for ln in lines[1:]:
        p, q, h = (c.strip() for c in ln.split(","))
        if int(h):
            entries[(Fraction(p), Fraction(q))] = int(h)
    return BigradedTable(entries)


def _as_poly(P) -> BigradedPoly:
    return P.poly() if isinstance(P, BigradedTable) else P


def hodge_symmetry_check(P) -> Bidegree | None:
    """None on success, else a bidegree where h^{p,q} != h^{q,p}."""
    P = _as_poly(P)
    for (p, q), c in P.items():
        if P[(q, p)] != c:
            return (p, q)
    return None


def serre_duality_check(P, c_hat: Fraction) -> Bidegree | None:
    P = _as_poly(P)
    for (p, q), c in P.items():
        if P[(c_hat - p, c_hat - q)] != c:
            return (p, q)
    return None


def mirror_relation_check(PA, PB, c_hat: Fraction) -> Bidegree | None:
    """None when h^{p,q}(A) = h^{c-p,q}(B) for all p, q."""
    A, B = _as_poly(PA), _as_poly(PB)
    for (p, q), c in A.items():
        if B[(c_hat - p, q)] != c:
            return (p, q)
    for (p, q), c in B.items():
        if A[(c_hat - p, q)] != c:
            return (c_hat - p, q)
    return None


def _diamond_support(c: int) -> set[tuple[int, int]]:
    return {(p, q) for p in range(c + 1) for q in range(c + 1) if p == q or p + q == c}


def hodge_diamond_shape_check(P, c_hat: Fraction) -> Bidegree | None:
    """None when P has the shape of a Calabi-Yau Hodge diamond of dimension c_hat.

    Integer bidegrees in [0, c]^2, corner entries 1, and h^{p,0} = 0 for
    0 < p < c.  For c <= 3 the support must also lie on the two diagonals
    p = q and p + q = c.
    """
    P = _as_poly(P)
    if c_hat.denominator != 1 or c_hat < 0:
        return (c_hat, c_hat)
    c = int(c_hat)
    for (p, q) in P:
        if p.denominator != 1 or q.denominator != 1 or not (0 <= p <= c and 0 <= q <= c):
            return (p, q)
        if c <= 3 and (int(p), int(q)) not in _diamond_support(c):
            return (p, q)
        if (q == 0 and 0 < p < c) or (p == 0 and 0 < q < c):
            return (p, q)
    for corner in ((0, 0), (c, c), (c, 0), (0, c)):
        if P[corner] != 1:
            return (Fraction(corner[0]), Fraction(corner[1]))
    return None


def witten_index(P) -> int:
    """P(-1, -1) read as sum (-1)^(p-q) h^{p,q}; needs p - q integral throughout."""
    P = _as_poly(P)
    total = 0
    for (p, q), c in P.items():
        d = p - q
        if d.denominator != 1:
            raise IllDefinedIndex(f"bidegree ({p}, {q}) has non-integral p - q")
        total += c if d.numerator % 2 == 0 else -c
    return total


def e_polynomial_pq(P) -> BigradedPoly:
    P = _as_poly(P)
    out = {}
    for (p, q), c in P.items():
        d = p - q
        if d.denominator != 1:
            raise IllDefinedIndex(f"bidegree ({p}, {q}) has non-integral p - q")
        out[(p, q)] = c if d.numerator % 2 == 0 else -c
    return BigradedPoly(out)


def e_polynomial_z2(contributions: Sequence[SectorContribution]) -> BigradedPoly:
    """Sign each sector by (-1)^(n - n_g)."""
    out = BigradedPoly()
    for c in contributions:
        sign = -1 if (c.sector.n - c.sector.n_g) % 2 else 1
        out = out + c.poly.scale(sign)
    return out


def compare_with_geometry(P, geometry: BigradedTable, c_hat: Fraction) -> Bidegree | None:
    """Check h^{p,q}(W, G) = h^{c-p,q} of the supplied geometric table."""
    return mirror_relation_check(P, geometry, c_hat)
