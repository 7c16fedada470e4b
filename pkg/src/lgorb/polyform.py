"""Quasihomogeneous polynomials: weights, charges, central charge, symmetries."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .cyclo import ONE, ZERO, CycNum, as_cyc, zeta
from .errors import DegenerateInput, NoUniqueWeights, NotInvertible
from .linalg import nullspace

Exponents = tuple[int, ...]
Matrix = list[list[CycNum]]


def solve_weights(monomial_exponents: Sequence[Sequence[int]], n: int) -> tuple[tuple[int, ...], int]:
    """Unique primitive positive (weights, degree) with sum_i e_i w_i = d for every monomial."""
    if not monomial_exponents:
        raise NoUniqueWeights("no monomials")
    rows = []
    for e in monomial_exponents:
        if len(e) != n:
            raise NoUniqueWeights(f"exponent vector {tuple(e)} has length {len(e)}, expected {n}")
        rows.append([Fraction(x) for x in e] + [Fraction(-1)])
    basis = nullspace(rows, n + 1, Fraction(0), Fraction(1))
    if len(basis) != 1:
        raise NoUniqueWeights(f"weight system has a {len(basis)}-dimensional solution space")
    v = basis[0]
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    if ints[-1] < 0:
        ints = [-x for x in ints]
    if any(x <= 0 for x in ints):
        raise NoUniqueWeights(f"weights {ints[:-1]} / degree {ints[-1]} are not all positive")
    return tuple(ints[:-1]), ints[-1]


@dataclass(frozen=True)
class QHPoly:
    n: int
    monomials: tuple[tuple[CycNum, Exponents], ...]
    weights: tuple[int, ...]
    degree: int
    name: str = field(default="", compare=False)

    @classmethod
    def from_monomials(cls, terms: Iterable[tuple[object, Sequence[int]]], n: int | None = None,
                       name: str = "") -> QHPoly:
        acc: dict[Exponents, CycNum] = {}
        for coeff, exps in terms:
            e = tuple(int(x) for x in exps)
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            acc[e] = acc.get(e, ZERO) + as_cyc(coeff)
        monos = tuple((c, e) for e, c in sorted(acc.items(), reverse=True) if c)
        if not monos:
            raise NoUniqueWeights("polynomial is zero")
        if n is None:
            n = len(monos[0][1])
        weights, degree = solve_weights([e for _, e in monos], n)
        return cls(n, monos, weights, degree, name)

    @classmethod
    def fermat(cls, *exponents: int, name: str = "") -> QHPoly:
        n = len(exponents)
        terms = [(1, tuple(a if j == i else 0 for j in range(n))) for i, a in enumerate(exponents)]
        return cls.from_monomials(terms, n, name=name)

    @property
    def charges(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.degree) for w in self.weights)

    @property
    def blocks(self) -> dict[int, tuple[int, ...]]:
        """Variable indices grouped by weight, in order of first appearance."""
        out: dict[int, list[int]] = {}
        for i, w in enumerate(self.weights):
            out.setdefault(w, []).append(i)
        return {w: tuple(ix) for w, ix in out.items()}

    def as_dict(self) -> dict[Exponents, CycNum]:
        return {e: c for c, e in self.monomials}

    def __str__(self) -> str:
        parts = []
        for c, e in self.monomials:
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(mono if c == ONE else f"({c})*{mono}")
        return " + ".join(parts)


@dataclass(frozen=True)
class CentralChargeData:
    c_hat: Fraction
    cy: bool
    generalized_cy: bool


def central_charge(p: QHPoly) -> CentralChargeData:
    total = sum(p.charges, Fraction(0))
    c_hat = sum((1 - 2 * q for q in p.charges), Fraction(0))
    return CentralChargeData(c_hat, total == 1, total.denominator == 1 and total >= 0)


def grading_operator(p: QHPoly) -> Matrix:
    """diag(exp(2 pi i q_1), ..., exp(2 pi i q_n))."""
    return [[zeta(p.degree, w) if i == j else ZERO for j in range(p.n)] for i, w in enumerate(p.weights)]


def charge_report(p: QHPoly) -> list[int]:
    """Variables whose charge exceeds 1/2 although no x_i x_j monomial exists.

    Informational only: nothing downstream enforces it.
    """
    has_quadratic = any(sum(e) == 2 for _, e in p.monomials)
    if has_quadratic:
        return []
    return [i for i, q in enumerate(p.charges) if q > Fraction(1, 2)]


@dataclass(frozen=True)
class NondegeneracyReport:
    passed: bool
    witness: int | None = None  # 0-based index of a variable with no x_i^a x_j monomial

    def __bool__(self) -> bool:
        return self.passed


def _is_xia_xj(e: Exponents, i: int) -> bool:
    if e[i] < 1:
        return False
    rest = sum(e) - e[i]
    if rest == 0:
        return e[i] >= 2
    return rest == 1


def necessary_nondegeneracy_check(p: QHPoly) -> NondegeneracyReport:
    """Every variable must occur in a monomial of the shape x_i^a x_j.

    Necessary for an isolated critical point, not sufficient.
    """
    for i in range(p.n):
        if not any(_is_xia_xj(e, i) for _, e in p.monomials):
            return NondegeneracyReport(False, i)
    return NondegeneracyReport(True)


@dataclass(frozen=True)
class Atom:
    kind: str  # "loop", "chain" or "fermat"
    exponents: tuple[int, ...]
    variables: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind.capitalize()}({','.join(map(str, self.exponents))})"


def invertible_decomposition(p: QHPoly) -> list[Atom]:
    """Split an invertible polynomial into loop, chain and Fermat atoms."""
    if len(p.monomials) != p.n:
        raise NotInvertible(f"{len(p.monomials)} monomials for {p.n} variables")
    head_of: dict[int, tuple[int, int | None]] = {}
    for _, e in p.monomials:
        support = [i for i, k in enumerate(e) if k]
        if len(support) == 1:
            i = support[0]
            if e[i] < 2:
                raise NotInvertible(f"linear monomial in x{i + 1}")
            target = None
        elif len(support) == 2:
            i, j = support
            if e[j] == 1 and e[i] >= 2:
                target = j
            elif e[i] == 1 and e[j] >= 2:
                i, target = j, i
            else:
                raise NotInvertible(f"monomial {e} is not of the form x_i^a x_j")
        else:
            raise NotInvertible(f"monomial {e} involves more than two variables")
        if i in head_of:
            raise NotInvertible(f"x{i + 1} heads two monomials")
        head_of[i] = (e[i], target)
    if len(head_of) != p.n:
        raise NotInvertible("some variable heads no monomial")
    indeg: dict[int, int] = defaultdict(int)
    for _, t in head_of.values():
        if t is not None:
            indeg[t] += 1
    if any(c > 1 for c in indeg.values()):
        raise NotInvertible("a variable is the linear factor of two monomials")

    atoms: list[Atom] = []
    seen: set[int] = set()
    # chains start at variables nobody points to
    for start in range(p.n):
        if indeg[start] or start in seen:
            continue
        path = [start]
        while head_of[path[-1]][1] is not None:
            path.append(head_of[path[-1]][1])
        seen.update(path)
        exps = tuple(head_of[v][0] for v in path)
        atoms.append(Atom("fermat" if len(path) == 1 else "chain", exps, tuple(path)))
    for start in range(p.n):
        if start in seen:
            continue
        cyc = [start]
        while head_of[cyc[-1]][1] != start:
            cyc.append(head_of[cyc[-1]][1])
        seen.update(cyc)
        atoms.append(Atom("loop", tuple(head_of[v][0] for v in cyc), tuple(cyc)))
    atoms.sort(key=lambda a: min(a.variables))
    return atoms


def certify_nondegenerate(p: QHPoly, asserted: bool = False) -> list[Atom] | None:
    """Accept p only if it passes the necessary check and is invertible or asserted.

    Returns the atom decomposition when p is invertible.
    """
    report = necessary_nondegeneracy_check(p)
    if not report:
        raise DegenerateInput(f"no monomial of the form x{report.witness + 1}^a x_j")
    try:
        return invertible_decomposition(p)
    except NotInvertible as exc:
        if asserted:
            return None
        raise DegenerateInput(
            f"cannot certify nondegeneracy ({exc}); set assert_nondegenerate to accept"
        ) from exc


# ---------------------------------------------------------------------------
# action of matrices on polynomials

Poly = dict[Exponents, CycNum]


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, ZERO) + ca * cb
    return {e: c for e, c in out.items() if c}


def substitute(p: QHPoly, g: Sequence[Sequence[object]]) -> Poly:
    """(g.W)(x) = W(g.x_1, ..., g.x_n) with g.x_i = sum_j g_ij x_j."""
    n = p.n
    linear: list[Poly] = []
    for i in range(n):
        linear.append({tuple(1 if k == j else 0 for k in range(n)): as_cyc(g[i][j])
                       for j in range(n) if as_cyc(g[i][j])})
    powers: dict[tuple[int, int], Poly] = {}

    def power(i: int, k: int) -> Poly:
        if (i, k) not in powers:
            powers[(i, k)] = {(0,) * n: ONE} if k == 0 else _poly_mul(power(i, k - 1), linear[i])
        return powers[(i, k)]

    out: Poly = {}
    for c, e in p.monomials:
        term: Poly = {(0,) * n: c}
        for i, k in enumerate(e):
            if k:
                term = _poly_mul(term, power(i, k))
        for ee, cc in term.items():
            out[ee] = out.get(ee, ZERO) + cc
    return {e: c for e, c in out.items() if c}


def respects_blocks(p: QHPoly, g: Sequence[Sequence[object]]) -> bool:
    return all(not as_cyc(g[i][j]) for i in range(p.n) for j in range(p.n)
               if p.weights[i] != p.weights[j])


def check_invariance(p: QHPoly, g: Sequence[Sequence[object]]) -> bool:
    if len(g) != p.n or any(len(row) != p.n for row in g):
        return False
    if not respects_blocks(p, g):
        return False
    return substitute(p, g) == p.as_dict()
