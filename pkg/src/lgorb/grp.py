"""Finite matrix groups over cyclotomic fields.

Elements are stored packed: an integer array ``num`` of shape (n, n, phi)
holding power-basis coordinates over Q(zeta_N), and a positive common
denominator ``den``.  In lowest terms this encoding is canonical, so the raw
bytes serve as a hash key.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .cyclo import ONE, ZERO, CycloField, CycNum, RootOfUnity, as_cyc, as_root_of_unity
from .errors import (
    ElementNotInGroup,
    NonIntegerMultiplicity,
    NotInvertible,
    OrderCapExceeded,
    PreconditionViolated,
)
from .linalg import det as _det
from .linalg import nullspace

DEFAULT_CAP = 200_000
_INT64_SAFE = 2**62


def _normalize(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    if num.dtype == object:
        g = den
        for x in num.flat:
            g = gcd(g, int(x))
        if g != 1:
            num = num // g
            den //= g
        if all(abs(int(x)) < _INT64_SAFE for x in num.flat):
            num = num.astype(np.int64)
        return num, den
    g = int(np.gcd.reduce(num, axis=None)) if num.size else 0
    g = gcd(g, den)
    if g > 1:
        num = num // g
        den //= g
    return num, den


_ROOT_TABLES: dict[int, dict[bytes, Fraction]] = {}


def _root_table(fld: CycloField) -> dict[bytes, Fraction]:
    """Packed coordinates of +-zeta_N^e mapped to the exponent of the root of unity."""
    t = _ROOT_TABLES.get(fld.n)
    if t is None:
        t = {}
        n = fld.n
        big = lcm(n, 2)
        for e in range(n):
            row = np.ascontiguousarray(fld.table[e], dtype=np.int64)
            t[row.tobytes()] = Fraction(e, n)
            t[(-row).tobytes()] = (Fraction(e, n) + Fraction(big // 2, big)) % 1
        _ROOT_TABLES[n] = t
    return t


class GroupElement:
    """Invertible finite-order matrix over Q(zeta_N) in packed form."""

    __slots__ = ("num", "den", "field", "_key", "_order", "_diag", "_logs")

    def __init__(self, num: np.ndarray, den: int, fld: CycloField):
        num, den = _normalize(num, int(den))
        self.num = num
        self.den = den
        self.field = fld
        self._key: bytes | None = None
        self._order: int | None = None
        self._diag: bool | None = None
        self._logs: tuple[Fraction, ...] | None = None

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[object]], conductor: int | None = None) -> GroupElement:
        mat = [[as_cyc(x) for x in row] for row in rows]
        n = len(mat)
        if any(len(row) != n for row in mat):
            raise ValueError("matrix must be square")
        if conductor is None:
            conductor = lcm(1, *(x.conductor for row in mat for x in row))
        fld = CycloField(conductor)
        vecs = [[fld.pack(x) for x in row] for row in mat]
        den = lcm(1, *(c.denominator for row in vecs for v in row for c in v))
        num = np.array([[[int(c * den) for c in v] for v in row] for row in vecs], dtype=object)
        return cls(num, den, fld)

    @classmethod
    def identity(cls, n: int, fld: CycloField) -> GroupElement:
        num = np.zeros((n, n, fld.phi), dtype=np.int64)
        for i in range(n):
            num[i, i, 0] = 1
        return cls(num, 1, fld)

    @property
    def n(self) -> int:
        return self.num.shape[0]

    @property
    def key(self) -> bytes:
        if self._key is None:
            self._key = self.den.to_bytes(8, "big") + np.ascontiguousarray(self.num, dtype=np.int64).tobytes()
        return self._key

    def __hash__(self) -> int:
        return hash(self.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElement) and self.field.n == other.field.n and self.key == other.key

    def __lt__(self, other: GroupElement) -> bool:
        return self.key < other.key

    def lift(self, fld: CycloField) -> GroupElement:
        if fld.n == self.field.n:
            return self
        return GroupElement.from_matrix(self.matrix(), fld.n)

    def __mul__(self, other: GroupElement) -> GroupElement:
        a, b = self.num, other.num
        bound = int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0))
        bound *= self.n * self.field.phi * max(1, int(np.abs(self.field.mul_val).max(initial=1)))
        if bound >= _INT64_SAFE or a.dtype == object or b.dtype == object:
            a, b = a.astype(object), b.astype(object)
        prod = _kernels.matmul(a, b, self.field)
        return GroupElement(prod, self.den * other.den, self.field)

    def __pow__(self, e: int) -> GroupElement:
        if e < 0:
            return self.inverse() ** (-e)
        result = GroupElement.identity(self.n, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_identity(self) -> bool:
        if self.den != 1:
            return False
        ident = np.zeros_like(self.num)
        for i in range(self.n):
            ident[i, i, 0] = 1
        return bool(np.array_equal(self.num, ident))

    def order(self, cap: int = DEFAULT_CAP) -> int:
        if self._order is None:
            x, k = self, 1
            while not x.is_identity():
                x = x * self
                k += 1
                if k > cap:
                    raise OrderCapExceeded(f"element order exceeds {cap}")
            self._order = k
        return self._order

    def inverse(self) -> GroupElement:
        return self ** (self.order() - 1) if self.order() > 1 else self

    def entry(self, i: int, j: int) -> CycNum:
        return self.field.unpack(self.num[i, j], self.den)

    def matrix(self) -> list[list[CycNum]]:
        return [[self.entry(i, j) for j in range(self.n)] for i in range(self.n)]

    def is_diagonal(self) -> bool:
        if self._diag is None:
            mask = ~np.eye(self.n, dtype=bool)
            self._diag = not np.any(self.num[mask])
        return self._diag

    def diagonal_logs(self) -> tuple[Fraction, ...]:
        """Eigenvalue exponents k/m in [0, 1) of a diagonal element, in coordinate order."""
        if self._logs is None:
            if not self.is_diagonal():
                raise ValueError("element is not diagonal")
            logs = []
            table = _root_table(self.field)
            for i in range(self.n):
                e = table.get(self.num[i, i].tobytes()) if self.den == 1 else None
                if e is None:
                    r = as_root_of_unity(self.entry(i, i))
                    if r is None:
                        raise NonIntegerMultiplicity(f"diagonal entry {self.entry(i, i)} is not a root of unity")
                    e = r.log
                logs.append(e)
            self._logs = tuple(logs)
        return self._logs

    def trace(self) -> CycNum:
        return self.field.unpack(np.einsum("iip->p", self.num), self.den)

    def det(self) -> CycNum:
        return _det(self.matrix(), ZERO, ONE)

    def commutes(self, other: GroupElement) -> bool:
        return (self * other).key == (other * self).key

    def __repr__(self) -> str:
        rows = ["[" + ", ".join(str(x) for x in row) + "]" for row in self.matrix()]
        return "[" + "; ".join(rows) + "]"


def common_field(mats: Iterable[Sequence[Sequence[object]]]) -> int:
    return lcm(1, *(as_cyc(x).conductor for m in mats for row in m for x in row))


def elements_from_matrices(mats: Sequence[Sequence[Sequence[object]]]) -> list[GroupElement]:
    mats = list(mats)
    if not mats:
        raise ValueError("at least one generator is required")
    n = len(mats[0])
    for m in mats:
        if len(m) != n or any(len(r) != n for r in m):
            raise ValueError("generators must be square matrices of equal size")
    conductor = common_field(mats)
    out = [GroupElement.from_matrix(m, conductor) for m in mats]
    for g, m in zip(out, mats):
        if not _det(g.matrix(), ZERO, ONE):
            raise NotInvertible(f"generator {g!r} is singular")
    return out


# ---------------------------------------------------------------------------
# eigenvalues via the trace DFT


def _dft_multiplicities(traces: Sequence[CycNum], m: int) -> dict[int, int]:
    """mult(k) = (1/m) sum_j traces[j] zeta_m^(-kj), each forced to a nonnegative integer."""
    big = lcm(m, *(t.conductor for t in traces))
    step_m = big // m
    vecs = []
    for t in traces:
        e = t.embed(big) if t.conductor != big else t
        vecs.append(e.coeffs)
    out: dict[int, int] = {}
    for k in range(m):
        acc = [Fraction(0)] * big
        for j, coeffs in enumerate(vecs):
            shift = (-k * j * step_m) % big
            for e, c in coeffs.items():
                acc[(e + shift) % big] += c
        val = CycNum(big, {e: c for e, c in enumerate(acc) if c}) / m
        if not val.is_rational():
            raise NonIntegerMultiplicity(f"multiplicity of zeta_{m}^{k} is {val}")
        f = val.to_fraction()
        if f.denominator != 1 or f < 0:
            raise NonIntegerMultiplicity(f"multiplicity of zeta_{m}^{k} is {f}")
        if f:
            out[k] = int(f)
    return out


def eigen_multiplicities(h: GroupElement | Sequence[Sequence[object]], order: int | None = None) -> dict[RootOfUnity, int]:
    """Eigenvalue multiset of a finite-order matrix, keyed by reduced root of unity."""
    if not isinstance(h, GroupElement):
        h = GroupElement.from_matrix(h)
    if h.is_diagonal():
        out: Counter = Counter(RootOfUnity(e.denominator, e.numerator) for e in h.diagonal_logs())
        return dict(out)
    m = order or h.order()
    traces = []
    x = GroupElement.identity(h.n, h.field)
    for _ in range(m):
        traces.append(x.trace())
        x = x * h
    mult = _dft_multiplicities(traces, m)
    if sum(mult.values()) != h.n:
        raise NonIntegerMultiplicity("multiplicities do not add up to the dimension")
    return {RootOfUnity(m, k).reduced(): c for k, c in mult.items()}


def age(h: GroupElement | Sequence[Sequence[object]]) -> Fraction:
    return sum((r.log * c for r, c in eigen_multiplicities(h).items()), Fraction(0))


def fixed_dimension(h: GroupElement) -> int:
    return sum(c for r, c in eigen_multiplicities(h).items() if r.exponent == 0)


def fixed_subspace(g: GroupElement, weights: Sequence[int] | None = None) -> list[tuple[int, list[CycNum]]]:
    """Basis of ker(E - g), computed per weight block; each vector tagged by its weight."""
    n = g.n
    weights = list(weights) if weights is not None else [1] * n
    mat = g.matrix()
    out: list[tuple[int, list[CycNum]]] = []
    seen: list[int] = []
    for w in weights:
        if w in seen:
            continue
        seen.append(w)
        idx = [i for i in range(n) if weights[i] == w]
        rows = [[(ONE if i == j else ZERO) - mat[i][j] for j in idx] for i in idx]
        for v in nullspace(rows, len(idx), ZERO, ONE):
            full = [ZERO] * n
            for pos, i in enumerate(idx):
                full[i] = v[pos]
            out.append((w, full))
    return out


def is_special_linear(g: GroupElement) -> bool:
    return g.det() == ONE


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class ConjugacyClass:
    rep: GroupElement
    size: int
    centralizer: tuple[GroupElement, ...]
    members: tuple[GroupElement, ...] = field(default=(), repr=False)

    @property
    def centralizer_order(self) -> int:
        return len(self.centralizer)


def _class_sort_key(c: ConjugacyClass) -> tuple[int, bytes]:
    return (c.rep.order(), c.rep.key)


def _extend_subgroup(elements: list[GroupElement], index: set[bytes], gens: list[GroupElement],
                     z: GroupElement) -> None:
    """Grow the subgroup ``elements`` (closed under ``gens``) to <elements, z> in place."""
    base = list(elements)
    gens.append(z)
    reps = [z]
    for h in base:
        e = h * z
        index.add(e.key)
        elements.append(e)
    i = 0
    while i < len(reps):
        r = reps[i]
        i += 1
        for s in gens:
            e = r * s
            if e.key in index:
                continue
            reps.append(e)
            for h in base:
                x = h * e
                index.add(x.key)
                elements.append(x)


class MatGroup:
    """Finite group closed from generator matrices.

    Elements are listed in breadth-first order starting from the identity.
    """

    def __init__(self, generators: Sequence[GroupElement], cap: int = DEFAULT_CAP):
        if not generators:
            raise ValueError("at least one generator is required")
        self.field = generators[0].field
        self.n = generators[0].n
        self.cap = cap
        self.generators = tuple(generators)
        for g in self.generators:
            g.order(cap)
        ident = GroupElement.identity(self.n, self.field)
        self.elements: list[GroupElement] = [ident]
        self.index: dict[bytes, int] = {ident.key: 0}
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for s in self.generators:
                y = x * s
                if y.key not in self.index:
                    if len(self.elements) >= cap:
                        raise OrderCapExceeded(f"group order exceeds cap {cap}")
                    self.index[y.key] = len(self.elements)
                    self.elements.append(y)
                    queue.append(y)
        self._classes: list[ConjugacyClass] | None = None
        self._abelian: bool | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements)

    def __contains__(self, g: GroupElement) -> bool:
        return g.key in self.index

    def is_abelian(self) -> bool:
        if self._abelian is None:
            gens = self.generators
            self._abelian = all(a.commutes(b) for i, a in enumerate(gens) for b in gens[i + 1:])
        return self._abelian

    def is_special_linear(self) -> bool:
        return all(is_special_linear(g) for g in self.generators)

    @property
    def classes(self) -> list[ConjugacyClass]:
        if self._classes is None:
            self._classes = self._compute_classes()
        return self._classes

    def _compute_classes(self) -> list[ConjugacyClass]:
        if self.is_abelian():
            whole = tuple(self.elements)
            out = [ConjugacyClass(g, 1, whole, (g,)) for g in self.elements]
            return sorted(out, key=_class_sort_key)
        gens = self.generators
        inv = [s.inverse() for s in gens]
        assigned: set[bytes] = set()
        out = []
        for g in sorted(self.elements, key=lambda x: x.key):
            if g.key in assigned:
                continue
            out.append(self._orbit_with_centralizer(g, gens, inv, assigned))
        return sorted(out, key=_class_sort_key)

    def _orbit_with_centralizer(self, g: GroupElement, gens, inv, assigned: set[bytes]) -> ConjugacyClass:
        ident = self.elements[0]
        members = [g]
        trans = {g.key: (ident, ident)}  # x -> (t, t^-1) with t g t^-1 = x
        assigned.add(g.key)
        schreier: list[GroupElement] = []
        i = 0
        while i < len(members):
            x = members[i]
            i += 1
            t, tinv = trans[x.key]
            for s, si in zip(gens, inv):
                y = s * x * si
                if y.key not in trans:
                    trans[y.key] = (s * t, tinv * si)
                    assigned.add(y.key)
                    members.append(y)
                else:
                    schreier.append(trans[y.key][1] * s * t)
        target = self.order // len(members)
        cent = [ident]
        cindex = {ident.key}
        cgens: list[GroupElement] = []
        for z in schreier:
            if len(cent) == target:
                break
            if z.key not in cindex:
                _extend_subgroup(cent, cindex, cgens, z)
        if len(cent) != target:
            raise AssertionError("centralizer order disagrees with orbit-stabilizer")
        return ConjugacyClass(g, len(members), tuple(cent), tuple(members))

    def class_of(self, g: GroupElement) -> ConjugacyClass:
        if g not in self:
            raise ElementNotInGroup(f"{g!r} is not in the group")
        for c in self.classes:
            if any(m.key == g.key for m in c.members):
                return c
        raise AssertionError("classes do not cover the group")

    def centralizer(self, g: GroupElement) -> list[GroupElement]:
        if g not in self:
            raise ElementNotInGroup(f"{g!r} is not in the group")
        if self.is_abelian():
            return list(self.elements)
        c = self.class_of(g)
        if c.rep.key == g.key:
            return list(c.centralizer)
        return [h for h in self.elements if h.commutes(g)]


def generate_group(generators: Sequence[Sequence[Sequence[object]]] | Sequence[GroupElement],
                   cap: int = DEFAULT_CAP) -> MatGroup:
    gens = list(generators)
    if gens and not isinstance(gens[0], GroupElement):
        gens = elements_from_matrices(gens)
    else:
        conductor = lcm(*(g.field.n for g in gens))
        fld = CycloField(conductor)
        gens = [g.lift(fld) for g in gens]
    return MatGroup(gens, cap)


def conjugacy_classes(G: MatGroup) -> list[ConjugacyClass]:
    return G.classes


def centralizer(G: MatGroup, g: GroupElement) -> list[GroupElement]:
    return G.centralizer(g)


# ---------------------------------------------------------------------------
# central extension by a cyclic factor


@dataclass
class LiftedGroup:
    """<G', J> with J central of order k and <J> meeting G' trivially."""

    base: MatGroup
    J: GroupElement
    k: int
    classes: list[ConjugacyClass]

    @property
    def order(self) -> int:
        return self.base.order * self.k

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def field(self) -> CycloField:
        return self.base.field

    @property
    def generators(self) -> tuple[GroupElement, ...]:
        return self.base.generators + (self.J,)

    def is_abelian(self) -> bool:
        return self.base.is_abelian()

    def is_special_linear(self) -> bool:
        return self.base.is_special_linear() and is_special_linear(self.J)


def coset_lift(Gprime: MatGroup, J: GroupElement, k: int) -> LiftedGroup:
    conductor = lcm(J.field.n, Gprime.field.n)
    if conductor != Gprime.field.n:
        fld = CycloField(conductor)
        Gprime = MatGroup([g.lift(fld) for g in Gprime.generators], Gprime.cap)
    J = J.lift(Gprime.field)
    for s in Gprime.generators:
        if not J.commutes(s):
            raise PreconditionViolated("J does not commute with every generator")
    powers = [GroupElement.identity(Gprime.n, Gprime.field)]
    for _ in range(1, k):
        powers.append(powers[-1] * J)
    if not (powers[-1] * J).is_identity():
        raise PreconditionViolated(f"J does not have order dividing {k}")
    for i in range(1, k):
        if powers[i].is_identity():
            raise PreconditionViolated(f"J has order {i} < {k}")
        if powers[i] in Gprime:
            raise PreconditionViolated(f"J^{i} lies in G'")
    classes = []
    for c in Gprime.classes:
        cent = tuple(p * h for p in powers for h in c.centralizer)
        for p in powers:
            classes.append(ConjugacyClass(p * c.rep, c.size, cent, tuple(p * m for m in c.members)))
    classes.sort(key=_class_sort_key)
    return LiftedGroup(Gprime, J, k, classes)


def try_coset_lift(generators: Sequence[GroupElement], J: GroupElement, cap: int = DEFAULT_CAP) -> LiftedGroup | None:
    """Lift over the generators other than J when the hypotheses hold, else None."""
    rest = [g for g in generators if g.key != J.key]
    if not rest or len(rest) == len(generators):
        return None
    if not all(J.commutes(g) for g in rest):
        return None
    Gp = MatGroup(rest, cap)
    try:
        return coset_lift(Gp, J, J.order())
    except PreconditionViolated:
        return None
