"""Per-class data for the orbifold sum: fixed spaces, ages, restricted actions."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

from .cyclo import ONE, ZERO, CycNum
from .errors import NonIntegerMultiplicity, NotInCentralizer
from .grp import ConjugacyClass, GroupElement, _dft_multiplicities, eigen_multiplicities, fixed_subspace

# A joint spectrum: sorted tuple of (weight, eigenvalue exponent in [0, 1)),
# one entry per dimension of the fixed space.
Spectrum = tuple[tuple[int, Fraction], ...]


@dataclass
class SectorData:
    rep: GroupElement
    weights: tuple[int, ...]
    degree: int
    n_g: int
    block_dims: dict[int, int]
    age_g: Fraction
    age_ginv: Fraction
    moved_charge_sum: Fraction
    centralizer: tuple[GroupElement, ...]
    class_size: int
    _projector: GroupElement | None = field(default=None, repr=False)
    _basis: list | None = field(default=None, repr=False)
    _fixed_coords: tuple[int, ...] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def charges(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.degree) for w in self.weights)

    @property
    def fixed_basis(self) -> list[tuple[Fraction, list[CycNum]]]:
        """Basis of V^g; each vector tagged by its charge."""
        if self._basis is None:
            self._basis = [(Fraction(w, self.degree), v) for w, v in fixed_subspace(self.rep, self.weights)]
        return self._basis

    def spectra(self) -> Counter:
        """Counter mapping joint spectrum of h on V^g to the number of such h."""
        return centralizer_spectra(self)


def _projector(g: GroupElement) -> GroupElement:
    """(1/o) sum_s g^s, the projection onto ker(E - g) along the other eigenspaces."""
    o = g.order()
    powers = [GroupElement.identity(g.n, g.field)]
    for _ in range(1, o):
        powers.append(powers[-1] * g)
    den = lcm(*(p.den for p in powers))
    total = sum((p.num.astype(object) * (den // p.den) for p in powers), np.zeros_like(powers[0].num, dtype=object))
    proj = GroupElement(total, den * o, g.field)
    return proj


def _block_traces(x: GroupElement, blocks: dict[int, tuple[int, ...]]) -> dict[int, CycNum]:
    out = {}
    for w, idx in blocks.items():
        vec = sum((x.num[i, i] for i in idx), np.zeros(x.num.shape[2], dtype=x.num.dtype))
        out[w] = x.field.unpack(vec, x.den)
    return out


def _blocks(weights: Sequence[int]) -> dict[int, tuple[int, ...]]:
    out: dict[int, list[int]] = {}
    for i, w in enumerate(weights):
        out.setdefault(w, []).append(i)
    return {w: tuple(v) for w, v in out.items()}


def build_sector(cls: ConjugacyClass, weights: Sequence[int], degree: int) -> SectorData:
    g = cls.rep
    weights = tuple(weights)
    n = len(weights)
    mult = eigen_multiplicities(g)
    age_g = sum((r.log * c for r, c in mult.items()), Fraction(0))
    age_ginv = sum(((1 - r.log) % 1 * c for r, c in mult.items()), Fraction(0))
    blocks = _blocks(weights)
    fixed_coords = None
    if g.is_diagonal():
        fixed_coords = tuple(i for i in range(n) if g.entry(i, i) == ONE)
        block_dims = {w: sum(1 for i in idx if i in fixed_coords) for w, idx in blocks.items()}
        proj = None
    else:
        proj = _projector(g)
        block_dims = {}
        for w, t in _block_traces(proj, blocks).items():
            if not t.is_rational() or t.to_fraction().denominator != 1:
                raise NonIntegerMultiplicity(f"fixed dimension in weight block {w} is {t}")
            block_dims[w] = int(t.to_fraction())
    n_g = sum(block_dims.values())
    moved = sum((Fraction(w, degree) * (len(blocks[w]) - d) for w, d in block_dims.items()), Fraction(0))
    if age_g + age_ginv != n - n_g:
        raise AssertionError("age relation violated")
    return SectorData(g, weights, degree, n_g, block_dims, age_g, age_ginv, moved,
                      cls.centralizer, cls.size, proj, None, fixed_coords)


def _diagonal_spectrum(h: GroupElement, coords: Sequence[int], weights: Sequence[int]) -> Spectrum:
    logs = h.diagonal_logs()
    return tuple(sorted((weights[i], logs[i]) for i in coords))


def centralizer_spectra(sector: SectorData, cache: dict | None = None) -> Counter:
    """Counter of joint spectra of the centralizer on V^g.

    ``cache`` may be shared across sectors of one group: diagonal sectors with
    the same fixed coordinates and the same centralizer have equal spectra.
    """
    weights = sector.weights
    result: Counter = Counter()
    if sector.n_g == 0:
        result[()] = len(sector.centralizer)
        return result
    coords = sector._fixed_coords
    if coords is not None and all(h.is_diagonal() for h in sector.centralizer):
        key = (coords, id(sector.centralizer))
        if cache is not None and key in cache:
            return cache[key]
        for h in sector.centralizer:
            result[_diagonal_spectrum(h, coords, weights)] += 1
        if cache is not None:
            cache[key] = result
        return result

    proj = sector._projector
    if proj is None:
        proj = _projector(sector.rep)
        sector._projector = proj
    blocks = {w: idx for w, idx in _blocks(weights).items() if sector.block_dims.get(w)}
    done: set[bytes] = set()
    for h in sector.centralizer:
        if h.key in done:
            continue
        m = h.order()
        powers = [GroupElement.identity(h.n, h.field)]
        traces: dict[int, list[CycNum]] = {w: [] for w in blocks}
        for j in range(m):
            if j:
                powers.append(powers[-1] * h)
            for w, t in _block_traces(powers[j] * proj, blocks).items():
                traces[w].append(t)
        base: list[tuple[int, int]] = []  # (weight, k) meaning zeta_m^k
        for w, tr in traces.items():
            mult = _dft_multiplicities(tr, m)
            if sum(mult.values()) != sector.block_dims[w]:
                raise NonIntegerMultiplicity("restricted multiplicities do not match the fixed dimension")
            for k, c in mult.items():
                base.extend([(w, k)] * c)
        for j in range(1, m + 1):
            if gcd(j, m) != 1:
                continue
            x = powers[j % m]
            if x.key in done:
                continue
            done.add(x.key)
            result[tuple(sorted((w, Fraction(k * j % m, m)) for w, k in base))] += 1
    if sum(result.values()) != len(sector.centralizer):
        raise AssertionError("centralizer spectra do not cover the centralizer")
    return result


def restricted_action(sector: SectorData, h: GroupElement | int) -> list[tuple[Fraction, list[list[CycNum]]]]:
    """Matrix of h on V^g in the fixed basis, one block per charge."""
    if isinstance(h, int):
        h = sector.centralizer[h]
    if not any(h.key == c.key for c in sector.centralizer):
        raise NotInCentralizer(f"{h!r} is not in the centralizer of the sector representative")
    mat = h.matrix()
    n = sector.n
    out = []
    by_charge: dict[Fraction, list[list[CycNum]]] = {}
    for q, v in sector.fixed_basis:
        by_charge.setdefault(q, []).append(v)
    for q, vecs in by_charge.items():
        # the nullspace basis has a 1 in its own free column, which is its last nonzero entry
        free = [max(i for i in range(n) if v[i]) for v in vecs]
        cols = []
        for v in vecs:
            hv = [sum((mat[i][k] * v[k] for k in range(n)), ZERO) for i in range(n)]
            cols.append([hv[f] for f in free])
        out.append((q, [[cols[j][i] for j in range(len(vecs))] for i in range(len(vecs))]))
    return out
