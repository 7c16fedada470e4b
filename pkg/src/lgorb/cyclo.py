"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored in the power basis 1, z, ..., z^(phi(N)-1) of
Q[x]/(Phi_N(x)) with z = exp(2 pi i / N), which makes equality a plain
comparison of coefficient tuples.  Elements of different conductors are
combined in Q(zeta_lcm).

The module also hosts :class:`CycloField`, a packed integer view of one fixed
field that the group engine uses for its numpy/Cython kernels, and the
``E(n)`` text syntax used by problem files.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import DivisionByZero, InputTooLarge, ParseError

CONDUCTOR_CAP = 10_000

Rational = Union[int, Fraction]

_phi_cache: dict[int, tuple[int, ...]] = {}
_table_cache: dict[int, tuple[tuple[tuple[int, int], ...], ...]] = {}
_lock = threading.RLock()


# ---------------------------------------------------------------------------
# small integer helpers


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def euler_phi(n: int) -> int:
    r = n
    for p, _ in _factor(n):
        r = r // p * (p - 1)
    return r


def moebius(n: int) -> int:
    f = _factor(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables


def _poly_exact_div(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Quotient of integer polynomials (low degree first), den monic."""
    num = list(num)
    dq = len(den) - 1
    q = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            q[i - dq] = c
            for j, dc in enumerate(den):
                num[i - dq + j] -= c * dc
    assert not any(num), "cyclotomic division left a remainder"
    return q


def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    cached = _phi_cache.get(n)
    if cached is not None:
        return cached
    with _lock:
        if n not in _phi_cache:
            poly = [-1] + [0] * (n - 1) + [1]
            for d in divisors(n)[:-1]:
                poly = _poly_exact_div(poly, cyclotomic_polynomial(d))
            _phi_cache[n] = tuple(poly)
    return _phi_cache[n]


def _power_table(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Entry e holds z^e (0 <= e < n) as sparse ((k, c), ...) in the power basis."""
    cached = _table_cache.get(n)
    if cached is not None:
        return cached
    phi_poly = cyclotomic_polynomial(n)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple((k, c) for k, c in enumerate(cur) if c))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for k in range(deg):
                cur[k] -= top * phi_poly[k]
    table = tuple(rows)
    with _lock:
        _table_cache.setdefault(n, table)
    return _table_cache[n]


def _check_conductor(n: int) -> None:
    if n > CONDUCTOR_CAP:
        raise InputTooLarge(f"conductor {n} exceeds cap {CONDUCTOR_CAP}")


# ---------------------------------------------------------------------------
# polynomial helpers over Q (dense, lowest degree first)


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pdivmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    if len(a) < len(b):
        return [], _trim(a)
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bc in enumerate(b):
                a[i + j] -= c * bc
    return _trim(q), _trim(a[: len(b) - 1])


def _pmul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _psub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim([Fraction(x) for x in out])


# ---------------------------------------------------------------------------


class CycNum:
    """Immutable element of Q(zeta_N)."""

    __slots__ = ("_n", "_c", "_hash")

    def __init__(self, conductor: int, coeffs: Mapping[int, Rational] | None = None):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        _check_conductor(conductor)
        self._n = conductor
        self._c = _reduce(conductor, coeffs or {})
        self._hash = None

    @classmethod
    def _raw(cls, n: int, c: tuple[tuple[int, Fraction], ...]) -> CycNum:
        obj = object.__new__(cls)
        obj._n = n
        obj._c = c
        obj._hash = None
        return obj

    # -- constructors --------------------------------------------------------

    @classmethod
    def rational(cls, x: Rational) -> CycNum:
        x = Fraction(x)
        return cls._raw(1, ((0, x),) if x else ())

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> CycNum:
        return cls(n, {k % n: 1})

    # -- accessors -----------------------------------------------------------

    @property
    def conductor(self) -> int:
        return self._n

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    @property
    def degree(self) -> int:
        return euler_phi(self._n)

    def is_zero(self) -> bool:
        return not self._c

    def is_rational(self) -> bool:
        return not self._c or (len(self._c) == 1 and self._c[0][0] == 0)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._c[0][1] if self._c else Fraction(0)

    def embed(self, m: int) -> CycNum:
        """Image in Q(zeta_m); the conductor must divide m."""
        if m % self._n:
            raise ValueError(f"cannot embed Q(zeta_{self._n}) into Q(zeta_{m})")
        if m == self._n:
            return self
        _check_conductor(m)
        s = m // self._n
        return CycNum._raw(m, _reduce(m, {k * s: c for k, c in self._c}))

    def vector(self) -> list[Fraction]:
        out = [Fraction(0)] * euler_phi(self._n)
        for k, c in self._c:
            out[k] = c
        return out

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> tuple[CycNum, CycNum] | None:
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(other)
        elif not isinstance(other, CycNum):
            return None
        if other._n == self._n:
            return self, other
        m = lcm(self._n, other._n)
        _check_conductor(m)
        return self.embed(m), other.embed(m)

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        acc: dict[int, Fraction] = dict(a._c)
        for k, c in b._c:
            acc[k] = acc.get(k, 0) + c
        return CycNum._raw(a._n, tuple(sorted((k, c) for k, c in acc.items() if c)))

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(self._n, tuple((k, -c) for k, c in self._c))

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[0] + (-pair[1])

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[1] + (-pair[0])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return CycNum._raw(self._n, ())
            return CycNum._raw(self._n, tuple((k, c * other) for k, c in self._c))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if not a._c or not b._c:
            return CycNum._raw(a._n, ())
        n = a._n
        raw: dict[int, Fraction] = {}
        for i, x in a._c:
            for j, y in b._c:
                e = (i + j) % n
                raw[e] = raw.get(e, 0) + x * y
        return CycNum._raw(n, _reduce(n, raw))

    __rmul__ = __mul__

    def inverse(self) -> CycNum:
        if not self._c:
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            return CycNum._raw(self._n, ((0, 1 / self._c[0][1]),))
        # extended Euclid: s*a + t*Phi = 1
        phi_poly = [Fraction(c) for c in cyclotomic_polynomial(self._n)]
        r0, r1 = phi_poly, _trim(self.vector())
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _pdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        if not r1:
            raise DivisionByZero("element is not invertible")  # pragma: no cover
        c = r1[0]
        return CycNum(self._n, {k: x / c for k, x in enumerate(s1) if x})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(other))
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[0] * pair[1].inverse()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return pair[1] * pair[0].inverse()

    def __pow__(self, e: int) -> CycNum:
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = CycNum._raw(self._n, ((0, Fraction(1)),))
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conjugate(self) -> CycNum:
        n = self._n
        return CycNum(n, {(-k) % n: c for k, c in self._c})

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(other)
        if not isinstance(other, CycNum):
            return NotImplemented
        if self._n == other._n:
            return self._c == other._c
        m = lcm(self._n, other._n)
        return self.embed(m)._c == other.embed(m)._c

    def __hash__(self) -> int:
        # normalized trace is invariant under embeddings, so equal elements of
        # different conductors hash alike
        if self._hash is None:
            tr = Fraction(0)
            for k, c in self._c:
                m = self._n // gcd(self._n, k)
                tr += c * Fraction(moebius(m), euler_phi(m))
            self._hash = hash(tr)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._c)

    def __complex__(self) -> complex:
        z = np.exp(2j * np.pi / self._n)
        return complex(sum(float(c) * z**k for k, c in self._c))

    def __repr__(self) -> str:
        return f"CycNum({self._n}, {dict(self._c)!r})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for k, c in self._c:
            if k == 0:
                term, unit = str(c), True
            else:
                z = f"E({self._n})" + (f"^{k}" if k > 1 else "")
                if c == 1:
                    term, unit = z, False
                elif c == -1:
                    term, unit = "-" + z, False
                else:
                    term, unit = f"{c}*{z}", False
            if term.startswith("-"):
                parts.append(("-", term[1:]))
            else:
                parts.append(("+", term))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, t in parts[1:]:
            out += f" {sign} {t}"
        return out


def _reduce(n: int, raw: Mapping[int, Rational]) -> tuple[tuple[int, Fraction], ...]:
    table = _power_table(n)
    acc: dict[int, Fraction] = {}
    for e, c in raw.items():
        if not c:
            continue
        for k, m in table[e % n]:
            acc[k] = acc.get(k, 0) + m * Fraction(c)
    return tuple(sorted((k, c) for k, c in acc.items() if c))


def zeta(n: int, k: int = 1) -> CycNum:
    return CycNum.zeta(n, k)


ZERO = CycNum.rational(0)
ONE = CycNum.rational(1)


def as_cyc(x) -> CycNum:
    if isinstance(x, CycNum):
        return x
    return CycNum.rational(x)


# ---------------------------------------------------------------------------
# roots of unity


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """zeta_order ** exponent, with exponent taken mod order."""

    order: int
    exponent: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "exponent", self.exponent % self.order)

    @property
    def log(self) -> Fraction:
        """The branch value k/m in [0, 1)."""
        return Fraction(self.exponent, self.order)

    def reduced(self) -> RootOfUnity:
        f = self.log
        return RootOfUnity(f.denominator, f.numerator)

    def value(self) -> CycNum:
        return zeta(self.order, self.exponent)


def as_root_of_unity(a: CycNum) -> RootOfUnity | None:
    """Return (m, k) with a = zeta_m^k in lowest terms, or None if a is not a root of unity."""
    a = as_cyc(a)
    if not a:
        return None
    n = a.conductor
    m = lcm(n, 2)
    if a**m != ONE:
        return None
    # roots of unity in Q(zeta_n) are exactly +/- zeta_n^j
    table = _power_table(n)
    target = a._c
    for j in range(n):
        row = tuple((k, Fraction(c)) for k, c in table[j])
        if row == target:
            return RootOfUnity(n, j).reduced()
        if tuple((k, -c) for k, c in row) == target:
            return RootOfUnity(2 * n, 2 * j + n).reduced()
    raise AssertionError("a^m = 1 but no matching root found")  # pragma: no cover


# ---------------------------------------------------------------------------
# packed integer representation of one fixed field


class CycloField:
    """Q(zeta_N) packed as int64 coordinate vectors for the numeric kernels.

    ``table[e]`` is zeta^e in the power basis; ``mul_*`` is a CSR encoding of
    the products zeta^p * zeta^q for p, q < phi(N).
    """

    _instances: dict[int, CycloField] = {}

    def __new__(cls, n: int):
        inst = cls._instances.get(n)
        if inst is not None:
            return inst
        with _lock:
            inst = cls._instances.get(n)
            if inst is None:
                inst = super().__new__(cls)
                inst._setup(n)
                cls._instances[n] = inst
        return inst

    def __getnewargs__(self):
        return (self.n,)

    def __getstate__(self):
        return {}

    def __setstate__(self, state):
        pass

    def _setup(self, n: int) -> None:
        _check_conductor(n)
        self.n = n
        self.phi = euler_phi(n)
        rows = _power_table(n)
        table = np.zeros((n, self.phi), dtype=np.int64)
        for e, row in enumerate(rows):
            for k, c in row:
                table[e, k] = c
        self.table = table
        ptr = [0]
        idx: list[int] = []
        val: list[int] = []
        for p in range(self.phi):
            for q in range(self.phi):
                for k, c in rows[(p + q) % n]:
                    idx.append(k)
                    val.append(c)
                ptr.append(len(idx))
        self.mul_ptr = np.asarray(ptr, dtype=np.int64)
        self.mul_idx = np.asarray(idx, dtype=np.int64)
        self.mul_val = np.asarray(val, dtype=np.int64)
        dense = np.zeros((self.phi, self.phi, self.phi), dtype=np.int64)
        for p in range(self.phi):
            dense[p, :, :] = table[(p + np.arange(self.phi)) % n]
        self.mul_dense = dense

    def pack(self, x: CycNum) -> list[Fraction]:
        return as_cyc(x).embed(self.n).vector()

    def unpack(self, vec: Iterable[int], den: int = 1) -> CycNum:
        return CycNum(self.n, {k: Fraction(int(c), den) for k, c in enumerate(vec) if c})

    def __repr__(self) -> str:
        return f"CycloField({self.n})"


# ---------------------------------------------------------------------------
# text syntax:  E(n), E(n)^k, integers, + - * / and parentheses

_TOKEN = re.compile(r"\s*(?:(\d+)|(E)|(\^)|([-+*/()]))")


class _Parser:
    def __init__(self, text: str, line: int, col0: int):
        self.text = text
        self.line = line
        self.col0 = col0
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                bad = len(text) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
            start = m.start(m.lastindex)
            kind = ("int", "E", "^", "op")[m.lastindex - 1]
            self.toks.append((kind, m.group(m.lastindex), start))
            pos = m.end()
        self.i = 0

    def error(self, msg: str) -> ParseError:
        col = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        return ParseError(msg, self.line, self.col0 + col + 1)

    def peek(self) -> str | None:
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def take(self, expected: str | None = None) -> tuple[str, str, int]:
        if self.i >= len(self.toks):
            raise self.error("unexpected end of expression")
        tok = self.toks[self.i]
        if expected is not None and tok[1] != expected:
            raise self.error(f"expected {expected!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def parse(self) -> CycNum:
        if not self.toks:
            raise ParseError("empty expression", self.line, self.col0 + 1)
        v = self.expr()
        if self.i != len(self.toks):
            raise self.error(f"unexpected token {self.peek()!r}")
        return v

    def expr(self) -> CycNum:
        v = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> CycNum:
        v = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                v = v * rhs
            else:
                if not rhs:
                    raise self.error("division by zero")
                v = v / rhs
        return v

    def unary(self) -> CycNum:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> CycNum:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() in ("-", "+"):
                sign = -1 if self.take()[1] == "-" else 1
            kind, val, _ = self.take()
            if kind != "int":
                self.i -= 1
                raise self.error("exponent must be an integer")
            e = sign * int(val)
            if e < 0 and not base:
                raise self.error("negative power of zero")
            base = base**e
        return base

    def atom(self) -> CycNum:
        kind, val, _ = self.take()
        if kind == "int":
            return CycNum.rational(int(val))
        if kind == "E":
            self.take("(")
            k2, v2, _ = self.take()
            if k2 != "int":
                self.i -= 1
                raise self.error("E(n) needs a positive integer order")
            n = int(v2)
            if n < 1:
                self.i -= 1
                raise self.error("E(n) needs a positive integer order")
            if n > CONDUCTOR_CAP:
                self.i -= 1
                raise self.error(f"order {n} exceeds conductor cap")
            self.take(")")
            return zeta(n)
        if val == "(":
            v = self.expr()
            self.take(")")
            return v
        self.i -= 1
        raise self.error(f"unexpected token {val!r}")


def parse_cyc(text: str, line: int = 0, column: int = 0) -> CycNum:
    """Parse the ``E(n)`` expression syntax into a :class:`CycNum`."""
    return _Parser(text, line, column).parse()
