"""Problem files: a polynomial, group generators and options.

Example::

    # Fermat quintic with the grading element
    [polynomial]
    1; 5 0 0 0 0
    1; 0 5 0 0 0
    1; 0 0 5 0 0
    1; 0 0 0 5 0
    1; 0 0 0 0 5

    [group]
    J
    perm(2 3 4 5 1)
    diag(E(5), E(5)^4, 1, 1, 1)
    g = [0, 1, 0, 0, 0; 1, 0, 0, 0, 0; 0, 0, 1, 0, 0;
         0, 0, 0, 1, 0; 0, 0, 0, 0, 1]

    [options]
    cap = 200000

Polynomial lines are ``coefficient; e_1 ... e_n``.  Group lines are ``J``
(the grading element of the polynomial), a preset matrix name (``A1`` ..
``A5``), ``perm(...)`` in one-line notation (row i has its 1 in column
sigma(i)), ``cycles(...)``, ``diag(...)`` or a bracketed matrix with rows
separated by ``;``.  Any of them may be prefixed by ``name =``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

from .cyclo import ONE, ZERO, CycNum, parse_cyc, zeta
from .errors import LGOrbError, ParseError
from .grp import DEFAULT_CAP, LiftedGroup, MatGroup, elements_from_matrices, try_coset_lift
from .oracle import DEFAULT_BOUND
from .polyform import QHPoly, certify_nondegenerate, grading_operator

Matrix = list[list[CycNum]]

_OPTION_TYPES: dict[str, Any] = {
    "cap": int,
    "oracle_bound": int,
    "assert_nondegenerate": bool,
    "name": str,
    "coset_lift": str,
}


def _sqrt2_inv() -> CycNum:
    return (zeta(8) + zeta(8, 7)) / 2


def named_matrices() -> dict[str, Matrix]:
    """Fixed 5x5 matrices available by name in group sections."""
    z8, z3 = zeta(8), zeta(3)
    s = _sqrt2_inv()
    O, I = ZERO, ONE
    return {
        "A1": [[z8**3, O, O, O, O], [O, z8, O, O, O], [O, O, O, I, O], [O, O, I, O, O], [O, O, O, O, I]],
        "A2": [[O, I, O, O, O], [-I, O, O, O, O], [O, O, I, O, O], [O, O, O, I, O], [O, O, O, O, I]],
        "A3": [[-s * z8, s * z8, O, O, O], [s * z8**3, s * z8**3, O, O, O],
               [O, O, z3, O, O], [O, O, O, z3**2, O], [O, O, O, O, I]],
        "A4": [[O, I, O, O, O], [O, O, I, O, O], [I, O, O, O, O], [O, O, O, z3, O], [O, O, O, O, z3**2]],
        "A5": [[z3**2, O, O, O, O], [O, z3, O, O, O], [O, O, O, I, O], [O, O, O, O, I], [O, O, I, O, O]],
    }


@dataclass
class GeneratorSpec:
    label: str
    matrix: Matrix | None  # None for the grading element J
    line: int = 0

    @property
    def is_grading(self) -> bool:
        return self.matrix is None


@dataclass
class Problem:
    polynomial: QHPoly
    generators: list[GeneratorSpec]
    options: dict[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.options.get("name", self.polynomial.name)

    @property
    def cap(self) -> int:
        return self.options.get("cap", DEFAULT_CAP)

    @property
    def oracle_bound(self) -> int:
        return self.options.get("oracle_bound", DEFAULT_BOUND)

    def generator_matrices(self) -> list[Matrix]:
        J = grading_operator(self.polynomial)
        return [J if g.is_grading else g.matrix for g in self.generators]

    def build_group(self, cap: int | None = None) -> MatGroup | LiftedGroup:
        """Close the group; use the cyclic coset lift over J when it applies."""
        cap = cap or self.cap
        mats = self.generator_matrices()
        elems = elements_from_matrices(mats)
        mode = self.options.get("coset_lift", "auto")
        if mode != "off" and any(g.is_grading for g in self.generators):
            J = next(e for e, g in zip(elems, self.generators) if g.is_grading)
            lifted = try_coset_lift(elems, J, cap)
            if lifted is not None:
                return lifted
            if mode == "on":
                raise LGOrbError("coset lift over J was requested but its hypotheses fail")
        return MatGroup(elems, cap)


# ---------------------------------------------------------------------------
# parsing


def _split_top(text: str, sep: str) -> list[tuple[str, int]]:
    """Split at ``sep`` outside parentheses; returns (piece, offset) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return out


def _cyc(piece: str, line: int, col: int) -> CycNum:
    stripped = piece.strip()
    if not stripped:
        raise ParseError("empty entry", line, col + 1)
    lead = len(piece) - len(piece.lstrip())
    return parse_cyc(stripped, line, col + lead)


def _perm_matrix(images: list[int], line: int, col: int) -> Matrix:
    n = len(images)
    if sorted(images) != list(range(1, n + 1)):
        raise ParseError(f"{images} is not a permutation of 1..{n}", line, col)
    return [[ONE if j + 1 == images[i] else ZERO for j in range(n)] for i in range(n)]


_CYCLE = re.compile(r"\(([\d\s,]*)\)")


def _cycles_matrix(body: str, n: int | None, line: int, col: int) -> Matrix:
    cycles = [[int(x) for x in re.split(r"[\s,]+", m.group(1).strip()) if x] for m in _CYCLE.finditer(body)]
    if _CYCLE.sub("", body).strip():
        raise ParseError("cycles(...) expects a product of cycles like (1 2 3)(4 5)", line, col)
    size = n or max((max(c) for c in cycles if c), default=1)
    images = list(range(1, size + 1))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            if not 1 <= a <= size:
                raise ParseError(f"index {a} out of range", line, col)
            images[a - 1] = b
    return _perm_matrix(images, line, col)


def _parse_generator(text: str, line: int, col: int, n: int, names: dict[str, Matrix]) -> tuple[str, Matrix | None]:
    label = ""
    m = re.match(r"\s*([A-Za-z_]\w*)\s*=(?!=)", text)
    if m:
        label = m.group(1)
        col += m.end()
        text = text[m.end():]
    body = text.strip()
    col += len(text) - len(text.lstrip())
    if body == "J":
        return label or "J", None
    if body in names:
        mat = names[body]
        if len(mat) != n:
            raise ParseError(f"{body} is {len(mat)}x{len(mat)} but the polynomial has {n} variables", line, col)
        return label or body, mat
    fm = re.fullmatch(r"(perm|cycles|diag)\s*\((.*)\)", body, re.S)
    if fm:
        kind, inner = fm.group(1), fm.group(2)
        icol = col + fm.start(2)
        if kind == "perm":
            try:
                images = [int(x) for x in re.split(r"[\s,]+", inner.strip()) if x]
            except ValueError:
                raise ParseError("perm(...) expects integers", line, icol) from None
            mat = _perm_matrix(images, line, icol)
        elif kind == "cycles":
            mat = _cycles_matrix(inner, n, line, icol)
        else:
            entries = [_cyc(p, line, icol - 1 + off) for p, off in _split_top(inner, ",")]
            mat = [[entries[i] if i == j else ZERO for j in range(len(entries))] for i in range(len(entries))]
        if len(mat) != n:
            raise ParseError(f"{kind}(...) has size {len(mat)} but the polynomial has {n} variables", line, col)
        return label or body, mat
    if body.startswith("[") and body.endswith("]"):
        inner = body[1:-1]
        icol = col  # 0-based offset of the text after '['
        rows = []
        for rtext, roff in _split_top(inner, ";"):
            rows.append([_cyc(p, line, icol + roff + off) for p, off in _split_top(rtext, ",")])
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ParseError(f"matrix must be {n}x{n}", line, col)
        return label or f"g{line}", rows
    raise ParseError(f"cannot read generator {body!r}", line, col)


def _parse_bool(text: str, line: int, col: int) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ParseError(f"expected a boolean, got {text.strip()!r}", line, col)


def parse_problem(text: str, check_nondegenerate: bool = True) -> Problem:
    section = None
    terms: list[tuple[CycNum, list[int]]] = []
    term_lines: list[int] = []
    raw_gens: list[tuple[str, int, int]] = []
    options: dict[str, Any] = {}
    pending: tuple[str, int, int] | None = None  # matrix spanning several lines

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        content = raw.split("#", 1)[0]
        if pending is not None:
            ptext, pline, pcol = pending
            ptext += " " + content
            if ptext.count("[") <= ptext.count("]"):
                raw_gens.append((ptext, pline, pcol))
                pending = None
            else:
                pending = (ptext, pline, pcol)
            continue
        stripped = content.strip()
        if not stripped:
            continue
        col = len(content) - len(content.lstrip()) + 1
        m = re.fullmatch(r"\[(\w+)\]", stripped)
        if m:
            section = m.group(1)
            if section not in ("polynomial", "group", "options"):
                raise ParseError(f"unknown section [{section}]", lineno, col)
            continue
        if section is None:
            raise ParseError("content before the first section header", lineno, col)
        if section == "polynomial":
            if ";" not in content:
                raise ParseError("monomial lines look like 'coeff; e1 e2 ... en'", lineno, col)
            ctext, etext = content.split(";", 1)
            coeff = _cyc(ctext, lineno, 0)
            ecol = len(ctext) + 2
            exps = []
            for tok in re.finditer(r"\S+", etext):
                if not re.fullmatch(r"\d+", tok.group()):
                    raise ParseError(f"exponent {tok.group()!r} is not a nonnegative integer",
                                     lineno, ecol + tok.start())
                exps.append(int(tok.group()))
            if terms and len(exps) != len(terms[0][1]):
                raise ParseError(f"expected {len(terms[0][1])} exponents, found {len(exps)}", lineno, ecol)
            if not exps:
                raise ParseError("missing exponents", lineno, ecol)
            terms.append((coeff, exps))
            term_lines.append(lineno)
        elif section == "group":
            if content.count("[") > content.count("]"):
                pending = (content, lineno, 0)
            else:
                raw_gens.append((content, lineno, 0))
        else:
            if "=" not in content:
                raise ParseError("option lines look like 'key = value'", lineno, col)
            key, value = content.split("=", 1)
            key = key.strip()
            if key not in _OPTION_TYPES:
                raise ParseError(f"unknown option {key!r}", lineno, col)
            vcol = len(key) + col + 1
            kind = _OPTION_TYPES[key]
            if kind is bool:
                options[key] = _parse_bool(value, lineno, vcol)
            elif kind is int:
                try:
                    options[key] = int(value.strip())
                except ValueError:
                    raise ParseError(f"option {key} expects an integer", lineno, vcol) from None
                if options[key] <= 0:
                    raise ParseError(f"option {key} must be positive", lineno, vcol)
            else:
                options[key] = value.strip()
                if key == "coset_lift" and options[key] not in ("auto", "on", "off"):
                    raise ParseError("coset_lift must be auto, on or off", lineno, vcol)
    if pending is not None:
        raise ParseError("unterminated matrix", pending[1], 1)
    if not terms:
        raise ParseError("the [polynomial] section is missing or empty", len(lines) or 1, 1)

    W = QHPoly.from_monomials(terms, len(terms[0][1]), name=options.get("name", ""))
    if check_nondegenerate:
        certify_nondegenerate(W, options.get("assert_nondegenerate", False))
    names = named_matrices()
    gens = []
    for gtext, gline, gcol in raw_gens:
        label, mat = _parse_generator(gtext, gline, gcol + 1, W.n, names)
        gens.append(GeneratorSpec(label, mat, gline))
    if not gens:
        gens.append(GeneratorSpec("J", None, 0))
    return Problem(W, gens, options)


# ---------------------------------------------------------------------------
# presets


def _an_text(n: int, l: int) -> str:
    return (f"# W = x^{n} with the cyclic group generated by E({n})^{l}\n"
            f"[polynomial]\n1; {n}\n[group]\ndiag(E({n})^{l})\n[options]\nname = an-{n}-{l}\n")


def preset_names() -> list[str]:
    files = resources.files("lgorb.problems")
    return sorted(p.name[: -len(".lgo")] for p in files.iterdir() if p.name.endswith(".lgo"))


def preset_text(name: str) -> str:
    m = re.fullmatch(r"an-(\d+)-(\d+)", name)
    if m:
        return _an_text(int(m.group(1)), int(m.group(2)))
    path = resources.files("lgorb.problems") / f"{name}.lgo"
    if not path.is_file():
        raise LGOrbError(f"unknown preset {name!r}")
    return path.read_text()


def golden_text(name: str) -> str | None:
    path = resources.files("lgorb.problems") / f"{name}.golden.csv"
    return path.read_text() if path.is_file() else None


def load_preset(name: str) -> Problem:
    return parse_problem(preset_text(name))
