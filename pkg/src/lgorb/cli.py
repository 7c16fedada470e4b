"""Command line front end.

Exit status: 0 when everything checked holds, 1 when an identity fails,
2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable

from .errors import IdentityViolation, IllDefinedIndex, LGOrbError, NotInvertible, PreconditionViolated
from .grp import LiftedGroup
from .oracle import oracle_table
from .poincare import (
    BigradedPoly,
    compare_with_geometry,
    e_polynomial_z2,
    fmt_fraction,
    hodge_diamond_shape_check,
    hodge_symmetry_check,
    hodge_table,
    read_geometry_csv,
    sector_contributions,
    serre_duality_check,
    witten_index,
)
from .polyform import central_charge, charge_report, check_invariance, invertible_decomposition
from .problem import Problem, parse_problem, preset_names, preset_text

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def load(spec: str) -> Problem:
    path = Path(spec)
    text = path.read_text() if path.is_file() else preset_text(spec)
    return parse_problem(text)


def _scaled(P: BigradedPoly, k: int) -> BigradedPoly:
    return BigradedPoly({(p * k, q * k): c for (p, q), c in P.items()})


def _compute(prob: Problem, args):
    for spec, mat in zip(prob.generators, prob.generator_matrices()):
        if not check_invariance(prob.polynomial, mat):
            raise PreconditionViolated(f"generator {spec.label} on line {spec.line} does not preserve W")
    G = prob.build_group(args.cap)
    contribs = sector_contributions(prob.polynomial, G, workers=args.workers)
    P = BigradedPoly()
    for c in contribs:
        P = P + c.poly
    return G, contribs, P


def cmd_weights(prob: Problem, args, out) -> int:
    W = prob.polynomial
    cc = central_charge(W)
    out.write(f"weights: {' '.join(map(str, W.weights))}\n")
    out.write(f"degree: {W.degree}\n")
    out.write(f"charges: {' '.join(fmt_fraction(q) for q in W.charges)}\n")
    out.write(f"c_hat: {fmt_fraction(cc.c_hat)}\n")
    out.write(f"calabi_yau: {str(cc.cy).lower()}\n")
    out.write(f"generalized_calabi_yau: {str(cc.generalized_cy).lower()}\n")
    try:
        atoms = invertible_decomposition(W)
        out.write(f"atoms: {' + '.join(map(str, atoms))}\n")
    except NotInvertible:
        out.write("atoms: not invertible\n")
    flagged = charge_report(W)
    if flagged:
        out.write(f"note: charges above 1/2 for x{', x'.join(str(i + 1) for i in flagged)}\n")
    return EXIT_OK


def cmd_group(prob: Problem, args, out) -> int:
    G = prob.build_group(args.cap)
    sl = G.is_special_linear()
    out.write(f"order: {G.order}\n")
    out.write(f"classes: {len(G.classes)}\n")
    out.write(f"abelian: {str(G.is_abelian()).lower()}\n")
    out.write(f"special_linear: {str(sl).lower()}\n")
    out.write(f"coset_lift: {str(isinstance(G, LiftedGroup)).lower()}\n")
    return EXIT_OK


def cmd_sectors(prob: Problem, args, out) -> int:
    _, contribs, _ = _compute(prob, args)
    rows = []
    for i, c in enumerate(contribs):
        s = c.sector
        rows.append((str(i), str(s.rep.order()), str(s.n_g), fmt_fraction(s.age_g), fmt_fraction(s.age_ginv),
                     str(s.class_size), str(len(s.centralizer))))
    head = ("class", "order", "n_g", "age", "age_inv", "class_size", "centralizer")
    _table(out, head, rows, args.format)
    return EXIT_OK


def _table(out, head, rows, fmt: str) -> None:
    if fmt == "csv":
        out.write(",".join(head) + "\n")
        for r in rows:
            out.write(",".join(r) + "\n")
        return
    widths = [max(len(x) for x in col) for col in zip(head, *rows)]
    for r in [head, *rows]:
        out.write("  ".join(x.rjust(w) for x, w in zip(r, widths)) + "\n")


def cmd_poincare(prob: Problem, args, out) -> int:
    _, _, P = _compute(prob, args)
    out.write(str(_scaled(P, args.scale)) + "\n")
    return _post_hooks(prob, P, out)


def cmd_hodge(prob: Problem, args, out) -> int:
    G, _, P = _compute(prob, args)
    T = hodge_table(_scaled(P, args.scale), central_charge(prob.polynomial).c_hat, G.order, prob.name)
    out.write(T.to_csv() if args.format == "csv" else T.to_text())
    return _post_hooks(prob, P, out)


def _post_hooks(prob: Problem, P: BigradedPoly, out) -> int:
    c_hat = central_charge(prob.polynomial).c_hat
    bad = hodge_symmetry_check(P)
    if bad is not None:
        out.write(f"FAIL hodge symmetry at ({fmt_fraction(bad[0])}, {fmt_fraction(bad[1])})\n")
        return EXIT_VIOLATION
    bad = serre_duality_check(P, c_hat)
    if bad is not None:
        out.write(f"FAIL serre duality at ({fmt_fraction(bad[0])}, {fmt_fraction(bad[1])})\n")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(prob: Problem, args, out) -> int:
    G, contribs, P = _compute(prob, args)
    W = prob.polynomial
    c_hat = central_charge(W).c_hat
    status = EXIT_OK

    def report(name: str, bad) -> None:
        nonlocal status
        if bad is None:
            out.write(f"PASS {name}\n")
        else:
            out.write(f"FAIL {name} at ({fmt_fraction(bad[0])}, {fmt_fraction(bad[1])})\n")
            status = EXIT_VIOLATION

    report("hodge symmetry", hodge_symmetry_check(P))
    report("serre duality", serre_duality_check(P, c_hat))
    sl = G.is_special_linear()
    has_J = any(g.is_grading for g in prob.generators)
    if sl and has_J and c_hat.denominator == 1:
        report("diamond shape", hodge_diamond_shape_check(P, c_hat))
    else:
        out.write("SKIP diamond shape (needs <J> in G inside SL and integral c_hat)\n")
    try:
        out.write(f"witten index: {witten_index(P)}\n")
    except IllDefinedIndex:
        out.write("witten index: undefined (non-integral p - q)\n")
    z2 = e_polynomial_z2(contribs)
    out.write(f"z2 index: {z2.total()}\n")
    if c_hat.denominator == 1 and c_hat == 3:
        out.write(f"h11: {P[(1, 1)]}\nh21: {P[(2, 1)]}\n")
    return status


def cmd_compare(prob: Problem, args, out) -> int:
    _, _, P = _compute(prob, args)
    geometry = read_geometry_csv(Path(args.geometry).read_text())
    c_hat = central_charge(prob.polynomial).c_hat
    bad = compare_with_geometry(P, geometry, c_hat)
    if bad is None:
        out.write("PASS h^{p,q}(W,G) = h^{c-p,q}(geometry)\n")
        return EXIT_OK
    out.write(f"FAIL relation at ({fmt_fraction(bad[0])}, {fmt_fraction(bad[1])})\n")
    return EXIT_VIOLATION


def cmd_oracle_compare(prob: Problem, args, out) -> int:
    mats = prob.generator_matrices()
    O = oracle_table(prob.polynomial, mats, prob.oracle_bound)
    _, _, P = _compute(prob, args)
    if O == P:
        out.write(f"PASS oracle agrees on {len(P)} bidegrees\n")
        return EXIT_OK
    for pq in sorted(set(O) | set(P)):
        if O[pq] != P[pq]:
            out.write(f"DIFF ({fmt_fraction(pq[0])}, {fmt_fraction(pq[1])}): poincare {P[pq]} oracle {O[pq]}\n")
    return EXIT_VIOLATION


COMMANDS: dict[str, Callable] = {
    "weights": cmd_weights,
    "group": cmd_group,
    "sectors": cmd_sectors,
    "poincare": cmd_poincare,
    "hodge": cmd_hodge,
    "verify": cmd_verify,
    "compare": cmd_compare,
    "oracle-compare": cmd_oracle_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgorb", description="Hodge data of Landau-Ginzburg orbifolds")
    parser.add_argument("--list-presets", action="store_true", help="print preset names and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("problem", help="problem file or preset name")
        p.add_argument("--cap", type=int, default=None, help="maximum group order")
        p.add_argument("--workers", type=int, default=1, help="processes for the per-class work")
        p.add_argument("--scale", type=int, default=1, help="multiply displayed exponents by k")
        p.add_argument("--format", choices=("text", "csv"), default="text")
        if name == "compare":
            p.add_argument("--geometry", required=True, help="CSV with header p,q,h")
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        out.write("\n".join(preset_names()) + "\n")
        return EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    if args.scale < 1 or (args.workers or 1) < 1 or (args.cap is not None and args.cap < 1):
        sys.stderr.write("error: --scale, --workers and --cap must be positive\n")
        return EXIT_INPUT
    try:
        prob = load(args.problem)
        return COMMANDS[args.command](prob, args, out)
    except IdentityViolation as exc:
        out.write(f"FAIL {exc}\n")
        return EXIT_VIOLATION
    except (LGOrbError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
