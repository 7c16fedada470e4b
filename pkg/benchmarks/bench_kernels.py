"""Compare the compiled and numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--preset NAME ...]

Prints best-of-N wall times for the two hot kernels and for a full Poincare
polynomial run per preset, once per available backend.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from lgorb import _kernels
from lgorb.cyclo import CycloField
from lgorb.poincare import poincare_polynomial
from lgorb.problem import load_preset


def bench_matmul(backend: str, repeat: int) -> float:
    fld = CycloField(40)
    rng = np.random.default_rng(0)
    a = rng.integers(-3, 4, size=(5, 5, fld.phi)).astype(np.int64)
    b = rng.integers(-3, 4, size=(5, 5, fld.phi)).astype(np.int64)
    return min(timeit.repeat(lambda: _kernels.matmul(a, b, fld, backend), number=200, repeat=repeat)) / 200


def bench_series(backend: str, repeat: int) -> float:
    spec = [(3, 1), (7, 1), (0, 2), (5, 2), (1, 2)]
    exps = [e for e, _ in spec]
    ws = [w for _, w in spec]
    tops = [8 - w for w in ws]
    rows = sum(8 - 2 * w for w in ws) + 1

    def run():
        out = np.zeros((rows, 8), dtype=np.int64)
        _kernels.accumulate_series(out, exps, ws, tops, 1, backend)

    return min(timeit.repeat(run, number=200, repeat=repeat)) / 200


def bench_preset(name: str, backend: str, repeat: int) -> float:
    prob = load_preset(name)

    def run():
        G = prob.build_group()
        poincare_polynomial(prob.polynomial, G, backend=backend)

    # group closure multiplies through the module default, so switch it too
    saved = _kernels.BACKEND
    _kernels.BACKEND = backend
    try:
        return min(timeit.repeat(run, number=1, repeat=repeat))
    finally:
        _kernels.BACKEND = saved


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--preset", action="append", default=None)
    args = parser.parse_args(argv)
    presets = args.preset or ["octic-2", "quintic-maxdiag", "quartic-A4"]
    backends = _kernels.available_backends()
    print(f"active backend: {_kernels.BACKEND}; available: {', '.join(backends)}")
    rows = [("matmul 5x5 over Q(zeta_40)", lambda b: bench_matmul(b, args.repeat)),
            ("series, 5 factors", lambda b: bench_series(b, args.repeat))]
    rows += [(f"poincare {p}", lambda b, p=p: bench_preset(p, b, args.repeat)) for p in presets]
    print(f"{'case':32}" + "".join(f"{b:>14}" for b in backends) + ("       speedup" if len(backends) > 1 else ""))
    for label, fn in rows:
        times = [fn(b) for b in backends]
        line = f"{label:32}" + "".join(f"{t * 1e3:12.3f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[0] / times[1]:13.1f}x"
        print(line)


if __name__ == "__main__":
    main()
