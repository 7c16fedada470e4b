from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgorb import _kernels
from lgorb.cyclo import CycloField

needs_cython = pytest.mark.skipif("cython" not in _kernels.available_backends(),
                                  reason="compiled extension not built")


def naive_series(exps, weights, tops, m, rows):
    """Expand prod (z^a - s^b) / (1 - z^a s^w) with plain dict arithmetic."""
    poly = {(0, 0): 1}  # (s exponent, z exponent) -> coefficient
    for a, w, b in zip(exps, weights, tops):
        num = {}
        for (t, r), c in poly.items():
            num[(t, (r + a) % m)] = num.get((t, (r + a) % m), 0) + c
            if t + b < rows:
                num[(t + b, r)] = num.get((t + b, r), 0) - c
        geo = {}
        for (t, r), c in num.items():
            k = 0
            while t + k * w < rows:
                key = (t + k * w, (r + k * a) % m)
                geo[key] = geo.get(key, 0) + c
                k += 1
        poly = geo
    out = np.zeros((rows, m), dtype=np.int64)
    for (t, r), c in poly.items():
        out[t, r] += c
    return out


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(1, 3)), min_size=1, max_size=4), st.integers(1, 3))
def test_accumulate_matches_naive_expansion(spec, count):
    m, degree = 6, 8
    exps = [a for a, _ in spec]
    ws = [w for _, w in spec]
    tops = [degree - w for w in ws]
    rows = sum(degree - 2 * w for w in ws) + 1
    want = count * naive_series(exps, ws, tops, m, rows)
    for backend in _kernels.available_backends():
        out = np.zeros((rows, m), dtype=np.int64)
        _kernels.accumulate_series(out, exps, ws, tops, count, backend)
        assert (out == want).all(), backend


def test_accumulate_object_dtype():
    out = np.zeros((5, 3), dtype=object)
    _kernels.accumulate_series(out, [1, 2], [1, 1], [3, 3], 2**70)
    ref = np.zeros((5, 3), dtype=np.int64)
    _kernels.accumulate_series(ref, [1, 2], [1, 1], [3, 3], 1)
    assert (out == ref.astype(object) * 2**70).all()


@needs_cython
@settings(max_examples=30, deadline=None)
@given(st.sampled_from([1, 3, 4, 5, 8, 12]), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_matmul_backends_agree(N, n, seed):
    fld = CycloField(N)
    rng = np.random.default_rng(seed)
    a = rng.integers(-9, 10, size=(n, n, fld.phi)).astype(np.int64)
    b = rng.integers(-9, 10, size=(n, n, fld.phi)).astype(np.int64)
    x = _kernels.matmul(a, b, fld, "python")
    y = _kernels.matmul(a, b, fld, "cython")
    assert (x == y).all()
    z = _kernels.matmul(a.astype(object), b.astype(object), fld)
    assert (z == x).all()


def test_pure_python_switch():
    env = dict(os.environ, LGORB_PURE_PYTHON="1")
    code = "from lgorb import _kernels; print(_kernels.BACKEND, _kernels.available_backends())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split()[0] == "python"


def test_pure_python_end_to_end():
    env = dict(os.environ, LGORB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-m", "lgorb.cli", "poincare", "quintic-J"], env=env,
                         capture_output=True, text=True, check=True)
    assert "101*u^2*v^2" in out.stdout


@needs_cython
def test_default_backend_is_compiled():
    assert _kernels.BACKEND == "cython"


def test_benchmark_smoke(capsys):
    import runpy
    from pathlib import Path

    bench = runpy.run_path(str(Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"))
    bench["main"](["--repeat", "1", "--preset", "cubic-J"])
    assert "poincare cubic-J" in capsys.readouterr().out
