"""Hot kernels with a compiled core and a numpy fallback.

The compiled extension is used when it was built and ``LGORB_PURE_PYTHON``
is not set.  ``BACKEND`` tells which one is active.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_INT64_SAFE = 2**62

try:
    if os.environ.get("LGORB_PURE_PYTHON"):
        raise ImportError("pure python requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


def matmul(a: np.ndarray, b: np.ndarray, field, backend: str | None = None) -> np.ndarray:
    backend = backend or BACKEND
    if a.dtype == object or b.dtype == object:
        return _pykernels.matmul(a.astype(object), b.astype(object), field.mul_dense.astype(object))
    if backend == "cython":
        return _ckernels.matmul(a, b, field.mul_ptr, field.mul_idx, field.mul_val)
    return _pykernels.matmul(a, b, field.mul_dense)


def accumulate_series(out: np.ndarray, exps, weights, tops, count: int,
                      backend: str | None = None) -> None:
    backend = backend or BACKEND
    if backend == "cython" and out.dtype == np.int64:
        _ckernels.accumulate_series(out, list(exps), list(weights), list(tops), int(count))
    else:
        _pykernels.accumulate_series(out, exps, weights, tops, count)


def available_backends() -> list[str]:
    return ["python", "cython"] if _ckernels is not None else ["python"]
