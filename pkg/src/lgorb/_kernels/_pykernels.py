"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` must agree with them
bit for bit.  Both accept object arrays of Python ints as well, which is the
overflow escape hatch used by callers.
"""

from __future__ import annotations

import numpy as np


def matmul(a: np.ndarray, b: np.ndarray, mul_dense: np.ndarray) -> np.ndarray:
    """Product of two (n, n, phi) packed matrices over Q(zeta_N).

    ``mul_dense[p, q]`` is zeta^(p+q) in the power basis.
    """
    t = np.einsum("ikp,kjq->ijpq", a, b)
    return np.tensordot(t, mul_dense, axes=([2, 3], [0, 1]))


def accumulate_series(out: np.ndarray, exps, weights, tops, count: int) -> None:
    """out += count * prod_i (z^a_i - s^b_i) / (1 - z^a_i s^w_i), truncated.

    ``out`` has shape (T + 1, M): row t holds the coefficient of s^t as an
    element of the group ring Z[C_M] (column r is the multiplicity of z^r).
    """
    rows, m = out.shape
    buf = np.zeros((rows, m), dtype=out.dtype)
    buf[0, 0] = 1
    for a, w, b in zip(exps, weights, tops):
        a = int(a) % m
        num = np.roll(buf, a, axis=1)
        if b < rows:
            num[b:] -= buf[: rows - b]
        # divide by (1 - z^a s^w): forward recursion in s
        for t in range(w, rows):
            num[t] += np.roll(num[t - w], a)
        buf = num
    out += count * buf
